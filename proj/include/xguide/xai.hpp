#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "xguide/mask.hpp"
#include "xguide/model.hpp"
#include "xguide/tensor.hpp"

namespace xguide {

// Quantity whose gradient drives the attribution.
enum class GradientTarget { logit, probability };

enum class XaiMethod { saliency, gradcam, integrated_gradients };

std::string_view method_name(XaiMethod m);  // "saliency", "gradcam", "ig"
XaiMethod parse_method(std::string_view name);

struct XaiOptions {
  std::size_t ig_steps = 64;
  GradientTarget target = GradientTarget::logit;
};

// Pixel-wise arithmetic mean of the training images; the integrated-gradients
// baseline.
Tensor mean_image(std::span<const Tensor> images);

// Per-pixel max over channels of |t(c, y, x)|.
ImportanceMap channel_max_abs(const Tensor& chw);

// max_c |d target / d input(c, y, x)|.
ImportanceMap saliency_map(const Model& model, const Tensor& image, GradientTarget target = GradientTarget::logit);

// ReLU(sum_k alpha_k A_k) on the last conv layer, alpha_k = spatial mean of
// d target / d A_k. Returned at the conv layer's resolution.
Tensor grad_cam_coarse(const Model& model, const Tensor& image, GradientTarget target = GradientTarget::logit);
// grad_cam_coarse bilinearly upsampled to the input grid.
ImportanceMap grad_cam(const Model& model, const Tensor& image, GradientTarget target = GradientTarget::logit);

// Signed per-element attributions (x - ref) * mean_k grad(ref + k/m (x - ref)),
// k = 1..m. Shape equals the image's.
Tensor integrated_gradients_attributions(const Model& model, const Tensor& image, const Tensor& reference,
                                         std::size_t steps, GradientTarget target = GradientTarget::logit);
ImportanceMap integrated_gradients(const Model& model, const Tensor& image, const Tensor& reference,
                                   std::size_t steps, GradientTarget target = GradientTarget::logit);

// Dispatch on method. `reference` is only read by integrated gradients.
ImportanceMap explain(XaiMethod method, const Model& model, const Tensor& image, const Tensor& reference,
                      const XaiOptions& options = {});

// Divides by the maximum; an all-zero map is returned unchanged.
ImportanceMap normalize_importance(const ImportanceMap& map);

}  // namespace xguide
