#include "xguide/xai.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "xguide/classifier.hpp"
#include "xguide/error.hpp"
#include "xguide/upsample.hpp"

namespace xguide {

namespace {

float seed_for(GradientTarget target, float logit) {
  if (target == GradientTarget::logit) return 1.0f;
  const double p = sigmoid(logit);
  return static_cast<float>(p * (1.0 - p));
}

Gradients input_gradients(const Model& model, const ForwardCache& cache, GradientTarget target) {
  return model.backward(cache, seed_for(target, cache.logit), {.parameters = false});
}

}  // namespace

std::string_view method_name(XaiMethod m) {
  switch (m) {
    case XaiMethod::saliency: return "saliency";
    case XaiMethod::gradcam: return "gradcam";
    case XaiMethod::integrated_gradients: return "ig";
  }
  return "?";
}

XaiMethod parse_method(std::string_view name) {
  if (name == "saliency") return XaiMethod::saliency;
  if (name == "gradcam") return XaiMethod::gradcam;
  if (name == "ig") return XaiMethod::integrated_gradients;
  throw ConfigError("unknown XAI method '" + std::string(name) + "' (expected saliency, gradcam or ig)");
}

Tensor mean_image(std::span<const Tensor> images) {
  if (images.empty()) throw DataError("mean_image: no images");
  const Shape shape = images.front().shape();
  std::vector<double> sum(images.front().size(), 0.0);
  for (const Tensor& img : images) {
    if (img.shape() != shape) throw ShapeError("mean_image: images differ in shape");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += img[i];
  }
  Tensor out(shape);
  const double n = static_cast<double>(images.size());
  for (std::size_t i = 0; i < sum.size(); ++i) out[i] = static_cast<float>(sum[i] / n);
  return out;
}

ImportanceMap channel_max_abs(const Tensor& chw) {
  if (chw.rank() != 3) throw ShapeError("expected C x H x W tensor, got " + shape_string(chw.shape()));
  const std::size_t C = chw.dim(0), H = chw.dim(1), W = chw.dim(2);
  std::vector<float> v(H * W, 0.0f);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < H * W; ++i) v[i] = std::max(v[i], std::abs(chw[c * H * W + i]));
  return ImportanceMap(W, H, std::move(v));
}

ImportanceMap saliency_map(const Model& model, const Tensor& image, GradientTarget target) {
  const ForwardCache cache = model.forward(image);
  return channel_max_abs(input_gradients(model, cache, target).input);
}

Tensor grad_cam_coarse(const Model& model, const Tensor& image, GradientTarget target) {
  const ForwardCache cache = model.forward(image);
  const Gradients grads = input_gradients(model, cache, target);
  const std::size_t layer = model.last_conv_layer();
  const Tensor& act = cache.activations[layer];
  const Tensor& grad = grads.layers.at(layer);
  const std::size_t F = act.dim(0), h = act.dim(1), w = act.dim(2), P = h * w;

  std::vector<double> alpha(F);
  for (std::size_t k = 0; k < F; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < P; ++i) s += grad[k * P + i];
    alpha[k] = s / static_cast<double>(P);
  }
  Tensor coarse({h, w});
  for (std::size_t i = 0; i < P; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < F; ++k) s += alpha[k] * act[k * P + i];
    coarse[i] = s > 0.0 ? static_cast<float>(s) : 0.0f;
  }
  return coarse;
}

ImportanceMap grad_cam(const Model& model, const Tensor& image, GradientTarget target) {
  const auto& cfg = model.config();
  const Tensor up = bilinear_upsample(grad_cam_coarse(model, image, target), cfg.height, cfg.width);
  return ImportanceMap(cfg.width, cfg.height, up.storage());
}

Tensor integrated_gradients_attributions(const Model& model, const Tensor& image, const Tensor& reference,
                                         std::size_t steps, GradientTarget target) {
  if (steps == 0) throw ConfigError("integrated gradients needs at least one step");
  if (reference.shape() != image.shape())
    throw ShapeError("reference shape " + shape_string(reference.shape()) + " does not match image shape " +
                     shape_string(image.shape()));
  const std::size_t n = image.size();
  std::vector<Tensor> step_grads(steps);
  bool failed = false;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ki = 0; ki < static_cast<std::ptrdiff_t>(steps); ++ki) {
    const double alpha = static_cast<double>(ki + 1) / static_cast<double>(steps);
    Tensor point(image.shape());
    for (std::size_t i = 0; i < n; ++i)
      point[i] = static_cast<float>(reference[i] + alpha * (static_cast<double>(image[i]) - reference[i]));
    try {
      const ForwardCache cache = model.forward(point);
      step_grads[static_cast<std::size_t>(ki)] = input_gradients(model, cache, target).input;
    } catch (const Error&) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) throw NumericError("integrated gradients: gradient evaluation failed along the path");

  std::vector<double> sum(n, 0.0);
  for (const Tensor& g : step_grads)
    for (std::size_t i = 0; i < n; ++i) sum[i] += g[i];
  Tensor attr(image.shape());
  for (std::size_t i = 0; i < n; ++i)
    attr[i] = static_cast<float>((static_cast<double>(image[i]) - reference[i]) * (sum[i] / static_cast<double>(steps)));
  return attr;
}

ImportanceMap integrated_gradients(const Model& model, const Tensor& image, const Tensor& reference,
                                   std::size_t steps, GradientTarget target) {
  return channel_max_abs(integrated_gradients_attributions(model, image, reference, steps, target));
}

ImportanceMap explain(XaiMethod method, const Model& model, const Tensor& image, const Tensor& reference,
                      const XaiOptions& options) {
  switch (method) {
    case XaiMethod::saliency: return saliency_map(model, image, options.target);
    case XaiMethod::gradcam: return grad_cam(model, image, options.target);
    case XaiMethod::integrated_gradients:
      return integrated_gradients(model, image, reference, options.ig_steps, options.target);
  }
  throw ConfigError("unknown XAI method");
}

ImportanceMap normalize_importance(const ImportanceMap& map) {
  const float m = map.max_value();
  if (m == 0.0f) return map;
  std::vector<float> v(map.values());
  for (float& x : v) x /= m;
  return ImportanceMap(map.width(), map.height(), std::move(v));
}

}  // namespace xguide
