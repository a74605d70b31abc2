#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "xguide/error.hpp"
#include "xguide/rng.hpp"
#include "xguide/xai.hpp"

using namespace xguide;

namespace {

// logit = sum_{c,y,x} w[y,x] * x[c,y,x] * kc[c]: delta conv, flatten head.
Model linear_model(std::size_t C, std::size_t H, std::size_t W, const std::vector<float>& channel_gain,
                   const std::vector<float>& pixel_weight, float bias = 0.0f) {
  ModelConfig cfg;
  cfg.channels = C;
  cfg.height = H;
  cfg.width = W;
  cfg.blocks = {{1, false, false}};
  cfg.head = HeadKind::flatten;
  Parameters p = Parameters::zeros(cfg);
  for (std::size_t c = 0; c < C; ++c) p.conv_weight(0)[c * 9 + 4] = channel_gain[c];
  for (std::size_t i = 0; i < H * W; ++i) p.dense_weight()[i] = pixel_weight[i];
  p.dense_bias() = bias;
  return Model(cfg, p);
}

Tensor random_tensor(Shape s, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Tensor t(std::move(s));
  Rng rng(seed);
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

}  // namespace

TEST(Xai, MethodNames) {
  for (auto m : {XaiMethod::saliency, XaiMethod::gradcam, XaiMethod::integrated_gradients})
    EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_EQ(method_name(XaiMethod::integrated_gradients), "ig");
  EXPECT_THROW(parse_method("lime"), ConfigError);
}

TEST(Saliency, LinearModelGivesAbsoluteWeights) {
  Rng rng(1);
  std::vector<float> w(20);
  for (float& v : w) v = static_cast<float>(rng.uniform(-3, 3));
  const Model m = linear_model(1, 4, 5, {1.0f}, w);
  const auto map = saliency_map(m, random_tensor({1, 4, 5}, 2));
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(map[i], std::abs(w[i]));
}

TEST(Saliency, ChannelMaxOfAbsolutes) {
  const Model m = linear_model(3, 2, 2, {1.0f, -2.0f, 0.5f}, {1, 1, 1, 1});
  const auto map = saliency_map(m, random_tensor({3, 2, 2}, 3));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(map[i], 2.0f);
}

TEST(Saliency, NonNegativeOnRandomModels) {
  ModelConfig cfg;
  cfg.height = cfg.width = 16;
  cfg.blocks = {{4}, {4}};
  for (std::uint64_t s = 0; s < 3; ++s) {
    Model m(cfg, Parameters::he_uniform(cfg, s));
    const auto map = saliency_map(m, random_tensor(cfg.input_shape(), 10 + s));
    for (float v : map.values()) EXPECT_GE(v, 0.0f);
  }
}

TEST(GradCam, ZeroHeadGivesZeroMap) {
  ModelConfig cfg;
  cfg.height = cfg.width = 16;
  cfg.blocks = {{4}, {6}};
  Parameters p = Parameters::he_uniform(cfg, 4);
  p.dense_weight().fill(0.0f);
  Model m(cfg, p);
  const auto map = grad_cam(m, random_tensor(cfg.input_shape(), 5));
  EXPECT_EQ(map.width(), 16u);
  for (float v : map.values()) EXPECT_EQ(v, 0.0f);
}

TEST(GradCam, OneFilterIdentityCase) {
  ModelConfig cfg;
  cfg.height = 4;
  cfg.width = 6;
  cfg.blocks = {{1, true, false}};
  Parameters p = Parameters::zeros(cfg);
  p.conv_weight(0)[4] = 1.0f;
  p.dense_weight()[0] = 1.0f;
  Model m(cfg, p);
  const Tensor img = random_tensor(cfg.input_shape(), 6, -1.0, 1.0);
  const Tensor coarse = grad_cam_coarse(m, img);
  ASSERT_EQ(coarse.shape(), (Shape{4, 6}));
  const double alpha = 1.0 / 24.0;
  for (std::size_t i = 0; i < 24; ++i) EXPECT_NEAR(coarse[i], alpha * std::max(0.0f, img[i]), 1e-7);
  const auto full = grad_cam(m, img);
  for (std::size_t i = 0; i < 24; ++i) EXPECT_EQ(full[i], coarse[i]);
}

TEST(GradCam, UpsampledExtremaBoundedByCoarse) {
  ModelConfig cfg;
  cfg.height = cfg.width = 32;
  cfg.blocks = {{4}, {8}};
  Model m(cfg, Parameters::he_uniform(cfg, 8));
  const Tensor img = random_tensor(cfg.input_shape(), 9);
  const Tensor coarse = grad_cam_coarse(m, img);
  const auto full = grad_cam(m, img);
  const auto [lo, hi] = std::minmax_element(coarse.data().begin(), coarse.data().end());
  for (float v : full.values()) {
    EXPECT_GE(v, *lo);
    EXPECT_LE(v, *hi);
  }
}

TEST(IntegratedGradients, LinearModelIsExactForAnyStepCount) {
  Rng rng(11);
  std::vector<float> w(30);
  for (float& v : w) v = static_cast<float>(rng.uniform(-2, 2));
  const Model m = linear_model(1, 5, 6, {1.0f}, w, 0.3f);
  const Tensor x = random_tensor({1, 5, 6}, 12), ref = random_tensor({1, 5, 6}, 13);
  for (std::size_t steps : {1u, 5u, 64u}) {
    const Tensor a = integrated_gradients_attributions(m, x, ref, steps);
    for (std::size_t i = 0; i < 30; ++i)
      EXPECT_NEAR(a[i], static_cast<double>(w[i]) * (static_cast<double>(x[i]) - ref[i]), 1e-6);
  }
}

TEST(IntegratedGradients, ImageEqualToReferenceGivesZero) {
  ModelConfig cfg;
  cfg.height = cfg.width = 16;
  cfg.blocks = {{4}, {4}};
  Model m(cfg, Parameters::he_uniform(cfg, 14));
  const Tensor x = random_tensor(cfg.input_shape(), 15);
  const auto map = integrated_gradients(m, x, x, 16);
  for (float v : map.values()) EXPECT_EQ(v, 0.0f);
}

TEST(IntegratedGradients, CompletenessOnRandomNetwork) {
  ModelConfig cfg;
  cfg.height = cfg.width = 16;
  cfg.blocks = {{4}, {6}};
  Model m(cfg, Parameters::he_uniform(cfg, 16));
  const Tensor x = random_tensor(cfg.input_shape(), 17), ref(cfg.input_shape(), 0.0f);
  const Tensor a = integrated_gradients_attributions(m, x, ref, 512);
  double s = 0;
  for (float v : a.data()) s += v;
  const double delta = static_cast<double>(m.logit(x)) - m.logit(ref);
  EXPECT_LE(std::abs(s - delta), 0.05 * std::abs(delta));
}

TEST(IntegratedGradients, RejectsZeroStepsAndShapeMismatch) {
  const Model m = linear_model(1, 2, 2, {1.0f}, {1, 1, 1, 1});
  const Tensor x({1, 2, 2});
  EXPECT_THROW((void)integrated_gradients(m, x, x, 0), ConfigError);
  EXPECT_THROW((void)integrated_gradients(m, x, Tensor({1, 2, 3}), 4), ShapeError);
}

TEST(Xai, MeanImage) {
  std::vector<Tensor> imgs{Tensor({1, 1, 2}, std::vector<float>{0, 1}), Tensor({1, 1, 2}, std::vector<float>{1, 2})};
  const Tensor m = mean_image(imgs);
  EXPECT_EQ(m[0], 0.5f);
  EXPECT_EQ(m[1], 1.5f);
  EXPECT_THROW((void)mean_image(std::span<const Tensor>{}), DataError);
}

TEST(Normalize, ScalesByMaximum) {
  const ImportanceMap m(2, 2, {1.0f, 4.0f, 2.0f, 0.0f});
  const auto n = normalize_importance(m);
  EXPECT_EQ(n.values(), (std::vector<float>{0.25f, 1.0f, 0.5f, 0.0f}));
  const ImportanceMap z(3, 1, {0, 0, 0});
  EXPECT_EQ(normalize_importance(z), z);
}

TEST(Normalize, PreservesRanking) {
  Rng rng(20);
  std::vector<float> v(100);
  for (float& x : v) x = static_cast<float>(rng.uniform(0, 7));
  const ImportanceMap m(10, 10, v);
  const auto n = normalize_importance(m);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 0; j < 100; ++j)
      if (m[i] < m[j]) {
        EXPECT_LE(n[i], n[j]);
      }
  const auto am = std::max_element(v.begin(), v.end()) - v.begin();
  EXPECT_EQ(n[static_cast<std::size_t>(am)], 1.0f);
}

TEST(ImportanceMap, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(ImportanceMap(1, 2, {0.0f, -1.0f}), Error);
  EXPECT_THROW(ImportanceMap(1, 1, {NAN}), Error);
  EXPECT_THROW(ImportanceMap(2, 2, {0.0f}), Error);
}
