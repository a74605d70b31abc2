#include "xguide/model.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "xguide/error.hpp"
#include "xguide/kernels.hpp"
#include "xguide/rng.hpp"

namespace xguide {

namespace {

std::atomic<std::uint64_t> g_next_version{1};

std::uint64_t fresh_version() { return g_next_version.fetch_add(1, std::memory_order_relaxed); }

kernels::Dims dims_of(const Shape& s) { return {s[0], s[1], s[2]}; }

}  // namespace

void ModelConfig::validate() const {
  if (channels == 0 || height == 0 || width == 0) throw ConfigError("model input extents must be positive");
  if (blocks.empty()) throw ConfigError("model needs at least one conv block");
  std::size_t h = height, w = width;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].filters == 0) throw ConfigError("conv block " + std::to_string(i) + " has zero filters");
    if (blocks[i].pool) {
      h /= 2;
      w /= 2;
      if (h == 0 || w == 0)
        throw ConfigError("pooling in block " + std::to_string(i) + " shrinks the grid below 1x1");
    }
  }
}

std::size_t ModelConfig::feature_count() const {
  const auto plan = layer_plan(*this);
  return plan[plan.size() - 2].output_shape[0];
}

std::vector<LayerInfo> layer_plan(const ModelConfig& config) {
  config.validate();
  std::vector<LayerInfo> plan;
  std::size_t h = config.height, w = config.width;
  for (std::size_t b = 0; b < config.blocks.size(); ++b) {
    const std::size_t f = config.blocks[b].filters;
    plan.push_back({LayerKind::conv, b, {f, h, w}});
    if (config.blocks[b].relu) plan.push_back({LayerKind::relu, b, {f, h, w}});
    if (config.blocks[b].pool) {
      h /= 2;
      w /= 2;
      plan.push_back({LayerKind::maxpool, b, {f, h, w}});
    }
  }
  const std::size_t nb = config.blocks.size();
  const std::size_t f = config.blocks.back().filters;
  if (config.head == HeadKind::global_average_pool)
    plan.push_back({LayerKind::global_average_pool, nb, {f}});
  else
    plan.push_back({LayerKind::flatten, nb, {f * h * w}});
  plan.push_back({LayerKind::dense, nb, {1}});
  return plan;
}

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv: return "conv";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::global_average_pool: return "gap";
    case LayerKind::flatten: return "flatten";
    case LayerKind::dense: return "dense";
  }
  return "?";
}

Parameters Parameters::zeros(const ModelConfig& config) {
  Parameters p;
  std::size_t in_c = config.channels;
  for (const auto& b : config.blocks) {
    p.tensors.emplace_back(Shape{b.filters, in_c, 3, 3});
    p.tensors.emplace_back(Shape{b.filters});
    in_c = b.filters;
  }
  p.tensors.emplace_back(Shape{config.feature_count()});
  p.tensors.emplace_back(Shape{1});
  return p;
}

Parameters Parameters::he_uniform(const ModelConfig& config, std::uint64_t seed) {
  Parameters p = zeros(config);
  Rng rng(seed);
  auto init = [&](Tensor& t, std::size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (float& v : t.data()) v = static_cast<float>(rng.uniform(-limit, limit));
  };
  std::size_t in_c = config.channels;
  for (std::size_t b = 0; b < config.blocks.size(); ++b) {
    init(p.conv_weight(b), in_c * 9);
    in_c = config.blocks[b].filters;
  }
  init(p.dense_weight(), p.dense_weight().size());
  return p;
}

std::size_t Parameters::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

Model::Model(ModelConfig config, Parameters params, InputNormalization normalization)
    : config_(std::move(config)),
      params_(std::move(params)),
      normalization_(std::move(normalization)),
      version_(fresh_version()) {
  layers_ = layer_plan(config_);
  check_parameters();
  if (!normalization_.offset.empty() && normalization_.offset.shape() != config_.input_shape())
    throw ShapeError("normalization offset shape " + shape_string(normalization_.offset.shape()) +
                     " does not match model input " + shape_string(config_.input_shape()));
  if (!(std::isfinite(normalization_.scale) && normalization_.scale > 0.0f) || !normalization_.offset.all_finite())
    throw ConfigError("input normalization must be finite with a positive scale");
}

void Model::set_parameters(Parameters params) {
  params_ = std::move(params);
  check_parameters();
  version_ = fresh_version();
}

void Model::check_parameters() const {
  const Parameters expected = Parameters::zeros(config_);
  if (params_.tensors.size() != expected.tensors.size())
    throw ShapeError("model expects " + std::to_string(expected.tensors.size()) + " parameter tensors, got " +
                     std::to_string(params_.tensors.size()));
  for (std::size_t i = 0; i < expected.tensors.size(); ++i) {
    if (params_.tensors[i].shape() != expected.tensors[i].shape())
      throw ShapeError("parameter tensor " + std::to_string(i) + " has shape " +
                       shape_string(params_.tensors[i].shape()) + ", expected " +
                       shape_string(expected.tensors[i].shape()));
  }
}

std::size_t Model::last_conv_layer() const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].kind == LayerKind::conv) {
      idx = i;
      if (i + 1 < layers_.size() && layers_[i + 1].kind == LayerKind::relu) idx = i + 1;
    }
  }
  return idx;
}

ForwardCache Model::forward(const Tensor& image) const {
  if (image.shape() != config_.input_shape())
    throw ShapeError("image shape " + shape_string(image.shape()) + " does not match model input " +
                     shape_string(config_.input_shape()));
  ForwardCache cache;
  cache.version = version_;
  cache.input = image;
  if (!normalization_.is_identity()) {
    const float k = normalization_.scale;
    const bool shift = !normalization_.offset.empty();
    for (std::size_t i = 0; i < image.size(); ++i)
      cache.input[i] = (shift ? image[i] - normalization_.offset[i] : image[i]) * k;
  }
  cache.activations.reserve(layers_.size());
  cache.pool_argmax.resize(layers_.size());

  const Tensor* prev = &cache.input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerInfo& layer = layers_[i];
    Tensor out(layer.output_shape);
    switch (layer.kind) {
      case LayerKind::conv:
        kernels::conv3x3_forward(prev->data(), dims_of(prev->shape()), params_.conv_weight(layer.block).data(),
                                 params_.conv_bias(layer.block).data(), layer.output_shape[0], out.data());
        break;
      case LayerKind::relu:
        kernels::relu_forward(prev->data(), out.data());
        break;
      case LayerKind::maxpool:
        cache.pool_argmax[i].resize(out.size());
        kernels::maxpool2x2_forward(prev->data(), dims_of(prev->shape()), out.data(), cache.pool_argmax[i]);
        break;
      case LayerKind::global_average_pool: {
        const std::size_t P = prev->dim(1) * prev->dim(2);
        for (std::size_t f = 0; f < out.size(); ++f) {
          double s = 0.0;
          for (std::size_t k = 0; k < P; ++k) s += (*prev)[f * P + k];
          out[f] = static_cast<float>(s / static_cast<double>(P));
        }
        break;
      }
      case LayerKind::flatten:
        out.storage() = prev->storage();
        break;
      case LayerKind::dense: {
        const Tensor& w = params_.dense_weight();
        double s = params_.dense_bias();
        for (std::size_t k = 0; k < w.size(); ++k) s += static_cast<double>(w[k]) * (*prev)[k];
        out[0] = static_cast<float>(s);
        break;
      }
    }
    cache.activations.push_back(std::move(out));
    prev = &cache.activations.back();
  }
  cache.logit = cache.activations.back()[0];
  if (!std::isfinite(cache.logit)) throw NumericError("forward pass produced a non-finite logit");
  return cache;
}

Gradients Model::backward(const ForwardCache& cache, float seed_grad, BackwardOptions options) const {
  if (cache.version != version_ || cache.activations.size() != layers_.size())
    throw Error("stale forward cache: produced with parameter version " + std::to_string(cache.version) +
                ", model is at version " + std::to_string(version_));
  Gradients grads;
  if (options.parameters) grads.params = Parameters::zeros(config_);

  Tensor grad({1}, seed_grad);
  for (std::size_t ii = layers_.size(); ii-- > 0;) {
    const LayerInfo& layer = layers_[ii];
    const Tensor& in = ii == 0 ? cache.input : cache.activations[ii - 1];
    Tensor grad_in(in.shape());
    switch (layer.kind) {
      case LayerKind::dense: {
        const Tensor& w = params_.dense_weight();
        const float g = grad[0];
        for (std::size_t k = 0; k < w.size(); ++k) grad_in[k] = g * w[k];
        if (options.parameters) {
          for (std::size_t k = 0; k < w.size(); ++k) grads.params.dense_weight()[k] = g * in[k];
          grads.params.dense_bias() = g;
        }
        break;
      }
      case LayerKind::flatten:
        grad_in.storage() = grad.storage();
        break;
      case LayerKind::global_average_pool: {
        const std::size_t P = in.dim(1) * in.dim(2);
        const float inv = 1.0f / static_cast<float>(P);
        for (std::size_t f = 0; f < grad.size(); ++f) {
          const float g = grad[f] * inv;
          for (std::size_t k = 0; k < P; ++k) grad_in[f * P + k] = g;
        }
        break;
      }
      case LayerKind::maxpool:
        kernels::maxpool2x2_backward(grad.data(), dims_of(in.shape()), cache.pool_argmax[ii], grad_in.data());
        break;
      case LayerKind::relu:
        kernels::relu_backward(in.data(), grad.data(), grad_in.data());
        break;
      case LayerKind::conv: {
        const auto d = dims_of(in.shape());
        const std::size_t f = layer.output_shape[0];
        kernels::conv3x3_backward_input(grad.data(), d, params_.conv_weight(layer.block).data(), f, grad_in.data());
        if (options.parameters)
          kernels::conv3x3_backward_params(in.data(), d, grad.data(), f, grads.params.conv_weight(layer.block).data(),
                                           grads.params.conv_bias(layer.block).data());
        break;
      }
    }
    grads.layers.emplace(ii, std::move(grad));
    grad = std::move(grad_in);
  }
  if (normalization_.scale != 1.0f)
    for (float& g : grad.data()) g *= normalization_.scale;
  grads.input = std::move(grad);
  require_finite(grads.input, "input gradient");
  return grads;
}

}  // namespace xguide
