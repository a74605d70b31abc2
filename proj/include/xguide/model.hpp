#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "xguide/tensor.hpp"

namespace xguide {

enum class HeadKind : std::uint8_t {
  global_average_pool = 0,  // GAP -> dense -> logit
  flatten = 1,              // dense over every last-layer activation
};

struct ConvBlockConfig {
  std::size_t filters = 8;
  bool relu = true;
  bool pool = true;
  friend bool operator==(const ConvBlockConfig&, const ConvBlockConfig&) = default;
};

// Architecture of the classifier: 3x3 "same" conv blocks followed by a
// scalar-logit head.
struct ModelConfig {
  std::size_t channels = 1;
  std::size_t height = 64;
  std::size_t width = 64;
  std::vector<ConvBlockConfig> blocks{{8}, {16}, {32}};
  HeadKind head = HeadKind::global_average_pool;

  // Throws ConfigError on an empty block list, zero extents, or pooling that
  // shrinks the grid below 1x1.
  void validate() const;
  Shape input_shape() const { return {channels, height, width}; }
  // Length of the dense layer's input.
  std::size_t feature_count() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class LayerKind : std::uint8_t { conv, relu, maxpool, global_average_pool, flatten, dense };

struct LayerInfo {
  LayerKind kind;
  std::size_t block;  // owning conv block; head layers use blocks.size()
  Shape output_shape;
};

std::vector<LayerInfo> layer_plan(const ModelConfig& config);
const char* layer_kind_name(LayerKind kind);

// Learned parameters in declaration order:
// conv[0].weight, conv[0].bias, ..., conv[n-1].bias, dense.weight, dense.bias.
struct Parameters {
  std::vector<Tensor> tensors;

  static Parameters zeros(const ModelConfig& config);
  // He-uniform weights, zero biases.
  static Parameters he_uniform(const ModelConfig& config, std::uint64_t seed);

  Tensor& conv_weight(std::size_t block) { return tensors[2 * block]; }
  const Tensor& conv_weight(std::size_t block) const { return tensors[2 * block]; }
  Tensor& conv_bias(std::size_t block) { return tensors[2 * block + 1]; }
  const Tensor& conv_bias(std::size_t block) const { return tensors[2 * block + 1]; }
  Tensor& dense_weight() { return tensors[tensors.size() - 2]; }
  const Tensor& dense_weight() const { return tensors[tensors.size() - 2]; }
  float& dense_bias() { return tensors.back()[0]; }
  float dense_bias() const { return tensors.back()[0]; }

  std::size_t scalar_count() const;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Fixed affine map applied to every image before the first layer:
// z = (x - offset) * scale. Not learned. An empty offset means zero.
struct InputNormalization {
  Tensor offset;
  float scale = 1.0f;

  bool is_identity() const { return offset.empty() && scale == 1.0f; }
  friend bool operator==(const InputNormalization&, const InputNormalization&) = default;
};

// Activations recorded by a forward pass, one per layer of the plan.
struct ForwardCache {
  std::uint64_t version = 0;
  Tensor input;  // after input normalization
  std::vector<Tensor> activations;
  std::vector<std::vector<std::uint32_t>> pool_argmax;  // non-empty for maxpool layers only
  float logit = 0.0f;
};

struct BackwardOptions {
  bool parameters = true;  // skip parameter gradients when only input/layer gradients are needed
};

struct Gradients {
  Tensor input;
  std::map<std::size_t, Tensor> layers;  // gradient of each layer's output
  Parameters params;                     // empty when BackwardOptions::parameters is false
};

class Model {
 public:
  Model(ModelConfig config, Parameters params, InputNormalization normalization = {});

  const ModelConfig& config() const { return config_; }
  const Parameters& parameters() const { return params_; }
  const std::vector<LayerInfo>& layers() const { return layers_; }
  const InputNormalization& normalization() const { return normalization_; }

  // Replaces the parameters; caches from earlier forward passes become stale.
  void set_parameters(Parameters params);
  // Identifies the current parameter set. Unique across all Model instances.
  std::uint64_t version() const { return version_; }

  ForwardCache forward(const Tensor& image) const;
  float logit(const Tensor& image) const { return forward(image).logit; }

  // Reverse pass seeded with d(output)/d(logit) = seed_grad. The input
  // gradient is with respect to the raw image.
  Gradients backward(const ForwardCache& cache, float seed_grad, BackwardOptions options = {}) const;

  // Index of the last convolutional layer output (after its ReLU when present).
  std::size_t last_conv_layer() const;

 private:
  void check_parameters() const;

  ModelConfig config_;
  Parameters params_;
  InputNormalization normalization_;
  std::vector<LayerInfo> layers_;
  std::uint64_t version_;
};

}  // namespace xguide
