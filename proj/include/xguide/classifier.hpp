#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "xguide/model.hpp"
#include "xguide/tensor.hpp"

namespace xguide {

// How train() fits the model's fixed input normalization to the training set.
enum class InputScaling {
  none,         // raw pixels
  center,       // subtract the mean training image
  standardize,  // center, then divide by the RMS of the centered pixels
};
std::string_view input_scaling_name(InputScaling s);
InputScaling parse_input_scaling(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  // Positive-class loss weight; unset means N_neg / N_pos of the training set.
  std::optional<double> pos_weight;
  // Apply the positive-class weight to the validation loss as well.
  bool weighted_validation = false;
  InputScaling input_scaling = InputScaling::standardize;
  std::uint64_t seed = 0;

  void validate() const;
};

// Images with binary labels, index-aligned.
struct Dataset {
  std::vector<Tensor> images;
  std::vector<int> labels;

  std::size_t size() const { return images.size(); }
  std::size_t positives() const;
};

double sigmoid(double z);
// log(1 + exp(x)) without overflow.
double softplus(double x);

// Mean over the batch of -[w*y*log(sigmoid(z)) + (1-y)*log(1-sigmoid(z))].
double weighted_ce_loss(std::span<const float> logits, std::span<const int> labels, double pos_weight);
// d(per-sample loss)/d(logit) for one sample.
double weighted_ce_grad(float logit, int label, double pos_weight);

// Validation-loss early stopping: an epoch improves when its loss is strictly
// below every earlier one; training stops once `patience` consecutive epochs
// fail to improve.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  struct Step {
    bool improved;
    bool stop;
  };
  Step observe(double val_loss);

  // 1-based epoch of the last improvement, 0 before any.
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_loss_ = 0.0;
};

struct EpochRecord {
  std::size_t epoch;  // 1-based
  double train_loss;
  double val_loss;
  bool improved;
};

struct TrainResult {
  Model model;  // parameters of best_epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double pos_weight = 1.0;
};

InputNormalization fit_input_normalization(const Dataset& train_set, InputScaling scaling);

// SGD with momentum on the weighted cross-entropy, with validation early
// stopping. Deterministic for a fixed config (including seed).
TrainResult train(const Dataset& train_set, const Dataset& val_set, const ModelConfig& model_config,
                  const TrainConfig& train_config);

std::vector<float> predict_logits(const Model& model, std::span<const Tensor> images);
std::vector<double> predict_proba(const Model& model, std::span<const Tensor> images);

}  // namespace xguide
