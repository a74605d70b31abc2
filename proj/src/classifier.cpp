#include "xguide/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "xguide/error.hpp"
#include "xguide/rng.hpp"

namespace xguide {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (pos_weight && !(*pos_weight > 0.0)) throw ConfigError("pos_weight must be > 0");
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double weighted_ce_loss(std::span<const float> logits, std::span<const int> labels, double pos_weight) {
  if (logits.size() != labels.size()) throw ShapeError("weighted_ce_loss: logits and labels differ in length");
  if (logits.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    // -log(sigmoid(z)) = softplus(-z); -log(1 - sigmoid(z)) = softplus(z)
    total += labels[i] == 1 ? pos_weight * softplus(-z) : softplus(z);
  }
  return total / static_cast<double>(logits.size());
}

double weighted_ce_grad(float logit, int label, double pos_weight) {
  const double p = sigmoid(logit);
  return label == 1 ? pos_weight * (p - 1.0) : p;
}

EarlyStopper::Step EarlyStopper::observe(double val_loss) {
  ++epoch_;
  const bool improved = best_epoch_ == 0 || val_loss < best_loss_;
  if (improved) {
    best_loss_ = val_loss;
    best_epoch_ = epoch_;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  return {improved, since_best_ >= patience_};
}

std::string_view input_scaling_name(InputScaling s) {
  switch (s) {
    case InputScaling::none: return "none";
    case InputScaling::center: return "center";
    case InputScaling::standardize: return "standardize";
  }
  return "none";
}

InputScaling parse_input_scaling(std::string_view name) {
  for (InputScaling s : {InputScaling::none, InputScaling::center, InputScaling::standardize})
    if (input_scaling_name(s) == name) return s;
  throw ConfigError("unknown input scaling '" + std::string(name) + "' (expected none, center or standardize)");
}

InputNormalization fit_input_normalization(const Dataset& train_set, InputScaling scaling) {
  InputNormalization norm;
  if (scaling == InputScaling::none) return norm;
  if (train_set.size() == 0) throw DataError("cannot fit input normalization to an empty training set");
  const Tensor& first = train_set.images.front();
  std::vector<double> sum(first.size(), 0.0);
  for (const Tensor& img : train_set.images) {
    if (img.shape() != first.shape()) throw ShapeError("training images differ in shape");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += img[i];
  }
  norm.offset = Tensor(first.shape());
  const double n = static_cast<double>(train_set.size());
  for (std::size_t i = 0; i < sum.size(); ++i) norm.offset[i] = static_cast<float>(sum[i] / n);
  if (scaling == InputScaling::standardize) {
    double sq = 0.0;
    for (const Tensor& img : train_set.images)
      for (std::size_t i = 0; i < img.size(); ++i) {
        const double d = static_cast<double>(img[i] - norm.offset[i]);
        sq += d * d;
      }
    const double rms = std::sqrt(sq / (n * static_cast<double>(first.size())));
    if (rms > 0.0) norm.scale = static_cast<float>(1.0 / rms);
  }
  return norm;
}

namespace {

void check_dataset(const Dataset& d, const ModelConfig& cfg, const char* name) {
  if (d.images.size() != d.labels.size())
    throw ShapeError(std::string(name) + ": image and label counts differ");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.labels[i] != 0 && d.labels[i] != 1)
      throw DataError(std::string(name) + ": label of sample " + std::to_string(i) + " is not binary");
    if (d.images[i].shape() != cfg.input_shape())
      throw ShapeError(std::string(name) + ": sample " + std::to_string(i) + " has shape " +
                       shape_string(d.images[i].shape()) + ", model expects " + shape_string(cfg.input_shape()));
  }
}

double dataset_loss(const Model& model, const Dataset& d, double pos_weight) {
  const auto logits = predict_logits(model, d.images);
  return weighted_ce_loss(logits, d.labels, pos_weight);
}

}  // namespace

TrainResult train(const Dataset& train_set, const Dataset& val_set, const ModelConfig& model_config,
                  const TrainConfig& cfg) {
  cfg.validate();
  model_config.validate();
  check_dataset(train_set, model_config, "training set");
  check_dataset(val_set, model_config, "validation set");
  const std::size_t n_pos = train_set.positives();
  const std::size_t n = train_set.size();
  if (n_pos == 0 || n_pos == n) throw DataError("training set must contain both classes");
  if (val_set.size() == 0) throw DataError("validation set is empty");

  const double pos_weight = cfg.pos_weight.value_or(static_cast<double>(n - n_pos) / static_cast<double>(n_pos));
  const double val_weight = cfg.weighted_validation ? pos_weight : 1.0;

  InputNormalization norm = fit_input_normalization(train_set, cfg.input_scaling);
  Model model(model_config, Parameters::he_uniform(model_config, Rng::substream(cfg.seed, 0).next_u64()), norm);
  Rng order_rng = Rng::substream(cfg.seed, 1);

  Parameters velocity = Parameters::zeros(model_config);
  Parameters best = model.parameters();
  EarlyStopper stopper(cfg.patience);
  TrainResult result{model, {}, 0, pos_weight};

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Gradients> sample_grads(cfg.batch_size);
  std::vector<double> sample_loss(cfg.batch_size);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t bs = std::min(cfg.batch_size, n - start);
      bool failed = false;
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(bs); ++k) {
        const std::size_t idx = order[start + static_cast<std::size_t>(k)];
        try {
          const ForwardCache cache = model.forward(train_set.images[idx]);
          const int y = train_set.labels[idx];
          const float z = cache.logit;
          sample_loss[k] = y == 1 ? pos_weight * softplus(-z) : softplus(z);
          const auto seed = static_cast<float>(weighted_ce_grad(z, y, pos_weight) / static_cast<double>(bs));
          sample_grads[k] = model.backward(cache, seed);
        } catch (const NumericError&) {
#pragma omp atomic write
          failed = true;
        }
      }
      for (std::size_t k = 0; k < bs && !failed; ++k) {
        loss_sum += sample_loss[k];
        if (!std::isfinite(sample_loss[k])) failed = true;
      }
      if (failed) throw NumericError("training diverged at epoch " + std::to_string(epoch));

      // Fixed-order reduction keeps the update independent of thread count.
      Parameters params = model.parameters();
      for (std::size_t t = 0; t < params.tensors.size(); ++t) {
        auto theta = params.tensors[t].data();
        auto vel = velocity.tensors[t].data();
        for (std::size_t j = 0; j < theta.size(); ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k < bs; ++k) g += sample_grads[k].params.tensors[t][j];
          vel[j] = static_cast<float>(cfg.momentum * vel[j] + g);
          theta[j] = static_cast<float>(theta[j] - cfg.learning_rate * vel[j]);
        }
      }
      model.set_parameters(std::move(params));
    }

    const double train_loss = loss_sum / static_cast<double>(n);
    double val_loss = 0.0;
    try {
      val_loss = dataset_loss(model, val_set, val_weight);
    } catch (const NumericError&) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch));
    }
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      throw NumericError("training diverged at epoch " + std::to_string(epoch));

    const auto step = stopper.observe(val_loss);
    if (step.improved) best = model.parameters();
    result.history.push_back({epoch, train_loss, val_loss, step.improved});
    if (step.stop) break;
  }

  result.best_epoch = stopper.best_epoch();
  result.model = Model(model_config, std::move(best), std::move(norm));
  return result;
}

std::vector<float> predict_logits(const Model& model, std::span<const Tensor> images) {
  std::vector<float> out(images.size());
  bool failed = false;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(images.size()); ++i) {
    try {
      out[static_cast<std::size_t>(i)] = model.forward(images[static_cast<std::size_t>(i)]).logit;
    } catch (const Error&) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) {
    // Re-run serially to surface the first error with its message.
    for (const Tensor& img : images) (void)model.forward(img);
  }
  return out;
}

std::vector<double> predict_proba(const Model& model, std::span<const Tensor> images) {
  const auto logits = predict_logits(model, images);
  std::vector<double> p(logits.size());
  std::transform(logits.begin(), logits.end(), p.begin(), [](float z) { return sigmoid(z); });
  return p;
}

}  // namespace xguide
