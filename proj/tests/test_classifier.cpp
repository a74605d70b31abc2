#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "xguide/checkpoint.hpp"
#include "xguide/classifier.hpp"
#include "xguide/error.hpp"
#include "xguide/rng.hpp"

using namespace xguide;

namespace {

// 8x8 toy set: positives carry a bright 3x3 square, negatives none.
Dataset toy_set(std::size_t n, std::uint64_t seed) {
  Dataset d;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    Tensor t({1, 8, 8});
    for (float& v : t.data()) v = static_cast<float>(0.2 + 0.05 * rng.uniform());
    const int y = i % 2 == 0 ? 1 : 0;
    if (y) {
      const std::size_t ox = rng.uniform_int(6), oy = rng.uniform_int(6);
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) t.at(0, oy + a, ox + b) = 0.9f;
    }
    d.images.push_back(std::move(t));
    d.labels.push_back(y);
  }
  return d;
}

ModelConfig toy_model() {
  ModelConfig cfg;
  cfg.height = 8;
  cfg.width = 8;
  cfg.blocks = {{4}, {4}};
  return cfg;
}

}  // namespace

TEST(Classifier, DefaultsFollowPublishedSetup) {
  const TrainConfig c;
  EXPECT_EQ(c.learning_rate, 1e-3);
  EXPECT_EQ(c.momentum, 0.9);
  EXPECT_EQ(c.batch_size, 16u);
  EXPECT_EQ(c.max_epochs, 100u);
  EXPECT_EQ(c.patience, 10u);
}

TEST(Loss, ClosedForms) {
  const float z0[] = {0.0f};
  const int y1[] = {1};
  EXPECT_NEAR(weighted_ce_loss(z0, y1, 1.0), std::log(2.0), 1e-15);
  const float z20[] = {20.0f};
  EXPECT_LE(weighted_ce_loss(z20, y1, 1.0), 1e-8);
  EXPECT_LE(weighted_ce_loss(z20, y1, 50.0), 50 * 1e-8);
  const float big[] = {1000.0f, -1000.0f};
  const int y10[] = {0, 1};
  EXPECT_NEAR(weighted_ce_loss(big, y10, 1.0), 1000.0, 1e-9);
}

TEST(Loss, UnitWeightIsPlainCrossEntropy) {
  Rng rng(2);
  std::vector<float> z(50);
  std::vector<int> y(50);
  double ref = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = static_cast<float>(rng.uniform(-6, 6));
    y[i] = rng.bernoulli(0.4);
    const double p = 1.0 / (1.0 + std::exp(-static_cast<double>(z[i])));
    ref += -(y[i] * std::log(p) + (1 - y[i]) * std::log(1 - p));
  }
  EXPECT_NEAR(weighted_ce_loss(z, y, 1.0), ref / 50.0, 1e-12);
}

TEST(Loss, GradientMatchesFiniteDifference) {
  for (int y : {0, 1})
    for (double z : {-3.0, -0.2, 0.0, 1.5}) {
      const double w = 2.5, h = 1e-6;
      const float zp[] = {static_cast<float>(z + h)}, zm[] = {static_cast<float>(z - h)};
      const int ys[] = {y};
      const double hp = static_cast<double>(zp[0]) - zm[0];
      const double fd = (weighted_ce_loss(zp, ys, w) - weighted_ce_loss(zm, ys, w)) / hp;
      EXPECT_NEAR(weighted_ce_grad(static_cast<float>(z), y, w), fd, 1e-4);
    }
}

TEST(Sigmoid, ValuesAndMonotone) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  double prev = -1;
  for (double z = -30; z <= 30; z += 0.25) {
    EXPECT_GE(sigmoid(z), prev);
    prev = sigmoid(z);
  }
  EXPECT_NEAR(softplus(-800.0), 0.0, 1e-300);
  EXPECT_EQ(softplus(800.0), 800.0);
}

TEST(EarlyStopping, StopsPatienceEpochsAfterLastImprovement) {
  const std::size_t patience = 4;
  EarlyStopper s(patience);
  const double losses[] = {1.0, 0.9, 0.95, 0.91, 0.92, 0.97, 5.0, 0.1};
  std::size_t stopped_at = 0;
  for (std::size_t e = 0; e < std::size(losses); ++e) {
    const auto step = s.observe(losses[e]);
    EXPECT_EQ(step.improved, e < 2);
    if (step.stop) {
      stopped_at = e + 1;
      break;
    }
  }
  EXPECT_EQ(s.best_epoch(), 2u);
  EXPECT_EQ(stopped_at, 2 + patience);
}

TEST(EarlyStopping, EqualLossIsNotAnImprovement) {
  EarlyStopper s(2);
  EXPECT_TRUE(s.observe(1.0).improved);
  EXPECT_FALSE(s.observe(1.0).improved);
  EXPECT_TRUE(s.observe(1.0).stop);
}

TEST(Train, SeparableToyDescendsAndRetainsBestEpoch) {
  const Dataset tr = toy_set(32, 1), va = toy_set(16, 2);
  TrainConfig tc;
  tc.learning_rate = 0.05;
  tc.batch_size = 8;
  tc.max_epochs = 30;
  tc.patience = 30;
  const auto r = train(tr, va, toy_model(), tc);
  ASSERT_EQ(r.history.size(), 30u);
  EXPECT_LT(r.history.back().train_loss, r.history.front().train_loss);
  EXPECT_EQ(r.pos_weight, 1.0);
  // Retained parameters are those of the last improving epoch.
  std::size_t last_improved = 0;
  for (const auto& e : r.history)
    if (e.improved) last_improved = e.epoch;
  EXPECT_EQ(r.best_epoch, last_improved);
  const double retained = weighted_ce_loss(predict_logits(r.model, va.images), va.labels, 1.0);
  EXPECT_NEAR(retained, r.history[last_improved - 1].val_loss, 1e-12);
}

TEST(Train, PatienceBeyondMaxEpochsRunsEveryEpoch) {
  const Dataset tr = toy_set(16, 3), va = toy_set(8, 4);
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.max_epochs = 5;
  tc.patience = 50;
  const auto r = train(tr, va, toy_model(), tc);
  EXPECT_EQ(r.history.size(), 5u);
}

TEST(Train, DeterministicForFixedSeed) {
  const Dataset tr = toy_set(24, 5), va = toy_set(8, 6);
  TrainConfig tc;
  tc.learning_rate = 0.02;
  tc.max_epochs = 4;
  tc.seed = 42;
  const auto a = train(tr, va, toy_model(), tc);
  const auto b = train(tr, va, toy_model(), tc);
  EXPECT_EQ(encode_checkpoint(a.model), encode_checkpoint(b.model));
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].val_loss, b.history[i].val_loss);
  tc.seed = 43;
  const auto c = train(tr, va, toy_model(), tc);
  EXPECT_NE(encode_checkpoint(a.model), encode_checkpoint(c.model));
}

TEST(Train, ErrorsOnSingleClassAndDivergence) {
  Dataset tr = toy_set(8, 7);
  const Dataset va = toy_set(4, 8);
  Dataset neg;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.labels[i] == 0) {
      neg.images.push_back(tr.images[i]);
      neg.labels.push_back(0);
    }
  EXPECT_THROW((void)train(neg, va, toy_model(), {}), DataError);

  TrainConfig wild;
  wild.learning_rate = 1e30;
  wild.max_epochs = 5;
  try {
    (void)train(tr, va, toy_model(), wild);
    FAIL() << "expected divergence";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos) << e.what();
  }
}

TEST(Train, ConfigValidation) {
  TrainConfig c;
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.patience = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(InputScaling, FitMatchesHandComputedMeanAndRms) {
  Dataset d;
  d.images = {Tensor({1, 1, 2}, std::vector<float>{0.0f, 0.0f}), Tensor({1, 1, 2}, std::vector<float>{0.0f, 4.0f})};
  d.labels = {0, 1};
  EXPECT_TRUE(fit_input_normalization(d, InputScaling::none).is_identity());
  const auto c = fit_input_normalization(d, InputScaling::center);
  EXPECT_EQ(c.offset.storage(), (std::vector<float>{0.0f, 2.0f}));
  EXPECT_EQ(c.scale, 1.0f);
  // centred values 0, -2, 0, 2: RMS sqrt(2)
  const auto s = fit_input_normalization(d, InputScaling::standardize);
  EXPECT_EQ(s.offset.storage(), c.offset.storage());
  EXPECT_FLOAT_EQ(s.scale, static_cast<float>(1.0 / std::sqrt(2.0)));
  d.images[1] = d.images[0];
  EXPECT_EQ(fit_input_normalization(d, InputScaling::standardize).scale, 1.0f);
  EXPECT_EQ(parse_input_scaling("center"), InputScaling::center);
  EXPECT_THROW(parse_input_scaling("zscore"), ConfigError);
}

TEST(InputScaling, TrainedModelCarriesFittedNormalization) {
  const Dataset tr = toy_set(16, 5), va = toy_set(8, 6);
  TrainConfig tc;
  tc.max_epochs = 1;
  const auto r = train(tr, va, toy_model(), tc);
  EXPECT_EQ(r.model.normalization(), fit_input_normalization(tr, InputScaling::standardize));
  tc.input_scaling = InputScaling::none;
  EXPECT_TRUE(train(tr, va, toy_model(), tc).model.normalization().is_identity());
}

TEST(Predict, BatchEqualsOneByOne) {
  const auto cfg = toy_model();
  Model m(cfg, Parameters::he_uniform(cfg, 3));
  const Dataset d = toy_set(20, 9);
  const auto batch = predict_logits(m, d.images);
  const auto proba = predict_proba(m, d.images);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const float one = m.logit(d.images[i]);
    EXPECT_EQ(std::memcmp(&batch[i], &one, sizeof one), 0);
    EXPECT_EQ(proba[i], sigmoid(one));
  }
}
