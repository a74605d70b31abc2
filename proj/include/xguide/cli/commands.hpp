#pragma once

// Subcommands of the `xguide` tool. Each validates its inputs before any
// computation, writes its artifacts plus a run.meta into `out`, and reports
// failures by throwing xguide::Error subclasses (mapped to exit codes by main).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xguide/bootstrap.hpp"
#include "xguide/classifier.hpp"
#include "xguide/guidance.hpp"
#include "xguide/manifest.hpp"
#include "xguide/netpbm.hpp"
#include "xguide/model.hpp"
#include "xguide/phantom.hpp"
#include "xguide/xai.hpp"

namespace xguide::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kSuccess = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct GenerateArgs {
  PhantomSpec spec;
  fs::path out;
};
void cmd_generate_synthetic(const GenerateArgs& args);

struct SplitArgs {
  fs::path manifest;
  SplitRatios ratios;
  std::uint64_t seed = 0;
  fs::path out;  // receives train.csv, val.csv, test.csv
};
void cmd_split(const SplitArgs& args);

struct TrainArgs {
  fs::path train;
  fs::path val;
  ModelConfig model;  // channels/height/width are taken from the data
  TrainConfig train_config;
  fs::path out;  // model.xgd, reference.xim, loss_history.csv
};
TrainResult cmd_train(const TrainArgs& args);

struct TemplateArgs {
  fs::path annotation;
  TemplateSpec spec;
  std::string name = "template";
  fs::path out;  // <name>.pbm
};
void cmd_make_template(const TemplateArgs& args);

struct ExplainArgs {
  fs::path model;
  fs::path reference;
  fs::path manifest;
  std::vector<XaiMethod> methods{XaiMethod::saliency, XaiMethod::gradcam, XaiMethod::integrated_gradients};
  XaiOptions xai;
  double cutoff = 0.95;
  std::vector<fs::path> templates;
  GuideMode mode = GuideMode::intersect;
  bool include_negatives = false;
  std::size_t threads = 0;  // 0: OpenMP default
  fs::path out;             // <method>/..., explanations.csv
};
void cmd_explain(const ExplainArgs& args);

struct EvaluateClassifierArgs {
  fs::path model;
  fs::path val;
  fs::path test;
  BootstrapOptions bootstrap;
  fs::path out;  // classification.csv, roc.csv, pr.csv, predictions.csv
};
void cmd_evaluate_classifier(const EvaluateClassifierArgs& args);

struct EvaluateExplanationsArgs {
  fs::path index;  // explanations.csv written by cmd_explain
  BootstrapOptions bootstrap;
  fs::path out;    // report.csv, aggregate.csv
};
void cmd_evaluate_explanations(const EvaluateExplanationsArgs& args);

struct RenderArgs {
  // Single-overlay mode.
  fs::path image;
  std::optional<fs::path> truth;
  std::optional<fs::path> baseline;
  std::optional<fs::path> guided;
  std::string name = "overlay";
  // Batch mode: one overlay per index row.
  std::optional<fs::path> index;
  fs::path out;
};
void cmd_render(const RenderArgs& args);

// Gray base with ground truth in green, baseline focus in red and guided
// focus in blue; each mask saturates its own channel.
RgbImage compose_overlay(const Tensor& image, const BinaryMask* truth, const BinaryMask* baseline,
                         const BinaryMask* guided);

}  // namespace xguide::cli
