#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <limits>
#include <fstream>
#include <sstream>

#include "xguide/cli/commands.hpp"
#include "xguide/cli/run_meta.hpp"
#include "xguide/error.hpp"
#include "xguide/netpbm.hpp"

using namespace xguide;
using namespace xguide::cli;

namespace {

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small corpus, split and a briefly trained model shared by the tests below.
class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "xguide_cli_test";
    fs::remove_all(root_);
    GenerateArgs g;
    g.spec.size = 32;
    g.spec.count = 40;
    g.spec.positive_rate = 0.5;
    g.out = root_ / "data";
    cmd_generate_synthetic(g);
    cmd_split({root_ / "data" / "manifest.csv", {}, 1, root_ / "split"});
    TrainArgs t;
    t.train = root_ / "split" / "train.csv";
    t.val = root_ / "split" / "val.csv";
    t.model.blocks = {{4}, {8}};
    t.train_config.learning_rate = 0.05;
    t.train_config.max_epochs = 2;
    t.out = root_ / "model";
    cmd_train(t);
    TemplateArgs tm;
    tm.annotation = root_ / "data" / "canonical.pbm";
    tm.name = "pleural";
    tm.out = root_ / "templates";
    cmd_make_template(tm);
    write_mask(root_ / "templates" / "everything.pbm", BinaryMask::full(32, 32));
  }

  static ExplainArgs explain_args(const fs::path& out) {
    ExplainArgs e;
    e.model = root_ / "model" / "model.xgd";
    e.reference = root_ / "model" / "reference.xim";
    e.manifest = root_ / "split" / "test.csv";
    e.xai.ig_steps = 8;
    e.templates = {root_ / "templates" / "pleural.pbm", root_ / "templates" / "everything.pbm"};
    e.out = out;
    return e;
  }

  static inline fs::path root_;
};

}  // namespace

TEST_F(Pipeline, ArtifactsAndRunMetaWritten) {
  for (const char* f : {"data/run.meta", "data/manifest.csv", "split/train.csv", "split/run.meta", "model/model.xgd",
                        "model/reference.xim", "model/loss_history.csv", "model/run.meta", "templates/pleural.pbm",
                        "templates/pleural.run.meta"})
    EXPECT_TRUE(fs::exists(root_ / f)) << f;
  const auto hist = read_lines(root_ / "model" / "loss_history.csv");
  ASSERT_EQ(hist.size(), 3u);
  EXPECT_EQ(hist[0], "epoch,train_loss,val_loss,improved");
  const auto meta = read_lines(root_ / "model" / "run.meta");
  EXPECT_EQ(meta[0], "command=train");
}

TEST_F(Pipeline, ExplainAndEvaluateProduceTwelveAggregateRowsPerTemplate) {
  const fs::path out = root_ / "explain_a";
  ExplainArgs e = explain_args(out);
  e.templates = {root_ / "templates" / "pleural.pbm"};
  cmd_explain(e);
  const auto index = read_lines(out / "explanations.csv");
  ASSERT_GT(index.size(), 1u);
  EXPECT_EQ(index[0], "sample_id,label,method,template,image,importance,baseline,guided,mask");
  cmd_evaluate_explanations({out / "explanations.csv", {.resamples = 50, .seed = 2}, out / "eval"});
  const auto agg = read_lines(out / "eval" / "aggregate.csv");
  EXPECT_EQ(agg[0], "method,guided,metric,mean,se,B,seed");
  EXPECT_EQ(agg.size(), 1u + 12u);
  std::size_t guided_rows = 0;
  for (std::size_t i = 1; i < agg.size(); ++i) guided_rows += agg[i].find(",pleural,") != std::string::npos;
  EXPECT_EQ(guided_rows, 6u);
}

TEST_F(Pipeline, AllOnesTemplateLeavesBaselineUnchanged) {
  const fs::path out = root_ / "explain_b";
  cmd_explain(explain_args(out));
  std::size_t compared = 0;
  for (const auto& row : read_lines(out / "explanations.csv")) {
    if (row.find(",everything,") == std::string::npos) continue;
    std::vector<std::string> f;
    std::stringstream ss(row);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    EXPECT_EQ(slurp(out / f[6]), slurp(out / f[7]));
    ++compared;
  }
  EXPECT_GT(compared, 0u);
}

TEST_F(Pipeline, RerunIsByteIdentical) {
  const fs::path a = root_ / "explain_c1", b = root_ / "explain_c2";
  cmd_explain(explain_args(a));
  ExplainArgs eb = explain_args(b);
  eb.threads = 1;
  cmd_explain(eb);
  for (const char* f : {"explanations.csv", "ig/phantom_0000.xim", "gradcam/phantom_0000_guided_pleural.pbm"}) {
    if (!fs::exists(a / f)) continue;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  cmd_evaluate_explanations({a / "explanations.csv", {.resamples = 30, .seed = 4}, a / "eval"});
  cmd_evaluate_explanations({b / "explanations.csv", {.resamples = 30, .seed = 4}, b / "eval"});
  EXPECT_EQ(slurp(a / "eval" / "aggregate.csv"), slurp(b / "eval" / "aggregate.csv"));
  EXPECT_EQ(slurp(a / "eval" / "report.csv"), slurp(b / "eval" / "report.csv"));
}

TEST_F(Pipeline, ClassifierEvaluationFiles) {
  const fs::path out = root_ / "cls";
  cmd_evaluate_classifier({root_ / "model" / "model.xgd", root_ / "split" / "val.csv", root_ / "split" / "test.csv",
                           {.resamples = 40, .seed = 3}, out});
  const auto rows = read_lines(out / "classification.csv");
  ASSERT_EQ(rows.size(), 1u + 1u + 7u);
  EXPECT_EQ(rows[0], "metric,value,se,B,seed");
  EXPECT_EQ(rows[1].rfind("cutoff,", 0), 0u);
  EXPECT_EQ(read_lines(out / "roc.csv")[0], "threshold,fpr,tpr");
  EXPECT_EQ(read_lines(out / "pr.csv")[0], "threshold,recall,precision");
  EXPECT_EQ(read_lines(out / "predictions.csv").size(), 1u + 8u);
}

TEST_F(Pipeline, ExplainRejectsBadInputsBeforeWorking) {
  ExplainArgs e = explain_args(root_ / "explain_bad");
  e.cutoff = 0.0;
  EXPECT_THROW(cmd_explain(e), ConfigError);
  e = explain_args(root_ / "explain_bad");
  e.model = root_ / "nope.xgd";
  EXPECT_THROW(cmd_explain(e), DataError);
  EXPECT_FALSE(fs::exists(root_ / "explain_bad"));
}

TEST_F(Pipeline, TrainRejectsOverlappingSplits) {
  TrainArgs t;
  t.train = root_ / "split" / "train.csv";
  t.val = root_ / "split" / "train.csv";
  t.out = root_ / "model_bad";
  EXPECT_THROW(cmd_train(t), DataError);
}

TEST(Render, EmptyFocusMasksLeaveGrayInFocusChannels) {
  Tensor img({1, 2, 3}, std::vector<float>{0.0f, 0.2f, 0.4f, 0.6f, 0.8f, 1.0f});
  const BinaryMask empty(3, 2);
  BinaryMask truth(3, 2);
  truth.set(1, 1);
  const RgbImage o = compose_overlay(img, &truth, &empty, &empty);
  const GrayImage g = from_tensor(img);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(o.pixels[3 * i + 0], g.pixels[i]);
    EXPECT_EQ(o.pixels[3 * i + 2], g.pixels[i]);
    EXPECT_EQ(o.pixels[3 * i + 1], i == 4 ? 255 : g.pixels[i]);
  }
  const RgbImage none = compose_overlay(img, nullptr, nullptr, nullptr);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(none.pixels[3 * i], g.pixels[i]);
}

TEST(RunMeta, DoublesRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-3), "0.001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

#ifdef XGUIDE_TOOL_PATH
TEST(Tool, ExitCodes) {
  const std::string tool = XGUIDE_TOOL_PATH;
  const fs::path dir = fs::temp_directory_path() / "xguide_exit_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](const std::string& args) {
    const int s = std::system((tool + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("make-template --annotation " + (dir / "missing.pbm").string() + " --out " + dir.string()), 2);
  std::ofstream(dir / "bad.pbm") << "P4\n8 8\n";
  EXPECT_EQ(run("make-template --annotation " + (dir / "bad.pbm").string() + " --out " + dir.string()), 2);
  EXPECT_EQ(run("generate-synthetic --count 5 --positive-rate 2 --out " + dir.string()), 1);
}
#endif
