// xguide: template-guided explanation pipeline.
//
//   xguide generate-synthetic --out data
//   xguide split --manifest data/manifest.csv --out data/split
//   xguide train --train data/split/train.csv --val data/split/val.csv --out run/model
//   xguide make-template --annotation data/canonical.pbm --out run/templates
//   xguide explain --model run/model/model.xgd --reference run/model/reference.xim
//                  --manifest data/split/test.csv --templates run/templates/template.pbm --out run/explain
//   xguide evaluate-classifier --model ... --val ... --test ... --out run/classifier
//   xguide evaluate-explanations --index run/explain/explanations.csv --out run/quality
//   xguide render --index run/explain/explanations.csv --out run/overlays

#include <cstdio>
#include <sstream>

#include "CLI11.hpp"
#include "xguide/cli/commands.hpp"
#include "xguide/error.hpp"

namespace {

using namespace xguide;
using namespace xguide::cli;

std::vector<std::size_t> parse_blocks(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("--blocks expects comma-separated filter counts, got '" + s + "'");
    out.push_back(std::stoul(tok));
  }
  if (out.empty()) throw ConfigError("--blocks must list at least one block");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Template-guided post-hoc explanation of image classifiers"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  // generate-synthetic
  GenerateArgs gen;
  double distractor_pos = 0.0;
  auto* g = app.add_subcommand("generate-synthetic", "Write a seeded phantom corpus");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--count", gen.spec.count, "Number of images")->capture_default_str();
  g->add_option("--size", gen.spec.size, "Image side length")->capture_default_str();
  g->add_option("--positive-rate", gen.spec.positive_rate)->capture_default_str();
  g->add_option("--off-template-rate", gen.spec.off_template_rate)->capture_default_str();
  g->add_option("--noise", gen.spec.noise)->capture_default_str();
  g->add_option("--distractor-rate", gen.spec.distractor_rate)->capture_default_str();
  g->add_option("--distractor-rate-positive", distractor_pos, "Marker chance for positives (default: same as negatives)");
  g->add_option("--lesion-level", gen.spec.lesion_level)->capture_default_str();
  g->add_option("--pleural-line-level", gen.spec.pleural_line_level)->capture_default_str();
  g->add_option("--seed", gen.spec.seed)->capture_default_str();

  // split
  SplitArgs sp;
  std::vector<double> ratios{0.6, 0.2, 0.2};
  auto* s = app.add_subcommand("split", "Stratified train/val/test split of a manifest");
  s->add_option("--manifest", sp.manifest)->required();
  s->add_option("--out", sp.out)->required();
  s->add_option("--ratios", ratios, "train,val,test")->delimiter(',')->expected(3)->capture_default_str();
  s->add_option("--seed", sp.seed)->capture_default_str();

  // train
  TrainArgs tr;
  std::string blocks = "8,16,32";
  std::string head = "gap";
  double pos_weight = 0.0;
  std::string input_scaling = "standardize";
  auto* t = app.add_subcommand("train", "Train the CNN classifier with early stopping");
  t->add_option("--train", tr.train, "Training manifest")->required();
  t->add_option("--val", tr.val, "Validation manifest")->required();
  t->add_option("--out", tr.out)->required();
  t->add_option("--blocks", blocks, "Filters per conv block")->capture_default_str();
  t->add_option("--head", head, "gap or flatten")->capture_default_str();
  t->add_option("--lr", tr.train_config.learning_rate)->capture_default_str();
  t->add_option("--momentum", tr.train_config.momentum)->capture_default_str();
  t->add_option("--batch-size", tr.train_config.batch_size)->capture_default_str();
  t->add_option("--max-epochs", tr.train_config.max_epochs)->capture_default_str();
  t->add_option("--patience", tr.train_config.patience)->capture_default_str();
  t->add_option("--pos-weight", pos_weight, "Positive-class weight (default N_neg/N_pos)");
  t->add_flag("--weighted-validation", tr.train_config.weighted_validation);
  t->add_option("--input-scaling", input_scaling, "none, center or standardize")->capture_default_str();
  t->add_option("--seed", tr.train_config.seed)->capture_default_str();

  // make-template
  TemplateArgs mt;
  bool no_flip = false;
  auto* m = app.add_subcommand("make-template", "Build an occurrence template from one annotation");
  m->add_option("--annotation", mt.annotation)->required();
  m->add_option("--out", mt.out)->required();
  m->add_option("--name", mt.name)->capture_default_str();
  m->add_option("--radius", mt.spec.radius)->capture_default_str();
  m->add_flag("--no-flip", no_flip);

  // explain
  ExplainArgs ex;
  std::vector<std::string> methods{"saliency", "gradcam", "ig"};
  std::string guide_mode = "intersect";
  std::string target = "logit";
  auto* e = app.add_subcommand("explain", "Importance maps and baseline/guided focus regions");
  e->add_option("--model", ex.model)->required();
  e->add_option("--reference", ex.reference, "Reference image (.xim) for integrated gradients");
  e->add_option("--manifest", ex.manifest)->required();
  e->add_option("--out", ex.out)->required();
  e->add_option("--methods", methods)->delimiter(',')->capture_default_str();
  e->add_option("--steps", ex.xai.ig_steps, "Integrated-gradients steps")->capture_default_str();
  e->add_option("--vstar", ex.cutoff, "Focus cutoff on the normalized map")->capture_default_str();
  e->add_option("--templates,--template", ex.templates)->delimiter(',');
  e->add_option("--guide-mode", guide_mode, "intersect or renormalize")->capture_default_str();
  e->add_option("--gradient-target", target, "logit or probability")->capture_default_str();
  e->add_flag("--include-negatives", ex.include_negatives);
  e->add_option("--threads", ex.threads)->capture_default_str();

  // evaluate-classifier
  EvaluateClassifierArgs ec;
  ec.bootstrap.resamples = 1000;
  auto* c = app.add_subcommand("evaluate-classifier", "AUROC/AUPRC and cutoff metrics with bootstrap SEs");
  c->add_option("--model", ec.model)->required();
  c->add_option("--val", ec.val)->required();
  c->add_option("--test", ec.test)->required();
  c->add_option("--out", ec.out)->required();
  c->add_option("--bootstrap", ec.bootstrap.resamples)->capture_default_str();
  c->add_option("--seed", ec.bootstrap.seed)->capture_default_str();

  // evaluate-explanations
  EvaluateExplanationsArgs ee;
  auto* q = app.add_subcommand("evaluate-explanations", "IoU/DSC of focus regions with bootstrap SEs");
  q->add_option("--index", ee.index)->required();
  q->add_option("--out", ee.out)->required();
  q->add_option("--bootstrap", ee.bootstrap.resamples)->capture_default_str();
  q->add_option("--seed", ee.bootstrap.seed)->capture_default_str();

  // render
  RenderArgs rn;
  std::string truth, baseline, guided, index;
  auto* r = app.add_subcommand("render", "Colour overlay: truth green, baseline red, guided blue");
  r->add_option("--out", rn.out)->required();
  r->add_option("--index", index, "Render every row of an explanation index");
  r->add_option("--image", rn.image);
  r->add_option("--truth", truth);
  r->add_option("--baseline", baseline);
  r->add_option("--guided", guided);
  r->add_option("--name", rn.name)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kSuccess : kUsage;
  }

  try {
    if (*g) {
      if (g->count("--distractor-rate-positive")) gen.spec.distractor_rate_positive = distractor_pos;
      cmd_generate_synthetic(gen);
    } else if (*s) {
      sp.ratios = {ratios.at(0), ratios.at(1), ratios.at(2)};
      cmd_split(sp);
    } else if (*t) {
      tr.model.blocks.clear();
      for (std::size_t f : parse_blocks(blocks)) tr.model.blocks.push_back({f});
      if (head == "gap") tr.model.head = HeadKind::global_average_pool;
      else if (head == "flatten") tr.model.head = HeadKind::flatten;
      else throw ConfigError("--head must be gap or flatten");
      if (t->count("--pos-weight")) tr.train_config.pos_weight = pos_weight;
      tr.train_config.input_scaling = parse_input_scaling(input_scaling);
      cmd_train(tr);
    } else if (*m) {
      mt.spec.flip = !no_flip;
      cmd_make_template(mt);
    } else if (*e) {
      ex.methods.clear();
      for (const auto& name : methods) ex.methods.push_back(parse_method(name));
      ex.mode = parse_guide_mode(guide_mode);
      if (target == "logit") ex.xai.target = GradientTarget::logit;
      else if (target == "probability") ex.xai.target = GradientTarget::probability;
      else throw ConfigError("--gradient-target must be logit or probability");
      cmd_explain(ex);
    } else if (*c) {
      cmd_evaluate_classifier(ec);
    } else if (*q) {
      cmd_evaluate_explanations(ee);
    } else if (*r) {
      if (!index.empty()) rn.index = index;
      else if (rn.image.empty()) throw ConfigError("render needs --index or --image");
      if (!truth.empty()) rn.truth = truth;
      if (!baseline.empty()) rn.baseline = baseline;
      if (!guided.empty()) rn.guided = guided;
      cmd_render(rn);
    }
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "usage error: %s\n", err.what());
    return kUsage;
  } catch (const NumericError& err) {
    std::fprintf(stderr, "numeric failure: %s\n", err.what());
    return kNumeric;
  } catch (const Error& err) {
    std::fprintf(stderr, "data error: %s\n", err.what());
    return kData;
  } catch (const std::filesystem::filesystem_error& err) {
    std::fprintf(stderr, "data error: %s\n", err.what());
    return kData;
  }
  return kSuccess;
}
