#include "xguide/cli/commands.hpp"

#include <omp.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "xguide/checkpoint.hpp"
#include "xguide/cli/run_meta.hpp"
#include "xguide/error.hpp"
#include "xguide/importance_io.hpp"
#include "xguide/metrics.hpp"
#include "xguide/netpbm.hpp"

namespace xguide::cli {

namespace {

void require_file(const fs::path& p, const char* role) {
  if (!fs::is_regular_file(p)) throw DataError(std::string(role) + " not found: " + p.string());
}

void prepare_out(const fs::path& out) {
  if (out.empty()) throw ConfigError("output directory not set");
  fs::create_directories(out);
}

std::ofstream open_csv(const fs::path& p, const char* header) {
  std::ofstream f(p, std::ios::trunc);
  if (!f) throw DataError("cannot write " + p.string());
  f << header << '\n';
  return f;
}

std::string rel(const fs::path& p, const fs::path& base) {
  return fs::absolute(p).lexically_relative(fs::absolute(base)).generic_string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string join_paths(const std::vector<fs::path>& ps) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? ";" : "") + ps[i].generic_string();
  return s;
}

void set_model_meta(RunMeta& meta, const ModelConfig& cfg) {
  std::string blocks;
  for (std::size_t i = 0; i < cfg.blocks.size(); ++i) blocks += (i ? "," : "") + std::to_string(cfg.blocks[i].filters);
  meta.set("model.blocks", blocks);
  meta.set("model.head", cfg.head == HeadKind::global_average_pool ? "gap" : "flatten");
  meta.set("model.input", shape_string(cfg.input_shape()));
}

}  // namespace

// ---------------------------------------------------------------------------

void cmd_generate_synthetic(const GenerateArgs& args) {
  args.spec.validate();
  prepare_out(args.out);
  const GeneratedCorpus corpus = generate_phantoms(args.spec, args.out);
  const PhantomSpec& s = args.spec;
  RunMeta meta("generate-synthetic");
  meta.set("out", args.out);
  meta.set("size", std::uint64_t{s.size});
  meta.set("count", std::uint64_t{s.count});
  meta.set("positive_rate", s.positive_rate);
  meta.set("off_template_rate", s.off_template_rate);
  meta.set("noise", s.noise);
  meta.set("lung_shift", s.lung_shift);
  meta.set("lung_scale", s.lung_scale);
  meta.set("band_width", s.band_width);
  meta.set("min_thickness", s.min_thickness);
  meta.set("max_thickness", s.max_thickness);
  meta.set("min_half_span", s.min_half_span);
  meta.set("max_half_span", s.max_half_span);
  meta.set("distractor_rate", s.distractor_rate);
  meta.set("distractor_rate_positive",
           s.distractor_rate_positive ? format_double(*s.distractor_rate_positive) : std::string("same"));
  meta.set("lesion_level", s.lesion_level);
  meta.set("pleural_line_level", s.pleural_line_level);
  meta.set("seed", s.seed);
  meta.set("positives", std::uint64_t{corpus.positives});
  meta.set("off_template_lesions", std::uint64_t{corpus.off_template});
  meta.write(args.out / "run.meta");
}

void cmd_split(const SplitArgs& args) {
  require_file(args.manifest, "manifest");
  const Manifest m = read_manifest(args.manifest);
  prepare_out(args.out);
  const DatasetSplit s = split(m, args.ratios, args.seed);
  write_manifest(args.out / "train.csv", s.train);
  write_manifest(args.out / "val.csv", s.val);
  write_manifest(args.out / "test.csv", s.test);
  RunMeta meta("split");
  meta.set("manifest", args.manifest);
  meta.set("out", args.out);
  meta.set("ratio.train", args.ratios.train);
  meta.set("ratio.val", args.ratios.val);
  meta.set("ratio.test", args.ratios.test);
  meta.set("seed", args.seed);
  meta.set("train.size", std::uint64_t{s.train.size()});
  meta.set("val.size", std::uint64_t{s.val.size()});
  meta.set("test.size", std::uint64_t{s.test.size()});
  meta.write(args.out / "run.meta");
}

TrainResult cmd_train(const TrainArgs& args) {
  require_file(args.train, "training manifest");
  require_file(args.val, "validation manifest");
  args.train_config.validate();
  const Manifest train_m = read_manifest(args.train);
  const Manifest val_m = read_manifest(args.val);
  std::set<fs::path> seen;
  for (const auto& e : train_m.entries) seen.insert(fs::weakly_canonical(e.image));
  for (const auto& e : val_m.entries)
    if (seen.count(fs::weakly_canonical(e.image)))
      throw DataError("training and validation manifests share image " + e.image.string());
  for (const auto* m : {&train_m, &val_m})
    for (const auto& e : m->entries) require_file(e.image, "image");

  const Dataset train_set = load_dataset(train_m);
  const Dataset val_set = load_dataset(val_m);
  if (train_set.size() == 0) throw DataError("training manifest is empty");
  ModelConfig cfg = args.model;
  cfg.channels = train_set.images.front().dim(0);
  cfg.height = train_set.images.front().dim(1);
  cfg.width = train_set.images.front().dim(2);
  cfg.validate();

  prepare_out(args.out);
  TrainResult result = train(train_set, val_set, cfg, args.train_config);
  save_checkpoint(args.out / "model.xgd", result.model);
  const Tensor ref = mean_image(train_set.images);
  write_importance(args.out / "reference.xim", ImportanceMap(cfg.width, cfg.height, ref.storage()));

  auto hist = open_csv(args.out / "loss_history.csv", "epoch,train_loss,val_loss,improved");
  for (const auto& r : result.history)
    hist << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.val_loss) << ','
         << (r.improved ? 1 : 0) << '\n';

  const TrainConfig& t = args.train_config;
  RunMeta meta("train");
  meta.set("train", args.train);
  meta.set("val", args.val);
  meta.set("out", args.out);
  set_model_meta(meta, cfg);
  meta.set("learning_rate", t.learning_rate);
  meta.set("momentum", t.momentum);
  meta.set("batch_size", std::uint64_t{t.batch_size});
  meta.set("max_epochs", std::uint64_t{t.max_epochs});
  meta.set("patience", std::uint64_t{t.patience});
  meta.set("pos_weight", t.pos_weight ? format_double(*t.pos_weight) : std::string("auto"));
  meta.set("pos_weight.resolved", result.pos_weight);
  meta.set("weighted_validation", t.weighted_validation);
  meta.set("input_scaling", std::string(input_scaling_name(t.input_scaling)));
  meta.set("input_scale", static_cast<double>(result.model.normalization().scale));
  meta.set("seed", t.seed);
  meta.set("best_epoch", std::uint64_t{result.best_epoch});
  meta.set("epochs_run", std::uint64_t{result.history.size()});
  meta.write(args.out / "run.meta");
  return result;
}

void cmd_make_template(const TemplateArgs& args) {
  require_file(args.annotation, "annotation");
  if (args.spec.radius < 0) throw ConfigError("--radius must be >= 0");
  if (args.name.empty()) throw ConfigError("--name must not be empty");
  const BinaryMask a = read_mask(args.annotation);
  const BinaryMask t = build_template(a, args.spec);
  prepare_out(args.out);
  write_mask(args.out / (args.name + ".pbm"), t);
  RunMeta meta("make-template");
  meta.set("annotation", args.annotation);
  meta.set("out", args.out);
  meta.set("name", args.name);
  meta.set("flip", args.spec.flip);
  meta.set("radius", std::uint64_t(args.spec.radius));
  meta.set("annotation_pixels", std::uint64_t{a.popcount()});
  meta.set("template_pixels", std::uint64_t{t.popcount()});
  meta.write(args.out / (args.name + ".run.meta"));
}

// ---------------------------------------------------------------------------

void cmd_explain(const ExplainArgs& args) {
  require_file(args.model, "model checkpoint");
  require_file(args.manifest, "manifest");
  const bool needs_reference = std::find(args.methods.begin(), args.methods.end(),
                                         XaiMethod::integrated_gradients) != args.methods.end();
  if (needs_reference) require_file(args.reference, "reference image");
  if (args.methods.empty()) throw ConfigError("no XAI methods selected");
  if (!(args.cutoff > 0.0 && args.cutoff <= 1.0)) throw ConfigError("--vstar must lie in (0, 1]");
  if (args.xai.ig_steps == 0) throw ConfigError("--steps must be >= 1");

  const Model model = load_checkpoint(args.model);
  const ModelConfig& cfg = model.config();
  Tensor reference(cfg.input_shape());
  if (needs_reference) {
    const ImportanceMap r = read_importance(args.reference);
    if (cfg.channels != 1 || r.width() != cfg.width || r.height() != cfg.height)
      throw ShapeError("reference image " + args.reference.string() + " does not match model input " +
                       shape_string(cfg.input_shape()));
    reference = Tensor(cfg.input_shape(), r.values());
  }

  struct NamedTemplate {
    std::string name;
    BinaryMask mask;
  };
  std::vector<NamedTemplate> templates;
  std::set<std::string> names;
  for (const auto& p : args.templates) {
    require_file(p, "template");
    NamedTemplate t{p.stem().string(), read_mask(p)};
    if (!names.insert(t.name).second) throw ConfigError("duplicate template name '" + t.name + "'");
    require_same_grid(t.mask.width(), t.mask.height(), cfg.width, cfg.height, t.name.c_str());
    templates.push_back(std::move(t));
  }

  const Manifest manifest = read_manifest(args.manifest);
  std::vector<const ManifestEntry*> samples;
  for (const auto& e : manifest.entries) {
    if (e.label != 1 && !args.include_negatives) continue;
    require_file(e.image, "image");
    if (e.mask) require_file(*e.mask, "mask");
    samples.push_back(&e);
  }

  prepare_out(args.out);
  for (XaiMethod m : args.methods) fs::create_directories(args.out / std::string(method_name(m)));

  // Rows per sample, collected in manifest order once all workers finish.
  std::vector<std::vector<std::string>> rows(samples.size());
  std::vector<std::string> errors(samples.size());
  if (args.threads > 0) omp_set_num_threads(static_cast<int>(args.threads));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(samples.size()); ++si) {
    const ManifestEntry& e = *samples[static_cast<std::size_t>(si)];
    try {
      const Tensor image = read_image(e.image);
      for (XaiMethod m : args.methods) {
        const fs::path dir = args.out / std::string(method_name(m));
        const ImportanceMap imp = explain(m, model, image, reference, args.xai);
        const fs::path xim = dir / (e.id + ".xim");
        const fs::path baseline = dir / (e.id + "_baseline.pbm");
        write_importance(xim, imp);
        write_pgm(dir / (e.id + ".pgm"), importance_to_pgm(imp));
        write_mask(baseline, extract_focus(imp, args.cutoff));
        const std::string prefix = e.id + ',' + std::to_string(e.label) + ',' + std::string(method_name(m)) + ',';
        const std::string mask = e.mask ? rel(*e.mask, args.out) : "";
        const std::string image_rel = rel(e.image, args.out);
        if (templates.empty()) {
          rows[si].push_back(prefix + ',' + image_rel + ',' + rel(xim, args.out) + ',' + rel(baseline, args.out) + ",," + mask);
        }
        for (const auto& t : templates) {
          const fs::path guided = dir / (e.id + "_guided_" + t.name + ".pbm");
          write_mask(guided, guide(imp, t.mask, args.cutoff, args.mode));
          rows[si].push_back(prefix + t.name + ',' + image_rel + ',' + rel(xim, args.out) + ',' +
                             rel(baseline, args.out) + ',' + rel(guided, args.out) + ',' + mask);
        }
      }
    } catch (const std::exception& ex) {
      errors[si] = e.image.string() + ": " + ex.what();
    }
  }
  for (const auto& err : errors)
    if (!err.empty()) throw DataError(err);

  auto index = open_csv(args.out / "explanations.csv", "sample_id,label,method,template,image,importance,baseline,guided,mask");
  for (const auto& per_sample : rows)
    for (const auto& r : per_sample) index << r << '\n';

  RunMeta meta("explain");
  meta.set("model", args.model);
  meta.set("reference", args.reference);
  meta.set("manifest", args.manifest);
  meta.set("out", args.out);
  std::string methods;
  for (std::size_t i = 0; i < args.methods.size(); ++i) methods += (i ? "," : "") + std::string(method_name(args.methods[i]));
  meta.set("methods", methods);
  meta.set("steps", std::uint64_t{args.xai.ig_steps});
  meta.set("gradient_target", args.xai.target == GradientTarget::logit ? "logit" : "probability");
  meta.set("vstar", args.cutoff);
  meta.set("templates", join_paths(args.templates));
  meta.set("guide_mode", std::string(guide_mode_name(args.mode)));
  meta.set("include_negatives", args.include_negatives);
  meta.set("threads", std::uint64_t{args.threads});
  meta.set("samples", std::uint64_t{samples.size()});
  meta.write(args.out / "run.meta");
}

// ---------------------------------------------------------------------------

namespace {

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

}  // namespace

void cmd_evaluate_classifier(const EvaluateClassifierArgs& args) {
  require_file(args.model, "model checkpoint");
  require_file(args.val, "validation manifest");
  require_file(args.test, "test manifest");
  if (args.bootstrap.resamples == 0) throw ConfigError("--bootstrap must be >= 1");
  const Model model = load_checkpoint(args.model);
  const Manifest val_m = read_manifest(args.val);
  const Manifest test_m = read_manifest(args.test);
  for (const auto* m : {&val_m, &test_m})
    for (const auto& e : m->entries) require_file(e.image, "image");

  auto scored = [&](const Manifest& m) {
    const Dataset d = load_dataset(m);
    const auto p = predict_proba(model, d.images);
    std::vector<ScoredSample> s;
    for (std::size_t i = 0; i < p.size(); ++i) s.push_back({p[i], d.labels[i]});
    return s;
  };
  const auto val = scored(val_m);
  const auto test = scored(test_m);
  const CutoffChoice cut = select_cutoff(val);

  prepare_out(args.out);
  {
    auto f = open_csv(args.out / "predictions.csv", "sample_id,label,probability");
    for (std::size_t i = 0; i < test.size(); ++i)
      f << test_m.entries[i].id << ',' << test[i].label << ',' << format_double(test[i].probability) << '\n';
  }
  {
    auto f = open_csv(args.out / "roc.csv", "threshold,fpr,tpr");
    for (const auto& p : roc_curve(test))
      f << format_double(p.threshold) << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
  }
  {
    auto f = open_csv(args.out / "pr.csv", "threshold,recall,precision");
    for (const auto& p : pr_curve(test))
      f << format_double(p.threshold) << ',' << format_double(p.recall) << ',' << format_double(p.precision) << '\n';
  }

  using Metric = std::optional<double> (*)(std::span<const ScoredSample>, double);
  struct Row {
    const char* name;
    Metric fn;
  };
  const Row rows[] = {
      {"auroc", [](std::span<const ScoredSample> s, double) -> std::optional<double> {
         std::size_t pos = 0;
         for (const auto& x : s) pos += x.label == 1;
         if (pos == 0 || pos == s.size()) return std::nullopt;
         return auroc(s);
       }},
      {"auprc", [](std::span<const ScoredSample> s, double) -> std::optional<double> {
         std::size_t pos = 0;
         for (const auto& x : s) pos += x.label == 1;
         if (pos == 0 || pos == s.size()) return std::nullopt;
         return auprc(s);
       }},
      {"accuracy", [](std::span<const ScoredSample> s, double c) { return classification_metrics(s, c).accuracy; }},
      {"sensitivity", [](std::span<const ScoredSample> s, double c) { return classification_metrics(s, c).sensitivity; }},
      {"specificity", [](std::span<const ScoredSample> s, double c) { return classification_metrics(s, c).specificity; }},
      {"ppv", [](std::span<const ScoredSample> s, double c) { return classification_metrics(s, c).ppv; }},
      {"npv", [](std::span<const ScoredSample> s, double c) { return classification_metrics(s, c).npv; }},
  };

  auto f = open_csv(args.out / "classification.csv", "metric,value,se,B,seed");
  f << "cutoff," << format_double(cut.cutoff) << ",," << args.bootstrap.resamples << ',' << args.bootstrap.seed << '\n';
  for (const Row& r : rows) {
    const auto full = r.fn(test, cut.cutoff);
    std::string se;
    if (full) {
      const Metric fn = r.fn;
      const double c = cut.cutoff;
      const auto res = bootstrap(
          test.size(),
          [&test, fn, c](std::span<const std::size_t> idx) {
            std::vector<ScoredSample> s;
            s.reserve(idx.size());
            for (std::size_t i : idx) s.push_back(test[i]);
            return fn(s, c);
          },
          args.bootstrap);
      se = format_double(res.se);
    }
    f << r.name << ',' << opt_str(full) << ',' << se << ',' << args.bootstrap.resamples << ',' << args.bootstrap.seed
      << '\n';
  }

  RunMeta meta("evaluate-classifier");
  meta.set("model", args.model);
  meta.set("val", args.val);
  meta.set("test", args.test);
  meta.set("out", args.out);
  meta.set("bootstrap", std::uint64_t{args.bootstrap.resamples});
  meta.set("seed", args.bootstrap.seed);
  meta.set("cutoff", cut.cutoff);
  meta.write(args.out / "run.meta");
}

// ---------------------------------------------------------------------------

void cmd_evaluate_explanations(const EvaluateExplanationsArgs& args) {
  require_file(args.index, "explanation index");
  if (args.bootstrap.resamples == 0) throw ConfigError("--bootstrap must be >= 1");
  const fs::path base = args.index.parent_path();
  std::ifstream in(args.index);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "sample_id,label,method,template,image,importance,baseline,guided,mask")
    throw DataError(args.index.string() + ": line 1: unexpected header '" + line + "'");

  // Groups in first-seen order: (method, "none" | template name).
  std::vector<std::pair<std::string, std::string>> groups;
  std::map<std::pair<std::string, std::string>, std::vector<FocusSample>> samples;
  std::set<std::pair<std::string, std::string>> baseline_seen;
  std::map<fs::path, BinaryMask> mask_cache;
  auto load = [&](const std::string& relpath) -> const BinaryMask& {
    const fs::path p = base / relpath;
    auto it = mask_cache.find(p);
    if (it == mask_cache.end()) it = mask_cache.emplace(p, read_mask(p)).first;
    return it->second;
  };
  auto add = [&](const std::pair<std::string, std::string>& key, FocusSample s) {
    if (!samples.count(key)) groups.push_back(key);
    samples[key].push_back(std::move(s));
  };

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    const std::string at = args.index.string() + ": line " + std::to_string(lineno);
    if (f.size() != 9) throw DataError(at + ": expected 9 fields, got " + std::to_string(f.size()));
    if (f[1] != "0" && f[1] != "1") throw DataError(at + ": field 'label' must be 0 or 1");
    const int label = f[1] == "1" ? 1 : 0;
    std::optional<BinaryMask> annotation;
    if (!f[8].empty()) annotation = load(f[8]);
    if (baseline_seen.insert({f[0], f[2]}).second)
      add({f[2], "none"}, FocusSample{f[0], label, load(f[6]), annotation});
    if (!f[3].empty()) {
      if (f[7].empty()) throw DataError(at + ": field 'guided' is empty for template " + f[3]);
      add({f[2], f[3]}, FocusSample{f[0], label, load(f[7]), annotation});
    }
  }

  prepare_out(args.out);
  auto report = open_csv(args.out / "report.csv", "sample_id,method,guided,iou,dsc");
  auto agg = open_csv(args.out / "aggregate.csv", "method,guided,metric,mean,se,B,seed");
  std::size_t skipped = 0;
  for (const auto& key : groups) {
    const EvalReport r = explanation_quality(samples[key], args.bootstrap);
    skipped += r.skipped;
    for (const auto& row : r.rows)
      report << row.sample_id << ',' << key.first << ',' << key.second << ',' << format_double(row.iou) << ','
             << format_double(row.dsc) << '\n';
    for (const auto& [metric, res] : {std::pair{"iou", r.iou}, std::pair{"dsc", r.dsc}})
      agg << key.first << ',' << key.second << ',' << metric << ',' << format_double(res.estimate) << ','
          << format_double(res.se) << ',' << res.resamples << ',' << res.seed << '\n';
  }
  if (skipped > 0)
    std::fprintf(stderr, "warning: %zu positive sample rows without annotation were skipped\n", skipped);

  RunMeta meta("evaluate-explanations");
  meta.set("index", args.index);
  meta.set("out", args.out);
  meta.set("bootstrap", std::uint64_t{args.bootstrap.resamples});
  meta.set("seed", args.bootstrap.seed);
  meta.set("skipped", std::uint64_t{skipped});
  meta.write(args.out / "run.meta");
}

// ---------------------------------------------------------------------------

RgbImage compose_overlay(const Tensor& image, const BinaryMask* truth, const BinaryMask* baseline,
                         const BinaryMask* guided) {
  const GrayImage gray = from_tensor(image, 255);
  for (const BinaryMask* m : {truth, baseline, guided})
    if (m) require_same_grid(m->width(), m->height(), gray.width, gray.height, "overlay");
  RgbImage out{gray.width, gray.height, std::vector<std::uint8_t>(3 * gray.pixels.size())};
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
    const auto g = static_cast<std::uint8_t>(gray.pixels[i]);
    out.pixels[3 * i + 0] = baseline && (*baseline)[i] ? 255 : g;
    out.pixels[3 * i + 1] = truth && (*truth)[i] ? 255 : g;
    out.pixels[3 * i + 2] = guided && (*guided)[i] ? 255 : g;
  }
  return out;
}

void cmd_render(const RenderArgs& args) {
  RunMeta meta("render");
  meta.set("out", args.out);
  if (args.index) {
    require_file(*args.index, "explanation index");
    const fs::path base = args.index->parent_path();
    std::ifstream in(*args.index);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line))
      if (!line.empty()) {
        auto f = split_csv_line(line);
        if (f.size() != 9) throw DataError(args.index->string() + ": malformed row '" + line + "'");
        rows.push_back(std::move(f));
      }
    prepare_out(args.out);
    for (const auto& f : rows) {
      const Tensor image = read_image(base / f[4]);
      std::optional<BinaryMask> truth, baseline = read_mask(base / f[6]), guided;
      if (!f[8].empty()) truth = read_mask(base / f[8]);
      if (!f[7].empty()) guided = read_mask(base / f[7]);
      const std::string name = f[0] + "_" + f[2] + (f[3].empty() ? "" : "_" + f[3]) + ".ppm";
      write_ppm(args.out / name,
                compose_overlay(image, truth ? &*truth : nullptr, &*baseline, guided ? &*guided : nullptr));
    }
    meta.set("index", *args.index);
    meta.set("overlays", std::uint64_t{rows.size()});
  } else {
    require_file(args.image, "image");
    for (const auto* p : {&args.truth, &args.baseline, &args.guided})
      if (*p) require_file(**p, "mask");
    const Tensor image = read_image(args.image);
    auto opt_mask = [](const std::optional<fs::path>& p) -> std::optional<BinaryMask> {
      if (!p) return std::nullopt;
      return read_mask(*p);
    };
    const auto truth = opt_mask(args.truth), baseline = opt_mask(args.baseline), guided = opt_mask(args.guided);
    prepare_out(args.out);
    write_ppm(args.out / (args.name + ".ppm"),
              compose_overlay(image, truth ? &*truth : nullptr, baseline ? &*baseline : nullptr,
                              guided ? &*guided : nullptr));
    meta.set("image", args.image);
    meta.set("truth", args.truth ? args.truth->generic_string() : "");
    meta.set("baseline", args.baseline ? args.baseline->generic_string() : "");
    meta.set("guided", args.guided ? args.guided->generic_string() : "");
    meta.set("name", args.name);
  }
  meta.write(args.out / (args.index ? std::string("run.meta") : args.name + ".run.meta"));
}

}  // namespace xguide::cli
