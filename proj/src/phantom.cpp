#include "xguide/phantom.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "xguide/error.hpp"
#include "xguide/netpbm.hpp"
#include "xguide/rng.hpp"

namespace xguide {

namespace fs = std::filesystem;

namespace {

struct Lung {
  double cx, cy, rx, ry;
  bool image_left;
};

struct Lesion {
  const Lung* lung;
  double center_deg;
  double half_span_deg;
  double thickness;
};

Lung nominal_lung(std::size_t size, bool image_left) {
  const double s = static_cast<double>(size);
  return {image_left ? 0.285 * s : 0.715 * s, 0.53 * s, 0.17 * s, 0.33 * s, image_left};
}

// Polar description of a pixel centre relative to a lung ellipse.
struct LungCoord {
  double rho;       // normalized elliptical radius, 1 on the boundary
  double depth;     // distance inward from the boundary along the ray, px
  double angle;     // degrees; 0 lateral, -90 apex, +90 base, +-180 medial
};

LungCoord lung_coord(const Lung& l, double px, double py) {
  const double dx = px - l.cx, dy = py - l.cy;
  const double u = dx / l.rx, v = dy / l.ry;
  const double rho = std::sqrt(u * u + v * v);
  const double dist = std::sqrt(dx * dx + dy * dy);
  const double depth = rho > 0.0 ? (1.0 - rho) * dist / rho : std::min(l.rx, l.ry);
  const double lateral = l.image_left ? -u : u;
  return {rho, depth, std::atan2(v, lateral) * 180.0 / std::numbers::pi};
}

double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

bool in_lesion(const Lesion& les, const LungCoord& c) {
  return c.rho <= 1.0 && c.depth <= les.thickness && angle_gap(c.angle, les.center_deg) <= les.half_span_deg;
}

BinaryMask rasterize(const Lesion& les, std::size_t size) {
  BinaryMask m(size, size);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x)
      if (in_lesion(les, lung_coord(*les.lung, x + 0.5, y + 0.5))) m.set(x, y);
  return m;
}

double scale_of(const PhantomSpec& s) { return static_cast<double>(s.size) / 64.0; }

}  // namespace

void PhantomSpec::validate() const {
  if (size < 16) throw ConfigError("phantom size must be at least 16");
  if (count == 0) throw ConfigError("phantom count must be positive");
  if (positive_rate < 0.0 || positive_rate > 1.0) throw ConfigError("positive_rate must lie in [0, 1]");
  if (off_template_rate < 0.0 || off_template_rate > 1.0) throw ConfigError("off_template_rate must lie in [0, 1]");
  if (distractor_rate < 0.0 || distractor_rate > 1.0) throw ConfigError("distractor_rate must lie in [0, 1]");
  if (distractor_rate_positive && (*distractor_rate_positive < 0.0 || *distractor_rate_positive > 1.0))
    throw ConfigError("distractor_rate_positive must lie in [0, 1]");
  if (noise < 0.0) throw ConfigError("noise must be >= 0");
  if (lesion_level < 0.0 || lesion_level > 1.0 || pleural_line_level < 0.0 || pleural_line_level > 1.0)
    throw ConfigError("lesion and pleural line levels must lie in [0, 1]");
  if (!(min_thickness > 0.0) || max_thickness < min_thickness)
    throw ConfigError("lesion thickness range is empty or non-positive");
  if (max_thickness > band_width)
    throw ConfigError("lesion thickness " + std::to_string(max_thickness) + " exceeds the boundary band width " +
                      std::to_string(band_width));
  const double min_radius = 0.17 * 64.0 * (1.0 - lung_scale);
  if (band_width >= min_radius) throw ConfigError("boundary band is wider than the lung field");
  if (!(min_half_span > 0.0) || max_half_span < min_half_span || max_half_span > 90.0)
    throw ConfigError("lesion angular span must satisfy 0 < min <= max <= 90 degrees");
}

Phantom make_phantom(const PhantomSpec& spec, std::size_t index) {
  spec.validate();
  Rng rng = Rng::substream(spec.seed, index);
  const std::size_t S = spec.size;
  const double k = scale_of(spec);

  Lung lungs[2] = {nominal_lung(S, true), nominal_lung(S, false)};
  for (Lung& l : lungs) {
    l.cx += rng.uniform(-spec.lung_shift, spec.lung_shift) * k;
    l.cy += rng.uniform(-spec.lung_shift, spec.lung_shift) * k;
    const double sc = 1.0 + rng.uniform(-spec.lung_scale, spec.lung_scale);
    l.rx *= sc;
    l.ry *= sc;
  }

  Phantom ph;
  ph.label = rng.bernoulli(spec.positive_rate) ? 1 : 0;
  ph.mask = BinaryMask(S, S);
  Lesion lesion{};
  if (ph.label == 1) {
    lesion.lung = &lungs[rng.bernoulli(0.5) ? 0 : 1];
    lesion.thickness = rng.uniform(spec.min_thickness, spec.max_thickness) * k;
    ph.off_template = rng.bernoulli(spec.off_template_rate);
    if (ph.off_template) {
      lesion.center_deg = rng.uniform(160.0, 200.0);
      lesion.half_span_deg = spec.min_half_span;
    } else {
      lesion.center_deg = rng.uniform(-95.0, 25.0);
      lesion.half_span_deg = rng.uniform(spec.min_half_span, spec.max_half_span);
    }
    ph.mask = rasterize(lesion, S);
    if (ph.mask.empty_region()) throw NumericError("phantom lesion rasterized to an empty mask");
  }

  // Lung texture: a few random plane waves.
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 4; ++i) {
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double freq = rng.uniform(0.25, 0.6) / k;
    waves.push_back({freq * std::cos(theta), freq * std::sin(theta), rng.uniform(0.0, 2.0 * std::numbers::pi),
                     rng.uniform(0.015, 0.035)});
  }
  const bool has_marker =
      rng.bernoulli(ph.label == 1 ? spec.distractor_rate_positive.value_or(spec.distractor_rate) : spec.distractor_rate);
  const double mx = rng.uniform(0.15, 0.85) * S, my = rng.uniform(0.15, 0.85) * S, mr = 1.8 * k;

  const double s = static_cast<double>(S);
  const double bcx = 0.5 * s, bcy = 0.55 * s, brx = 0.47 * s, bry = 0.47 * s;
  Tensor img({1, S, S});
  for (std::size_t y = 0; y < S; ++y) {
    for (std::size_t x = 0; x < S; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const double bu = (px - bcx) / brx, bv = (py - bcy) / bry;
      double val = 0.05;
      if (bu * bu + bv * bv <= 1.0) {
        val = 0.5 + 0.1 * (py / s);
        if (std::abs(px - bcx) < 0.06 * s) val = 0.75;
        const double hx = (px - 0.55 * s) / (0.16 * s), hy = (py - 0.72 * s) / (0.12 * s);
        if (hx * hx + hy * hy <= 1.0) val = 0.7;
      }
      for (const Lung& l : lungs) {
        const LungCoord c = lung_coord(l, px, py);
        if (c.rho > 1.0) continue;
        double tex = 0.0;
        for (const Wave& w : waves) tex += w.amp * std::sin(w.kx * px + w.ky * py + w.phase);
        val = 0.24 + tex;
        if (ph.label == 1 && lesion.lung == &l) {
          if (in_lesion(lesion, c)) {
            val = spec.lesion_level;
          } else if (angle_gap(c.angle, lesion.center_deg) <= lesion.half_span_deg && c.depth <= lesion.thickness + k) {
            val = spec.pleural_line_level;
          }
        }
      }
      if (has_marker && (px - mx) * (px - mx) + (py - my) * (py - my) <= mr * mr) val = 0.95;
      val += spec.noise * rng.normal();
      img.at(0, y, x) = static_cast<float>(val);
    }
  }
  ph.image = to_tensor(from_tensor(img, 255));
  return ph;
}

BinaryMask canonical_annotation(const PhantomSpec& spec) {
  spec.validate();
  const Lung lung = nominal_lung(spec.size, true);
  const double center = (-95.0 + 25.0) / 2.0;
  const Lesion les{&lung, center, (25.0 + 95.0) / 2.0 + spec.max_half_span, spec.max_thickness * scale_of(spec)};
  return rasterize(les, spec.size);
}

GeneratedCorpus generate_phantoms(const PhantomSpec& spec, const fs::path& out_dir) {
  spec.validate();
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "masks");
  GeneratedCorpus corpus;
  corpus.manifest.entries.resize(spec.count);
  std::vector<std::uint8_t> flags(spec.count, 0);
  bool failed = false;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(spec.count); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    char name[32];
    std::snprintf(name, sizeof name, "phantom_%04zu", i);
    try {
      const Phantom ph = make_phantom(spec, i);
      ManifestEntry e;
      e.id = name;
      e.label = ph.label;
      e.image = out_dir / "images" / (std::string(name) + ".pgm");
      write_image(e.image, ph.image);
      if (ph.label == 1) {
        e.mask = out_dir / "masks" / (std::string(name) + ".pbm");
        write_mask(*e.mask, ph.mask);
      }
      flags[i] = static_cast<std::uint8_t>((ph.label == 1 ? 1 : 0) | (ph.off_template ? 2 : 0));
      corpus.manifest.entries[i] = std::move(e);
    } catch (const Error&) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) throw DataError("phantom generation failed under " + out_dir.string());
  for (std::uint8_t f : flags) {
    corpus.positives += f & 1;
    corpus.off_template += (f & 2) ? 1 : 0;
  }
  write_mask(out_dir / "canonical.pbm", canonical_annotation(spec));
  write_manifest(out_dir / "manifest.csv", corpus.manifest);
  return corpus;
}

}  // namespace xguide
