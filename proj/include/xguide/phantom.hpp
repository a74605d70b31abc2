#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "xguide/manifest.hpp"
#include "xguide/mask.hpp"
#include "xguide/tensor.hpp"

namespace xguide {

// Synthetic chest-radiograph stand-in: two elliptical lung fields inside a
// body outline, with positives carrying a lucent crescent lesion hugging the
// outer (lateral/apical) lung boundary. Lengths are in pixels at size 64 and
// scale linearly with `size`.
struct PhantomSpec {
  std::size_t size = 64;
  std::size_t count = 1000;
  double positive_rate = 0.25;
  // Share of positives whose lesion sits on the medial boundary instead.
  double off_template_rate = 0.05;
  double noise = 0.02;
  double lung_shift = 1.5;     // max translation of each lung, px
  double lung_scale = 0.05;    // max relative change of lung radii
  double band_width = 6.0;     // boundary band lesions must stay within, px
  double min_thickness = 2.5;  // lesion depth from the lung boundary, px
  double max_thickness = 5.0;
  double min_half_span = 20.0;  // lesion angular half-extent, degrees
  double max_half_span = 45.0;
  double distractor_rate = 0.5;  // chance of a bright marker blob
  // Marker chance for positives when set, so the marker can act as a
  // label-correlated shortcut; distractor_rate then applies to negatives.
  std::optional<double> distractor_rate_positive;
  double lesion_level = 0.06;        // lesion intensity (lung parenchyma is ~0.24)
  double pleural_line_level = 0.45;  // visceral pleural line next to the lesion
  std::uint64_t seed = 7;

  // Throws ConfigError for invalid rates or lesions that cannot fit the band.
  void validate() const;
};

struct Phantom {
  Tensor image;      // 1 x size x size, quantized to 8-bit levels
  int label = 0;
  BinaryMask mask;   // lesion; empty grid for negatives
  bool off_template = false;
};

// Sample `index` of the corpus; depends only on (spec, index).
Phantom make_phantom(const PhantomSpec& spec, std::size_t index);

// Largest lateral/apical lesion on the image-left lung at nominal geometry;
// the canonical annotation for template building.
BinaryMask canonical_annotation(const PhantomSpec& spec);

struct GeneratedCorpus {
  Manifest manifest;
  std::size_t positives = 0;
  std::size_t off_template = 0;
};

// Writes images/phantom_NNNN.pgm, masks/phantom_NNNN.pbm (positives only),
// canonical.pbm and manifest.csv under `out_dir`.
GeneratedCorpus generate_phantoms(const PhantomSpec& spec, const std::filesystem::path& out_dir);

}  // namespace xguide
