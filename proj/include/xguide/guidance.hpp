#pragma once

#include <string_view>

#include "xguide/mask.hpp"

namespace xguide {

struct TemplateSpec {
  bool flip = true;
  int radius = 7;  // radius-7 disc spans a 15x15 window
};

// Occurrence template from one lesion annotation:
// dilate(annotation | hflip(annotation), radius), the flip optional.
// Throws DataError for an empty annotation.
BinaryMask build_template(const BinaryMask& annotation, const TemplateSpec& spec = {});

// Pixels whose max-normalized importance reaches `cutoff` (0 < cutoff <= 1).
BinaryMask extract_focus(const ImportanceMap& importance, double cutoff);

enum class GuideMode {
  intersect,    // extract_focus(E) restricted to the template
  renormalize,  // extract_focus(T * E): threshold after masking
};
std::string_view guide_mode_name(GuideMode m);
GuideMode parse_guide_mode(std::string_view name);

// Element-wise product T * E.
ImportanceMap mask_importance(const ImportanceMap& importance, const BinaryMask& templ);

// Template-guided focus region.
BinaryMask guide(const ImportanceMap& importance, const BinaryMask& templ, double cutoff,
                 GuideMode mode = GuideMode::intersect);

}  // namespace xguide
