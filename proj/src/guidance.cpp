#include "xguide/guidance.hpp"

#include <string>

#include "xguide/error.hpp"
#include "xguide/morphology.hpp"
#include "xguide/xai.hpp"

namespace xguide {

BinaryMask build_template(const BinaryMask& annotation, const TemplateSpec& spec) {
  if (spec.radius < 0) throw ConfigError("template dilation radius must be >= 0");
  if (annotation.empty_region()) throw DataError("template annotation is empty");
  const BinaryMask overlap = spec.flip ? mask_union(annotation, hflip(annotation)) : annotation;
  return dilate(overlap, spec.radius);
}

BinaryMask extract_focus(const ImportanceMap& importance, double cutoff) {
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw ConfigError("focus cutoff must lie in (0, 1]");
  const ImportanceMap norm = normalize_importance(importance);
  BinaryMask out(importance.width(), importance.height());
  if (importance.max_value() == 0.0f) return out;
  for (std::size_t i = 0; i < norm.size(); ++i) out.set_index(i, static_cast<double>(norm[i]) >= cutoff);
  return out;
}

std::string_view guide_mode_name(GuideMode m) { return m == GuideMode::intersect ? "intersect" : "renormalize"; }

GuideMode parse_guide_mode(std::string_view name) {
  if (name == "intersect") return GuideMode::intersect;
  if (name == "renormalize") return GuideMode::renormalize;
  throw ConfigError("unknown guide mode '" + std::string(name) + "' (expected intersect or renormalize)");
}

ImportanceMap mask_importance(const ImportanceMap& importance, const BinaryMask& templ) {
  require_same_grid(importance.width(), importance.height(), templ.width(), templ.height(), "template guidance");
  std::vector<float> v(importance.values());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!templ[i]) v[i] = 0.0f;
  return ImportanceMap(importance.width(), importance.height(), std::move(v));
}

BinaryMask guide(const ImportanceMap& importance, const BinaryMask& templ, double cutoff, GuideMode mode) {
  require_same_grid(importance.width(), importance.height(), templ.width(), templ.height(), "template guidance");
  if (mode == GuideMode::renormalize) return extract_focus(mask_importance(importance, templ), cutoff);
  BinaryMask region = extract_focus(importance, cutoff);
  for (std::size_t i = 0; i < region.size(); ++i)
    if (!templ[i]) region.set_index(i, false);
  return region;
}

}  // namespace xguide
