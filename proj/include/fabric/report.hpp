#pragma once

#include <string>

#include "json.hpp"

#include "fabric/defect.hpp"
#include "fabric/density.hpp"
#include "fabric/metrics.hpp"
#include "fabric/synthgen.hpp"
#include "fabric/weave.hpp"
#include "fabric/wiener.hpp"

// JSON views of the pipeline results. Keys carry their units; objects use
// sorted keys so equal inputs serialize to identical bytes.
namespace fabric::report {

using json = nlohmann::json;

inline json to_json(const density::StandardLineCount& c) {
  return {{"line_index", c.line_index}, {"yarns", c.yarn_count}, {"start_px", c.start_px}, {"end_px", c.end_px}};
}

inline json to_json(const density::DensityResult& r) {
  json lines = json::array();
  for (const auto& c : r.counts) lines.push_back(to_json(c));
  return {{"axis", std::string(to_string(r.axis))},
          {"mean_threads_per_cm", r.mean_density},
          {"per_line_threads_per_cm", r.per_line},
          {"lines", lines},
          {"lines_scanned", r.lines_scanned},
          {"lines_used", r.lines_used()},
          {"scale_cm_per_px", r.scale}};
}

inline json to_json(const wiener::YarnOutlines& o) {
  json stripes = json::array();
  for (const auto& s : o.stripes) stripes.push_back({{"start_px", s.start}, {"end_px", s.end}});
  json j{{"axis", std::string(to_string(o.axis))}, {"stripes", stripes}, {"image_extent_px", o.image_extent}};
  if (o.scale) j["scale_cm_per_px"] = *o.scale;
  return j;
}

inline json to_json(const metrics::AxisMetrics& m) {
  return {{"diameter_mm", m.diameter_mm},
          {"spacing_mm", m.spacing_mm},
          {"count_ne", m.count_ne},
          {"count_tex", m.count_tex},
          {"threads_per_inch", m.threads_per_inch},
          {"threads_per_cm", m.threads_per_inch / 2.54},
          {"cover_factor_pierce", m.cover_factor},
          {"cover_fraction", m.cover_fractional.value},
          {"cover_saturated", m.cover_fractional.saturated},
          {"yarns", m.yarns}};
}

inline json to_json(const metrics::FabricMetrics& f) {
  return {{"warp", to_json(f.warp)}, {"weft", to_json(f.weft)}, {"cover_total_fraction", f.cover_total}};
}

inline json to_json(const weave::YarnContrast& c) {
  return {{"warp_only_mean", c.warp_only}, {"weft_only_mean", c.weft_only}, {"crossing_mean", c.crossings},
          {"gap_mean", c.gaps},            {"warp_spread", c.warp_spread}, {"weft_spread", c.weft_spread}};
}

inline json to_json(const weave::WeaveAnalysis& a) {
  return {{"class", std::string(weave::to_string(a.match.weave))},
          {"confidence", a.match.confidence},
          {"orientation", a.match.orientation},
          {"inverted", a.match.inverted},
          {"repeat_tile", a.matrix.repeat.to_rows()},
          {"grid", a.matrix.grid.to_rows()},
          {"crossover_threshold", a.matrix.threshold},
          {"warp_yarns", a.warp.stripes.size()},
          {"weft_yarns", a.weft.stripes.size()},
          {"contrast", to_json(a.contrast)}};
}

inline json to_json(const defect::DefectRegion& r) {
  return {{"bbox", {{"x", r.bbox.x}, {"y", r.bbox.y}, {"width", r.bbox.width}, {"height", r.bbox.height}}},
          {"centroid_px", {r.centroid_x, r.centroid_y}},
          {"area_px", r.area},
          {"mean_intensity", r.mean_intensity},
          {"polarity", std::string(defect::to_string(r.polarity))}};
}

inline json to_json(const defect::DefectReport& r) {
  json regions = json::array();
  for (const auto& reg : r.regions) regions.push_back(to_json(reg));
  return {{"regions", regions},
          {"total_area_px", r.total_area},
          {"defect_area_px", r.defect_area},
          {"percent_defective", r.percent_defective},
          {"min_size_px", r.min_size_used}};
}

inline json to_json(const synthgen::SynthSpec& s) {
  return {{"warp_threads_per_cm", s.warp_density},
          {"weft_threads_per_cm", s.weft_density},
          {"warp_width_mm", s.warp_width_mm},
          {"weft_width_mm", s.weft_width_mm},
          {"tile", s.tile.to_rows()},
          {"scale_cm_per_px", s.scale},
          {"illumination", std::string(to_string(s.illumination))},
          {"noise_sigma", s.noise_sigma},
          {"levels", {{"warp", s.levels.warp}, {"weft", s.levels.weft}, {"gap", s.levels.gap}}},
          {"seed", s.seed},
          {"width_px", s.width},
          {"height_px", s.height},
          {"phase_px", {s.phase_x, s.phase_y}},
          {"warp_pitch_px", s.warp_pitch_px()},
          {"weft_pitch_px", s.weft_pitch_px()}};
}

}  // namespace fabric::report
