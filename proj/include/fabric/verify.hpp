#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "fabric/defect.hpp"
#include "fabric/density.hpp"
#include "fabric/metrics.hpp"
#include "fabric/reference.hpp"
#include "fabric/synthgen.hpp"
#include "fabric/weave.hpp"

namespace fabric::verify {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Synthetic fixtures
// ---------------------------------------------------------------------------

inline constexpr double kFixtureScale = 0.002363;  // cm/pixel

struct NamedSpec {
  std::string name;
  synthgen::SynthSpec spec;
};

/// Twelve density fixtures: two constructions per weave, each noise-free and
/// with sigma 8 pixel noise, transmitted light, 512 x 384.
inline std::vector<NamedSpec> density_fixtures() {
  struct Construction {
    const char* weave;
    double warp, weft;
  };
  const Construction cs[] = {{"plain", 20, 35}, {"plain", 45, 30}, {"twill", 37, 20},
                             {"twill", 26, 31}, {"satin", 27, 50}, {"satin", 57, 29}};
  std::vector<NamedSpec> out;
  std::uint64_t seed = 11;
  for (const auto& c : cs) {
    const std::string w = c.weave;
    const auto tile = w == "plain" ? weave::plain_tile() : w == "twill" ? weave::twill31_tile() : weave::satin5_tile();
    for (double noise : {0.0, 8.0}) {
      auto s = synthgen::make_spec(c.warp, c.weft, tile, kFixtureScale, Illumination::Transmitted);
      s.noise_sigma = noise;
      s.seed = seed++;
      out.push_back({w + "_" + std::to_string(static_cast<int>(c.warp)) + "x" + std::to_string(static_cast<int>(c.weft)) +
                         (noise > 0 ? "_noisy" : "_clean"),
                     s});
    }
  }
  return out;
}

/// Weave fixture: 18 x 20 threads/cm, yarn fill 0.45, default levels.
inline synthgen::SynthSpec weave_fixture(weave::WeaveClass cls, Illumination mode) {
  return synthgen::make_spec(18, 20, weave::canonical_tile(cls), kFixtureScale, mode);
}

/// Extreme warp/weft contrast (dark warp 20, bright weft 235), reflected light.
inline synthgen::SynthSpec denim_fixture() {
  auto s = synthgen::make_spec(18, 20, weave::twill31_tile(), kFixtureScale, Illumination::Reflected);
  s.levels = {20, 235, 5};
  return s;
}

/// Dense, evenly coloured cloth for defect tests (transmitted light).
inline synthgen::SynthSpec defect_fixture() {
  auto s = synthgen::make_spec(40, 40, weave::plain_tile(), kFixtureScale, Illumination::Transmitted, 0.9);
  s.levels = {60, 75, 230};
  s.noise_sigma = 8.0;
  s.seed = 5;
  return s;
}

/// 44 x 45 hole, 1.007 % of a 512 x 384 image.
inline constexpr Rect kHoleRegion{200, 150, 44, 45};

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

struct Check {
  std::string group;
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

inline Check numeric(std::string group, std::string name, double measured, double expected, double tol) {
  Check c{std::move(group), std::move(name), measured, expected, tol, std::abs(measured - expected) <= tol, {}};
  return c;
}

inline void counting_checks(std::vector<Check>& out) {
  const auto& ex = reference::kCountingExample;
  const auto c = density::count_yarns(reference::counting_example_line());
  out.push_back(numeric("counting_example", "yarns", c.yarn_count, ex.yarns, 0));
  out.push_back(numeric("counting_example", "start_px", c.start_px, ex.start_px, 0));
  out.push_back(numeric("counting_example", "end_px", c.end_px, ex.end_px, 0));
  out.push_back(numeric("counting_example", "threads_per_cm", density::density_from_count(c, ex.scale), ex.density, 0.05));
}

inline void error_table_checks(std::vector<Check>& out) {
  for (const auto& row : reference::kDensityComparisons) {
    const std::string s(row.sample);
    out.push_back(numeric("error_table", s + "_warp_pct",
                          density::measurement_error(row.warp_automatic, row.warp_manual), row.warp_error_pct, 0.01));
    out.push_back(numeric("error_table", s + "_weft_pct",
                          density::measurement_error(row.weft_automatic, row.weft_manual), row.weft_error_pct, 0.01));
  }
}

inline void synthetic_density_checks(std::vector<Check>& out) {
  for (const auto& f : density_fixtures()) {
    const GrayImage img = synthgen::render_fabric(f.spec);
    for (YarnAxis axis : {YarnAxis::Warp, YarnAxis::Weft}) {
      const double truth = axis == YarnAxis::Warp ? f.spec.warp_density : f.spec.weft_density;
      Check c{"synthetic_density", f.name + "_" + std::string(to_string(axis)), 0.0, truth, 0.02 * truth, false, {}};
      try {
        c.measured = density::measure_density(img, axis).mean_density;
        c.pass = std::abs(c.measured - truth) <= c.tolerance;
      } catch (const Error& e) {
        c.detail = e.what();
      }
      out.push_back(c);
    }
  }
}

inline void weave_checks(std::vector<Check>& out) {
  using weave::WeaveClass;
  for (WeaveClass cls : {WeaveClass::Plain11, WeaveClass::Twill31, WeaveClass::Satin5}) {
    for (Illumination mode : {Illumination::Reflected, Illumination::Transmitted}) {
      Check c{"weave", std::string(weave::to_string(cls)) + "_" + std::string(to_string(mode)), 0, 1, 0, false, {}};
      try {
        weave::WeaveOptions opts;
        opts.illumination = mode;
        const auto a = weave::analyze_weave(synthgen::render_fabric(weave_fixture(cls, mode)), opts);
        c.measured = a.match.weave == cls ? 1 : 0;
        c.pass = a.match.weave == cls;
        c.detail = std::string(weave::to_string(a.match.weave));
      } catch (const Error& e) {
        c.detail = e.what();
      }
      out.push_back(c);
    }
  }
  Check d{"weave", "extreme_contrast_fails", 0, 1, 0, false, {}};
  try {
    const auto a = weave::analyze_weave(synthgen::render_fabric(denim_fixture()));
    d.detail = "recognized " + std::string(weave::to_string(a.match.weave));
  } catch (const Error& e) {
    d.pass = e.code() == ErrorCode::DecompositionFailed;
    d.measured = d.pass ? 1 : 0;
    d.detail = std::string(to_string(e.code()));
  }
  out.push_back(d);
}

inline void metrics_checks(std::vector<Check>& out) {
  const auto& g = reference::kYarnGeometry[0];
  out.push_back(numeric("metrics", "sample1_warp_cover_fraction",
                        metrics::fractional_cover(g.warp_diameter_mm, g.warp_spacing_mm).value, 0.5576, 1e-4));
}

inline void defect_checks(std::vector<Check>& out) {
  const auto spec = defect_fixture();
  const auto base = synthgen::render_fabric(spec);
  const auto injected = synthgen::inject_defect(spec, base, synthgen::DefectKind::Hole, kHoleRegion);
  const auto regions = defect::segment_defects(injected.image);
  const auto rep = defect::defect_report(regions, base.width(), base.height(), 9);
  out.push_back(numeric("defect", "hole_percent", rep.percent_defective, 1.0, 0.2));
  const double cx = kHoleRegion.x + (kHoleRegion.width - 1) / 2.0;
  const double cy = kHoleRegion.y + (kHoleRegion.height - 1) / 2.0;
  double best = 1e9;
  for (const auto& r : regions) best = std::min(best, std::hypot(r.centroid_x - cx, r.centroid_y - cy));
  out.push_back(numeric("defect", "hole_centroid_offset_px", best, 0.0, 2.0));
  const auto none = defect::segment_defects(GrayImage(128, 128, 120));
  out.push_back(numeric("defect", "constant_image_regions", static_cast<double>(none.size()), 0.0, 0.0));
}

inline std::vector<Check> run_checks() {
  std::vector<Check> out;
  counting_checks(out);
  error_table_checks(out);
  metrics_checks(out);
  synthetic_density_checks(out);
  weave_checks(out);
  defect_checks(out);
  return out;
}

inline json to_json(const std::vector<Check>& checks) {
  json list = json::array();
  int passed = 0;
  for (const auto& c : checks) {
    passed += c.pass ? 1 : 0;
    json j{{"group", c.group}, {"name", c.name}, {"measured", c.measured}, {"expected", c.expected},
           {"tolerance", c.tolerance}, {"pass", c.pass}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    list.push_back(j);
  }
  return {{"checks", list},
          {"passed", passed},
          {"failed", static_cast<int>(checks.size()) - passed},
          {"all_passed", passed == static_cast<int>(checks.size())}};
}

}  // namespace fabric::verify
