// Acceptance run: one PASS/FAIL line per criterion at the pinned tolerances.
// Exits non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "fabric/fabric.hpp"
#include "fabric/reference.hpp"
#include "fabric/verify.hpp"
#include "oracles.hpp"

using namespace fabric;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) note << "failed: ";
      else note << "; ";
      note << what;
      pass = false;
    }
  }
};

Outcome counting_example() {
  Outcome o;
  const auto& ex = reference::kCountingExample;
  density::StandardLineCount c{ex.yarns, ex.start_px, ex.end_px, 0};
  const double d = density::density_from_count(c, ex.scale);
  const auto scanned = density::count_yarns(reference::counting_example_line());
  const double from_line = density::density_from_count(scanned, ex.scale);
  o.require(std::abs(d - 35.3) <= 0.05, "N=42, SP=4, EP=506 off target");
  o.require(scanned.yarn_count == 42 && scanned.start_px == 4 && scanned.end_px == 506, "line scan SP/EP/N");
  o.require(std::abs(from_line - 35.3) <= 0.05, "scanned line off target");
  o.note << (o.pass ? "" : " | ") << d << " threads/cm (35.3 +/- 0.05)";
  return o;
}

Outcome error_table() {
  Outcome o;
  double worst = 0, max_err = 0;
  for (const auto& r : reference::kDensityComparisons) {
    const double w = density::measurement_error(r.warp_automatic, r.warp_manual);
    const double f = density::measurement_error(r.weft_automatic, r.weft_manual);
    worst = std::max({worst, std::abs(w - r.warp_error_pct), std::abs(f - r.weft_error_pct)});
    max_err = std::max({max_err, w, f});
    o.require(std::abs(w - r.warp_error_pct) <= 0.01, std::string(r.sample) + " warp");
    o.require(std::abs(f - r.weft_error_pct) <= 0.01, std::string(r.sample) + " weft");
  }
  o.require(std::abs(max_err - 0.98) <= 0.01, "maximum error");
  o.note << (o.pass ? "" : " | ") << "30 values, worst deviation " << worst << " pp, maximum " << max_err << "%";
  return o;
}

Outcome density_pipeline() {
  Outcome o;
  std::vector<verify::Check> checks;
  verify::synthetic_density_checks(checks);
  double worst = 0;
  for (const auto& c : checks) {
    worst = std::max(worst, std::abs(c.measured - c.expected) / c.expected);
    o.require(c.pass, c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
  }
  o.require(checks.size() == 24, "expected 12 configurations x 2 axes");
  o.note << (o.pass ? "" : " | ") << checks.size() / 2 << " configurations, worst relative error " << 100 * worst
         << "% (limit 2%)";
  return o;
}

Outcome weave_recognition() {
  Outcome o;
  std::vector<verify::Check> checks;
  verify::weave_checks(checks);
  int ok = 0;
  for (const auto& c : checks) {
    ok += c.pass;
    o.require(c.pass, c.name + " -> " + c.detail);
  }
  o.note << (o.pass ? "" : " | ") << ok - 1 << "/6 recognized, extreme contrast "
         << (checks.back().pass ? "rejected" : "accepted");
  return o;
}

Outcome threshold_oracles() {
  Outcome o;
  int otsu_ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto img = oracle::random_gray(64, 64, 1000 + seed, static_cast<int>(seed % 50),
                                         static_cast<int>(100 + seed % 156));
    otsu_ok += imgcore::otsu_threshold(img).threshold == oracle::otsu_exhaustive(img);
  }
  o.require(otsu_ok == 100, "Otsu mismatches");
  double worst = 0;
  const int windows[][2] = {{33, 33}, {9, 9}, {15, 5}, {3, 21}};
  for (int i = 0; i < 20; ++i) {
    const int w = 24 + 3 * i, h = 20 + 2 * i;
    const auto img = oracle::random_gray(w, h, 5000 + i);
    const auto [ww, wh] = windows[i % 4];
    const double k = -0.5 + 0.1 * i;
    const auto t = imgcore::niblack_threshold_map(img, {ww, wh, k});
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) worst = std::max(worst, std::abs(t(x, y) - oracle::niblack_t(img, x, y, ww, wh, k)));
  }
  o.require(worst <= 1e-9, "Niblack deviation");
  o.note << (o.pass ? "" : " | ") << "Otsu " << otsu_ok << "/100 exact, Niblack max |dT| " << worst << " on 20 images";
  return o;
}

Outcome wiener_properties() {
  Outcome o;
  int identity = 0, fixed = 0, oracle_ok = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto img = oracle::random_gray(16, 16, 7000 + s);
    identity += wiener::wiener_filter(img, {3 + 2 * static_cast<int>(s % 3), 3, 0.0}) == img;
    const GrayImage c(16, 16, static_cast<std::uint8_t>(11 * s));
    fixed += wiener::wiener_filter(c, {5, 5, 10.0 * s}) == c;
    const int ww = 3 + 2 * static_cast<int>(s % 2), wh = 3 + 2 * static_cast<int>(s % 3);
    const double v2 = 50.0 + 150.0 * s;
    const auto out = wiener::wiener_filter(img, {ww, wh, v2});
    bool all = true;
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        const double ref = std::clamp(oracle::wiener_value(img, x, y, ww, wh, v2), 0.0, 255.0);
        const double frac = ref - std::floor(ref);
        const bool tie = std::abs(frac - 0.5) < 1e-9;
        all = all && (tie ? std::abs(out(x, y) - ref) <= 0.5 + 1e-9 : out(x, y) == clamp_round(ref));
      }
    oracle_ok += all;
  }
  o.require(identity == 20, "identity at v2 = 0");
  o.require(fixed == 20, "constant fixed point");
  o.require(oracle_ok == 20, "naive oracle");
  o.note << (o.pass ? "" : " | ") << "identity " << identity << "/20, fixed point " << fixed << "/20, oracle "
         << oracle_ok << "/20";
  return o;
}

Outcome spectral_properties() {
  Outcome o;
  double roundtrip = 0, parseval = 0;
  for (auto [w, h] : {std::pair{64, 48}, std::pair{45, 31}, std::pair{512, 384}}) {
    const auto img = oracle::random_gray(w, h, static_cast<std::uint64_t>(w + h));
    const auto spec = spectral::fft2(img);
    const auto back = spectral::ifft2(spec);
    double es = 0, ef = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        roundtrip = std::max(roundtrip, std::abs(back(x, y) - static_cast<double>(img(x, y))));
        es += static_cast<double>(img(x, y)) * img(x, y);
      }
    for (auto c : spec.coeffs.pixels()) ef += std::norm(c);
    parseval = std::max(parseval, std::abs(es - ef / static_cast<double>(img.size())) / es);
  }
  o.require(roundtrip <= 1e-6, "round trip");
  o.require(parseval <= 1e-6, "Parseval");

  const auto disp = spectral::spectrum_display(spectral::fft2(oracle::random_gray(40, 30, 3)));
  const auto [lo, hi] = std::minmax_element(disp.values.pixels().begin(), disp.values.pixels().end());
  o.require(*lo == 0 && *hi == 255, "display endpoints");
  Field ends(2, 1);
  ends(0, 0) = 1.25;
  ends(1, 0) = 9.5;
  const auto e = spectral::rescale_display(ends);
  o.require(e.values(0, 0) == 0 && e.values(1, 0) == 255, "min->0, max->255");

  bool counts = true;
  for (auto [w, h] : {std::pair{8, 8}, std::pair{512, 384}, std::pair{33, 65}})
    for (int hw = 0; hw <= 3; ++hw) {
      counts = counts && spectral::band_template(w, h, YarnAxis::Warp, hw).ones() ==
                             static_cast<std::size_t>((2 * hw + 1) * w);
      counts = counts && spectral::band_template(w, h, YarnAxis::Weft, hw).ones() ==
                             static_cast<std::size_t>((2 * hw + 1) * h);
    }
  o.require(counts, "band template counts");
  o.note << (o.pass ? "" : " | ") << "round trip " << roundtrip << ", Parseval " << parseval
         << ", endpoints 0/255, band counts closed-form";
  return o;
}

Outcome metrics_properties() {
  Outcome o;
  double rt = 0;
  for (double d = 0.001; d < 0.05; d *= 1.3) {
    const double back = metrics::diameter_from_ne(metrics::count_ne_from_diameter(d).ne);
    rt = std::max(rt, std::abs(back - d));
  }
  o.require(rt <= 1e-12, "diameter/count round trip");
  bool sym = true, bounds = true;
  for (int i = 0; i <= 50; ++i)
    for (int j = 0; j <= 50; ++j) {
      const double a = i / 50.0, b = j / 50.0;
      const double t = metrics::total_cover(a, b);
      sym = sym && t == metrics::total_cover(b, a);
      bounds = bounds && t >= std::max(a, b) && t <= 1.0;
    }
  o.require(sym, "total cover symmetry");
  o.require(bounds, "total cover bounds");
  o.require(metrics::total_cover(1, 0) == 1.0 && metrics::total_cover(0.5, 0.5) == 0.75 &&
                metrics::total_cover(0, 0) == 0.0,
            "total cover trivial values");
  const auto& g = reference::kYarnGeometry[0];
  const double cf = metrics::fractional_cover(g.warp_diameter_mm, g.warp_spacing_mm).value;
  o.require(std::abs(cf - 0.5576) <= 1e-4, "sample 1 fractional cover");
  o.note << (o.pass ? "" : " | ") << "round trip " << rt << ", sample 1 cover " << cf << " (0.5576 +/- 1e-4)";
  return o;
}

Outcome defect_detection() {
  Outcome o;
  const auto spec = verify::defect_fixture();
  const auto base = synthgen::render_fabric(spec);
  const auto inj = synthgen::inject_defect(spec, base, synthgen::DefectKind::Hole, verify::kHoleRegion);
  const auto regions = defect::segment_defects(inj.image);
  const auto rep = defect::defect_report(regions, base.width(), base.height(), 9);
  const double cx = verify::kHoleRegion.x + (verify::kHoleRegion.width - 1) / 2.0;
  const double cy = verify::kHoleRegion.y + (verify::kHoleRegion.height - 1) / 2.0;
  double off = 1e9;
  for (const auto& r : regions) off = std::min(off, std::hypot(r.centroid_x - cx, r.centroid_y - cy));
  o.require(std::abs(rep.percent_defective - 1.0) <= 0.2, "hole percentage");
  o.require(off <= 2.0, "hole centroid");
  double prev = 1e9;
  bool mono = true;
  for (std::int64_t m : {1, 9, 40, 400, 4000}) {
    const double p = defect::defect_report(defect::segment_defects(inj.image, m), base.width(), base.height(), m)
                         .percent_defective;
    mono = mono && p <= prev;
    prev = p;
  }
  o.require(mono, "min-size monotonicity");
  const auto none = defect::segment_defects(GrayImage(256, 192, 137));
  o.require(none.empty(), "constant image regions");
  o.note << (o.pass ? "" : " | ") << rep.percent_defective << "% (1.0 +/- 0.2), centroid offset " << off
         << " px, monotone over 5 min sizes, constant image " << none.size() << " regions";
  return o;
}

Outcome determinism() {
  Outcome o;
  const std::string a = verify::to_json(verify::run_checks()).dump(2);
  const std::string b = verify::to_json(verify::run_checks()).dump(2);
  o.require(a == b, "reports differ");
  o.note << (o.pass ? "" : " | ") << "two verify reports, " << a.size() << " bytes each, identical";
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "counting example", 1, counting_example},
      {2, "error table replay", 1, error_table},
      {3, "density pipeline vs synthetic ground truth", 30, density_pipeline},
      {4, "weave recognition", 10, weave_recognition},
      {5, "Otsu and Niblack oracles", 10, threshold_oracles},
      {6, "Wiener properties", 5, wiener_properties},
      {7, "spectral properties", 5, spectral_properties},
      {8, "structural metrics", 1, metrics_properties},
      {9, "defect detection", 5, defect_detection},
      {10, "verify determinism", 120, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.budget_s, "runtime over budget");
    failed += !o.pass;
    std::printf("%s  %2d  %-44s %s [%.2f s / %.0f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.note.str().c_str(), secs, c.budget_s);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
