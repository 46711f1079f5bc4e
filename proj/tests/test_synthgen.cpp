#include <catch2/catch_amalgamated.hpp>

#include "fabric/synthgen.hpp"

using namespace fabric;
using namespace fabric::synthgen;

namespace {

int autocorrelation_peak(const GrayImage& img, int lo, int hi) {
  std::vector<double> p(img.width(), 0.0);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) p[x] += img(x, y);
  double m = 0;
  for (double v : p) m += v;
  m /= p.size();
  int best_lag = lo;
  double best = -1e300;
  for (int lag = lo; lag <= hi; ++lag) {
    double acc = 0;
    for (std::size_t i = 0; i + lag < p.size(); ++i) acc += (p[i] - m) * (p[i + lag] - m);
    acc /= static_cast<double>(p.size() - lag);
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  return best_lag;
}

}  // namespace

TEST_CASE("rendering", "[synthgen]") {
  SECTION("warp pitch shows in the column autocorrelation") {
    auto s = make_spec(40, 30, weave::plain_tile(), 0.002363, Illumination::Transmitted);
    CHECK(s.warp_pitch_px() == Catch::Approx(10.58).margin(0.01));
    CHECK(autocorrelation_peak(render_fabric(s), 6, 16) == 11);
  }
  SECTION("transmitted gaps are brightest, reflected gaps darkest") {
    const auto t = default_levels(Illumination::Transmitted);
    CHECK(t.gap > t.warp);
    CHECK(t.gap > t.weft);
    const auto r = default_levels(Illumination::Reflected);
    CHECK(r.gap < r.warp);
    CHECK(r.gap < r.weft);
    auto s = make_spec(30, 30, weave::plain_tile(), 0.002, Illumination::Transmitted);
    const auto img = render_fabric(s);
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    CHECK(*hi == t.gap);
    CHECK(*lo == t.warp);
  }
  SECTION("same seed, same image; other seed, other noise") {
    auto s = make_spec(30, 25, weave::twill31_tile(), 0.002, Illumination::Reflected);
    s.noise_sigma = 8;
    s.seed = 42;
    const auto a = render_fabric(s);
    CHECK(render_fabric(s) == a);
    s.seed = 43;
    CHECK_FALSE(render_fabric(s) == a);
  }
  SECTION("the tile decides which yarn is on top") {
    auto s = make_spec(20, 20, weave::plain_tile(), 0.002, Illumination::Reflected);
    int warp_top = 0, weft_top = 0;
    const auto img = render_fabric(s);
    for (auto v : img.pixels()) {
      warp_top += v == s.levels.warp;
      weft_top += v == s.levels.weft;
    }
    CHECK(warp_top > 0);
    CHECK(weft_top > 0);
    s.tile = weave::BoolMatrix::from_rows({"T"});
    const auto all_warp = render_fabric(s);
    for (int y = 0; y < all_warp.height(); ++y)
      for (int x = 0; x < all_warp.width(); ++x)
        if (all_warp(x, y) == s.levels.weft) {
          // weft only visible where no warp yarn crosses
          REQUIRE(detail::noiseless_pixel(s, x, y, detail::Top::Warp) == s.levels.weft);
        }
  }
  SECTION("scale is attached") {
    auto s = make_spec(30, 30, weave::plain_tile(), 0.002363, Illumination::Reflected);
    CHECK(render_fabric(s).scale() == 0.002363);
  }
}

TEST_CASE("spec validation", "[synthgen]") {
  auto s = make_spec(30, 30, weave::plain_tile(), 0.002, Illumination::Reflected);
  CHECK_NOTHROW(validate(s));
  auto bad = s;
  bad.warp_density = 0;
  CHECK_THROWS_AS(render_fabric(bad), Error);
  bad = s;
  bad.warp_width_mm = 10.0 / 30 * 1.1;  // wider than the pitch
  CHECK_THROWS_AS(render_fabric(bad), Error);
  bad = s;
  bad.levels = {100, 100, 10};
  CHECK_THROWS_AS(render_fabric(bad), Error);
  bad = s;
  bad.levels = {200, 150, 250};  // reflected gaps must be darkest
  CHECK_THROWS_AS(render_fabric(bad), Error);
  bad = s;
  bad.scale = -1;
  CHECK_THROWS_AS(render_fabric(bad), Error);
}

TEST_CASE("defect injection", "[synthgen]") {
  auto s = make_spec(30, 30, weave::plain_tile(), 0.002, Illumination::Transmitted);
  const auto img = render_fabric(s);
  SECTION("10x10 hole") {
    const auto d = inject_defect(s, img, DefectKind::Hole, {251, 187, 10, 10});
    CHECK(d.mask.count_ones() == 100);
    for (int y = 187; y < 197; ++y)
      for (int x = 251; x < 261; ++x) REQUIRE(d.image(x, y) == s.levels.gap);
    CHECK(d.image(0, 0) == img(0, 0));
  }
  SECTION("stain with level 0 is a no-op") {
    const auto d = inject_defect(s, img, DefectKind::Stain, {10, 10, 30, 20}, 0);
    CHECK(d.image == img);
    CHECK(d.mask.count_ones() == 600);
  }
  SECTION("stain darkens") {
    const auto d = inject_defect(s, img, DefectKind::Stain, {10, 10, 30, 20}, 25);
    for (int y = 10; y < 30; ++y)
      for (int x = 10; x < 40; ++x) REQUIRE(d.image(x, y) == std::max(0, img(x, y) - 25));
  }
  SECTION("float keeps warp on top") {
    const auto d = inject_defect(s, img, DefectKind::Float, {0, 0, 100, 100});
    for (int y = 0; y < 100; ++y)
      for (int x = 0; x < 100; ++x) REQUIRE(d.image(x, y) == detail::noiseless_pixel(s, x, y, detail::Top::Warp));
  }
  SECTION("slub") {
    const auto d = inject_defect(s, img, DefectKind::Slub, {5, 5, 3, 3});
    CHECK(d.image(6, 6) == s.levels.weft);
  }
  SECTION("region outside the image") {
    CHECK_THROWS_AS(inject_defect(s, img, DefectKind::Hole, {500, 10, 20, 20}), Error);
    CHECK_THROWS_AS(inject_defect(s, img, DefectKind::Hole, {-1, 10, 20, 20}), Error);
    CHECK_THROWS_AS(inject_defect(s, img, DefectKind::Hole, {1, 10, 0, 20}), Error);
  }
}
