#include <catch2/catch_amalgamated.hpp>

#include "fabric/density.hpp"
#include "fabric/reference.hpp"
#include "fabric/synthgen.hpp"
#include "oracles.hpp"

using namespace fabric;
using namespace fabric::density;

namespace {
StandardLineCount count(const std::vector<std::uint8_t>& line) { return count_yarns(line); }
}  // namespace

TEST_CASE("standard line counting", "[density]") {
  SECTION("hand enumeration") {
    const auto c = count({1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0});
    CHECK(c.start_px == 2);
    CHECK(c.end_px == 9);
    CHECK(c.yarn_count == 2);
  }
  SECTION("no alternation") {
    CHECK(count({0, 0, 0, 0}).yarn_count == 0);
    CHECK_FALSE(count({1, 1, 1}).valid());
  }
  SECTION("[0, 1, 0]: the only opposite run is cut by the border") {
    const auto c = count({0, 1, 0});
    const auto ref = oracle::scan_runs({0, 1, 0});
    CHECK(c.yarn_count == ref.n);
    CHECK(c.yarn_count == 0);
  }
  SECTION("run-scanner oracle on 1000 random lines") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
      std::uniform_int_distribution<int> len(2, 60);
      std::bernoulli_distribution flip(0.1 + 0.8 * (trial % 10) / 10.0);
      std::vector<std::uint8_t> line(len(rng));
      line[0] = rng() & 1;
      for (std::size_t i = 1; i < line.size(); ++i) line[i] = flip(rng) ? line[i - 1] ^ 1 : line[i - 1];
      const auto c = count(line);
      const auto ref = oracle::scan_runs(line);
      REQUIRE(c.yarn_count == ref.n);
      if (ref.n > 0) {
        REQUIRE(c.start_px == ref.sp);
        REQUIRE(c.end_px == ref.ep);
      }
    }
  }
  SECTION("rows and columns of an image") {
    BinaryImage img(11, 3, 1);
    const std::vector<std::uint8_t> line{1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0};
    for (int x = 0; x < 11; ++x) img.set(x, 1, line[x]);
    CHECK(count_yarns_on_line(img, 1, LineOrientation::Row).yarn_count == 2);
    // rotate_cw maps row 1 of a 3-row image onto column 1, top to bottom.
    const auto c = count_yarns_on_line(rotate_cw(img), 1, LineOrientation::Column);
    CHECK(c.yarn_count == 2);
    CHECK(c.start_px == 2);
    CHECK(c.end_px == 9);
  }
}

TEST_CASE("density from a count", "[density]") {
  StandardLineCount worked{42, 4, 506, 0};
  CHECK(density_from_count(worked, 0.002363) == Catch::Approx(35.3).margin(0.05));
  CHECK(density_from_count({1, 7, 7, 0}, 1.0) == 1.0);
  CHECK(density_from_count({2, 2, 9, 0}, 0.01) == Catch::Approx(25.0).epsilon(1e-12));
  CHECK(density_from_count(worked, 2 * 0.002363) == density_from_count(worked, 0.002363) / 2);
  CHECK_THROWS_AS(density_from_count({0, -1, -1, 0}, 0.01), Error);
  CHECK_THROWS_AS(density_from_count(worked, 0.0), Error);
  CHECK_THROWS_AS(density_from_count(worked, -1.0), Error);

  const auto line = reference::counting_example_line();
  const auto c = count_yarns(line);
  CHECK(c.yarn_count == 42);
  CHECK(c.start_px == 4);
  CHECK(c.end_px == 506);
}

TEST_CASE("measurement error", "[density]") {
  CHECK(measurement_error(53.7, 53.5) == Catch::Approx(0.37).margin(0.005));
  CHECK(measurement_error(54.2, 54.0) == Catch::Approx(0.37).margin(0.005));
  CHECK(measurement_error(20.7, 20.5) == Catch::Approx(0.98).margin(0.005));
  CHECK(measurement_error(40.0, 40.0) == 0.0);
  CHECK(measurement_error(39.0, 40.0) == measurement_error(41.0, 40.0));
  CHECK(measurement_error(3 * 20.7, 3 * 20.5) == Catch::Approx(measurement_error(20.7, 20.5)).epsilon(1e-12));
  CHECK_THROWS_AS(measurement_error(1.0, 0.0), Error);
  for (const auto& row : reference::kDensityComparisons) {
    INFO(row.sample);
    CHECK(std::abs(measurement_error(row.warp_automatic, row.warp_manual) - row.warp_error_pct) <= 0.01);
    CHECK(std::abs(measurement_error(row.weft_automatic, row.weft_manual) - row.weft_error_pct) <= 0.01);
  }
}

TEST_CASE("density pipeline", "[density][synthgen]") {
  SECTION("plain 40 threads/cm warp within 2%") {
    auto spec = synthgen::make_spec(40, 25, weave::plain_tile(), 0.002363, Illumination::Transmitted);
    const auto img = synthgen::render_fabric(spec);
    const auto r = measure_density(img, YarnAxis::Warp);
    CHECK(std::abs(r.mean_density - 40.0) <= 0.8);
    double sum = 0;
    for (double v : r.per_line) sum += v;
    CHECK(r.mean_density == sum / r.per_line.size());
    CHECK(r.lines_used() <= r.lines_scanned);
    CHECK(r.counts.size() == r.per_line.size());
  }
  SECTION("rotating the image swaps the axes") {
    auto spec = synthgen::make_spec(33, 24, weave::twill31_tile(), 0.002363, Illumination::Transmitted);
    const auto img = synthgen::render_fabric(spec);
    const auto rot = rotate_cw(img);
    CHECK(std::abs(measure_density(rot, YarnAxis::Weft).mean_density - measure_density(img, YarnAxis::Warp).mean_density) <=
          0.02 * 33);
    CHECK(std::abs(measure_density(rot, YarnAxis::Warp).mean_density - measure_density(img, YarnAxis::Weft).mean_density) <=
          0.02 * 24);
  }
  SECTION("noise-free renders within 1% across the density range") {
    for (double d : {20.0, 30.0, 45.0, 60.0}) {
      auto spec = synthgen::make_spec(d, 0.5 * d + 10, weave::plain_tile(), 0.002363, Illumination::Transmitted);
      const auto r = measure_density(synthgen::render_fabric(spec), YarnAxis::Warp);
      INFO("density " << d << " measured " << r.mean_density);
      CHECK(std::abs(r.mean_density - d) <= 0.01 * d);
    }
  }
  SECTION("constant image fails") {
    try {
      measure_density(GrayImage(128, 128, 90, 0.002), YarnAxis::Warp);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MeasurementFailed);
      CHECK(is_measurement_failure(e.code()));
    }
  }
  SECTION("scale and size are required") {
    CHECK_THROWS_AS(measure_density(GrayImage(128, 128, 90), YarnAxis::Warp), Error);
    CHECK_THROWS_AS(measure_density(GrayImage(32, 128, 90, 0.002), YarnAxis::Warp), Error);
  }
  SECTION("binary counting-line image") {
    const auto r = density_from_binary(reference::counting_example_image(), YarnAxis::Warp, 0.002363);
    CHECK(r.mean_density == Catch::Approx(35.3).margin(0.05));
    CHECK(r.lines_used() == 10);
  }
}
