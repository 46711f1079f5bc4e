#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "fabric/image.hpp"

namespace fabric::reference {

/// One fabric of the automatic-vs-manual density comparison, with the
/// published error percentages (two decimals).
struct DensityComparison {
  std::string_view sample;
  double warp_automatic;
  double warp_manual;
  double weft_automatic;
  double weft_manual;
  double warp_error_pct;
  double weft_error_pct;
};

inline constexpr std::array<DensityComparison, 15> kDensityComparisons{{
    {"P1", 53.7, 53.5, 37.2, 37.0, 0.37, 0.54},
    {"P2", 56.5, 56.5, 38.5, 38.5, 0.00, 0.00},
    {"P3", 61.1, 61.0, 39.0, 39.0, 0.16, 0.00},
    {"P4", 41.3, 41.5, 18.1, 18.0, 0.48, 0.56},
    {"P5", 65.6, 65.5, 39.3, 39.5, 0.15, 0.51},
    {"P6", 42.5, 42.5, 30.9, 31.0, 0.00, 0.32},
    {"P7", 47.2, 47.0, 21.6, 21.5, 0.43, 0.47},
    {"T1", 61.8, 62.0, 27.3, 27.5, 0.32, 0.73},
    {"T2", 48.4, 48.5, 36.3, 36.0, 0.21, 0.83},
    {"T3", 65.6, 65.5, 35.7, 35.5, 0.15, 0.56},
    {"T4", 50.2, 50.0, 21.5, 21.5, 0.40, 0.00},
    {"T5", 54.2, 54.0, 20.7, 20.5, 0.37, 0.98},
    {"S1", 99.6, 99.5, 78.3, 78.5, 0.10, 0.25},
    {"S2", 76.2, 76.0, 42.4, 42.5, 0.26, 0.24},
    {"S3", 87.9, 88.0, 44.7, 44.5, 0.11, 0.45},
}};

/// Manufacturer specification of six cotton fabrics (mean values).
struct FabricSample {
  int id;
  std::string_view structure;
  double warp_density;  // threads/cm
  double weft_density;
  double warp_tex;
  double weft_tex;
};

inline constexpr std::array<FabricSample, 6> kFabricSamples{{
    {1, "plain", 26, 35, 20, 28},
    {2, "plain", 30, 26, 34, 34},
    {3, "twill", 37, 20, 22, 16},
    {4, "twill", 26, 31, 14, 20},
    {5, "satin", 27, 18, 20, 14},
    {6, "satin", 57, 29, 46, 42},
}};

/// Image-measured yarn diameter and spacing, mm.
struct YarnGeometry {
  int id;
  double warp_diameter_mm;
  double weft_diameter_mm;
  double warp_spacing_mm;
  double weft_spacing_mm;
};

inline constexpr std::array<YarnGeometry, 6> kYarnGeometry{{
    {1, 0.208, 0.170, 0.373, 0.356},
    {2, 0.155, 0.155, 0.432, 0.406},
    {3, 0.191, 0.239, 0.254, 0.533},
    {4, 0.254, 0.191, 0.406, 0.432},
    {5, 0.206, 0.241, 0.457, 0.559},
    {6, 0.132, 0.147, 0.178, 0.432},
}};

/// Worked counting example: 42 yarns between SP = 4 and EP = 506 at
/// 0.002363 cm/pixel, reported as 35.3 threads/cm.
struct CountingExample {
  int yarns = 42;
  int start_px = 4;
  int end_px = 506;
  double scale = 0.002363;
  double density = 35.3;
  int line_length = 512;
};

inline constexpr CountingExample kCountingExample{};

/// A 512-pixel binary line realizing the counting example: background (1)
/// up to SP, then 42 dark/bright periods ending exactly at EP, then a dark
/// run cut by the border.
inline std::vector<std::uint8_t> counting_example_line(const CountingExample& ex = kCountingExample) {
  std::vector<std::uint8_t> line(ex.line_length, 1);
  const int span = ex.end_px - ex.start_px + 1;
  auto boundary = [&](int k) {
    return ex.start_px + static_cast<int>((static_cast<long long>(2 * k) * span + ex.yarns) / (2 * ex.yarns));
  };
  for (int k = 0; k < ex.yarns; ++k) {
    const int b0 = boundary(k);
    const int b1 = boundary(k + 1);
    const int dark = (b1 - b0) / 2 + 1;
    for (int x = b0; x < b0 + dark; ++x) line[x] = 0;
  }
  for (int x = ex.end_px + 1; x < ex.line_length; ++x) line[x] = 0;
  return line;
}

/// The counting line repeated on every row.
inline BinaryImage counting_example_image(int rows = 64, const CountingExample& ex = kCountingExample) {
  const auto line = counting_example_line(ex);
  BinaryImage img(ex.line_length, rows, 0, ex.scale);
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < ex.line_length; ++x) img.set(x, y, line[x]);
  return img;
}

}  // namespace fabric::reference
