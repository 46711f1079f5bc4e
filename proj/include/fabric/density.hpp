#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "fabric/error.hpp"
#include "fabric/image.hpp"
#include "fabric/imgcore.hpp"
#include "fabric/spectral.hpp"

namespace fabric::density {

/// Result of scanning one standard line. When `yarn_count` is 0 the start and
/// end points are meaningless and `valid()` is false.
struct StandardLineCount {
  int yarn_count = 0;
  int start_px = -1;
  int end_px = -1;
  int line_index = 0;

  bool valid() const noexcept { return yarn_count > 0; }
  int span() const noexcept { return end_px - start_px + 1; }
};

enum class LineOrientation { Row, Column };

/// Counts yarns along a binary line.
///  - start point: first pixel whose value differs from pixel 0;
///  - end point: last pixel of the final complete run (one not cut by the far
///    border) whose value is opposite to the start value;
///  - count: runs of the start value inside [start, end].
inline StandardLineCount count_yarns(std::span<const std::uint8_t> line, int line_index = 0) {
  StandardLineCount out;
  out.line_index = line_index;
  const int n = static_cast<int>(line.size());
  if (n < 2) throw Error(ErrorCode::InvalidInput, "standard line must have at least 2 pixels");

  int sp = 1;
  while (sp < n && line[sp] == line[0]) ++sp;
  if (sp >= n) return out;
  const std::uint8_t start_value = line[sp];

  int runs = 0;
  int ep = -1;
  int runs_at_ep = 0;
  int i = sp;
  while (i < n) {
    const std::uint8_t v = line[i];
    int j = i;
    while (j + 1 < n && line[j + 1] == v) ++j;
    const bool complete = j < n - 1;
    if (v == start_value) {
      ++runs;
    } else if (complete) {
      ep = j;
      runs_at_ep = runs;
    }
    i = j + 1;
  }
  if (ep < 0) return out;
  out.yarn_count = runs_at_ep;
  out.start_px = sp;
  out.end_px = ep;
  return out;
}

inline StandardLineCount count_yarns_on_line(const BinaryImage& img, int line, LineOrientation orientation) {
  if (orientation == LineOrientation::Row) {
    if (line < 0 || line >= img.height()) throw Error(ErrorCode::InvalidParams, "row out of range");
    return count_yarns(img.row(line), line);
  }
  if (line < 0 || line >= img.width()) throw Error(ErrorCode::InvalidParams, "column out of range");
  std::vector<std::uint8_t> column(img.height());
  for (int y = 0; y < img.height(); ++y) column[y] = img(line, y);
  return count_yarns(column, line);
}

/// D = N / ((EP - SP + 1) * Scale), threads per cm.
inline double density_from_count(const StandardLineCount& c, double scale_cm_per_px) {
  if (c.yarn_count <= 0) throw Error(ErrorCode::NoYarn, "no yarn on the standard line");
  if (!(scale_cm_per_px > 0.0) || !std::isfinite(scale_cm_per_px)) {
    throw Error(ErrorCode::InvalidScale, "scale must be positive");
  }
  return static_cast<double>(c.yarn_count) / (static_cast<double>(c.span()) * scale_cm_per_px);
}

/// |D_A - D_M| / D_M * 100.
inline double measurement_error(double automatic, double manual) {
  if (!(manual > 0.0)) throw Error(ErrorCode::InvalidReference, "manual density must be positive");
  return std::abs(automatic - manual) / manual * 100.0;
}

struct DensityParams {
  imgcore::NiblackParams niblack{};
  int band_half_width = spectral::kDefaultBandHalfWidth;
  int lines = 10;
};

struct DensityResult {
  YarnAxis axis = YarnAxis::Warp;
  std::vector<double> per_line;
  std::vector<StandardLineCount> counts;  // the lines that contributed
  double mean_density = 0.0;
  double scale = 0.0;
  int lines_scanned = 0;

  int lines_used() const noexcept { return static_cast<int>(per_line.size()); }
};

/// Rows at (i + 1) * H / (lines + 1), i = 0..lines-1.
inline std::vector<int> standard_lines(int height, int lines) {
  std::vector<int> rows;
  rows.reserve(lines);
  for (int i = 0; i < lines; ++i) {
    rows.push_back(static_cast<int>((static_cast<long long>(i) + 1) * height / (lines + 1)));
  }
  return rows;
}

/// Density from an already thresholded image in which the yarns to count run
/// vertically; counting runs along evenly spaced rows.
inline DensityResult density_from_binary(const BinaryImage& bin, YarnAxis axis, double scale, int lines = 10) {
  if (lines < 1) throw Error(ErrorCode::InvalidParams, "need at least one standard line");
  DensityResult res;
  res.axis = axis;
  res.scale = scale;
  res.lines_scanned = lines;
  for (int row : standard_lines(bin.height(), lines)) {
    const StandardLineCount c = count_yarns_on_line(bin, row, LineOrientation::Row);
    if (!c.valid()) continue;
    res.per_line.push_back(density_from_count(c, scale));
    res.counts.push_back(c);
  }
  if (res.per_line.empty()) {
    throw Error(ErrorCode::MeasurementFailed, "no standard line crossed a complete yarn");
  }
  res.mean_density = std::accumulate(res.per_line.begin(), res.per_line.end(), 0.0) /
                     static_cast<double>(res.per_line.size());
  return res;
}

/// Intermediate images of the frequency-domain pipeline, in the frame where the
/// counted yarns are vertical (weft inputs are rotated 90 degrees first).
struct DensityStages {
  GrayImage oriented;
  spectral::ComplexSpectrum spectrum;  // centred
  spectral::FilterTemplate band;
  GrayImage reconstructed;
  BinaryImage thresholded;
};

inline constexpr int kMinDensitySide = 64;

inline DensityStages density_stages(const GrayImage& img, YarnAxis axis, const DensityParams& params = {}) {
  if (!img.scale()) throw Error(ErrorCode::InvalidScale, "density needs the image scale (cm/pixel)");
  if (img.width() < kMinDensitySide || img.height() < kMinDensitySide) {
    throw Error(ErrorCode::ImageTooSmall, "density needs at least 64 px per side");
  }
  DensityStages st;
  st.oriented = axis == YarnAxis::Weft ? rotate_cw(img) : img;
  st.spectrum = spectral::fft_shift(spectral::fft2(st.oriented));
  st.band = spectral::band_template(st.oriented.width(), st.oriented.height(), YarnAxis::Warp,
                                    params.band_half_width);
  st.reconstructed = spectral::reconstruct(st.spectrum, st.band);
  st.thresholded = imgcore::niblack_threshold(st.reconstructed, params.niblack);
  return st;
}

/// FFT -> band template -> reconstruction -> Niblack -> standard-line counts.
inline DensityResult measure_density(const GrayImage& img, YarnAxis axis, const DensityParams& params = {}) {
  const DensityStages st = density_stages(img, axis, params);
  return density_from_binary(st.thresholded, axis, *img.scale(), params.lines);
}

}  // namespace fabric::density
