#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "fabric/error.hpp"
#include "fabric/image.hpp"
#include "fabric/imgcore.hpp"

namespace fabric::defect {

struct Preprocessed {
  GrayImage gray;       // luma
  GrayImage equalized;  // histogram-equalized luma
  BinaryImage binary;   // Otsu of the equalized image
  int threshold = 0;
};

/// Capture -> grayscale -> histogram equalization -> Otsu binarization.
inline Preprocessed preprocess(const RgbImage& rgb, std::optional<double> scale = std::nullopt) {
  Preprocessed p;
  p.gray = imgcore::to_grayscale(rgb, scale);
  p.equalized = imgcore::histogram_equalize(p.gray);
  auto otsu = imgcore::otsu_threshold(p.equalized);
  p.binary = std::move(otsu.binary);
  p.threshold = otsu.threshold;
  return p;
}

// ---------------------------------------------------------------------------
// Edge detection
// ---------------------------------------------------------------------------

enum class EdgeMethod { Canny, Sobel, Prewitt };

constexpr std::string_view to_string(EdgeMethod m) {
  switch (m) {
    case EdgeMethod::Canny: return "canny";
    case EdgeMethod::Sobel: return "sobel";
    case EdgeMethod::Prewitt: return "prewitt";
  }
  return "canny";
}

struct CannyParams {
  double sigma = 1.4;
  double low_ratio = 0.1;   // of the maximum gradient magnitude
  double high_ratio = 0.3;
};

namespace detail {

inline Field to_field(const GrayImage& img) {
  Field f(img.width(), img.height());
  auto src = img.pixels();
  auto dst = f.pixels();
  std::copy(src.begin(), src.end(), dst.begin());
  return f;
}

/// Separable Gaussian blur, radius ceil(3 sigma), reflect-101 borders.
inline Field gaussian_blur(const Field& in, double sigma) {
  if (!(sigma > 0.0)) return in;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double total = 0.0;
  for (int i = -r; i <= r; ++i) total += k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (auto& v : k) v /= total;
  const int w = in.width();
  const int h = in.height();
  Field tmp(w, h);
  Field out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * in(reflect101(x + i, w), y);
      tmp(x, y) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp(x, reflect101(y + i, h));
      out(x, y) = acc;
    }
  return out;
}

struct Gradient {
  Field gx;
  Field gy;
  Field magnitude;
};

/// 3x3 derivative with smoothing weight `c` (2 = Sobel, 1 = Prewitt).
inline Gradient gradient(const Field& f, double c) {
  const int w = f.width();
  const int h = f.height();
  Gradient g{Field(w, h), Field(w, h), Field(w, h)};
  auto at = [&](int x, int y) { return f(reflect101(x, w), reflect101(y, h)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + c * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + c * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + c * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + c * at(x, y - 1) + at(x + 1, y - 1));
      g.gx(x, y) = gx;
      g.gy(x, y) = gy;
      g.magnitude(x, y) = std::hypot(gx, gy);
    }
  }
  return g;
}

inline double max_of(const Field& f) {
  double m = 0.0;
  for (double v : f.pixels()) m = std::max(m, v);
  return m;
}

/// Edge = 1 where the magnitude, quantized to 0..255, exceeds its Otsu level.
inline BinaryImage otsu_magnitude(const Field& mag) {
  BinaryImage out(mag.width(), mag.height(), 0);
  const double top = max_of(mag);
  if (!(top > 0.0)) return out;
  GrayImage q(mag.width(), mag.height());
  for (int y = 0; y < mag.height(); ++y)
    for (int x = 0; x < mag.width(); ++x) q(x, y) = clamp_round(mag(x, y) / top * 255.0);
  int t = 0;
  try {
    t = imgcore::otsu_level(imgcore::histogram(q));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateHistogram) throw;
    return out;
  }
  for (int y = 0; y < mag.height(); ++y)
    for (int x = 0; x < mag.width(); ++x)
      if (q(x, y) > t) out.set(x, y, 1);
  return out;
}

}  // namespace detail

inline BinaryImage canny(const GrayImage& img, const CannyParams& p = {}) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  if (!(p.low_ratio >= 0.0) || !(p.high_ratio >= p.low_ratio) || !(p.high_ratio <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "need 0 <= low <= high <= 1");
  }
  const int w = img.width();
  const int h = img.height();
  BinaryImage edges(w, h, 0, img.scale());
  // Intensities are rescaled to [0, 1] first, which makes the result
  // independent of contrast and offset.
  const auto [lo_it, hi_it] = std::minmax_element(img.pixels().begin(), img.pixels().end());
  if (*lo_it == *hi_it) return edges;
  auto field = detail::to_field(img);
  const double lo_v = *lo_it, range = static_cast<double>(*hi_it) - lo_v;
  for (auto& v : field.pixels()) v = (v - lo_v) / range;
  const auto g = detail::gradient(detail::gaussian_blur(field, p.sigma), 2.0);
  const double top = detail::max_of(g.magnitude);
  if (!(top > 0.0)) return edges;

  // Non-maximum suppression along the quantized gradient direction; the
  // asymmetric comparison keeps exactly one pixel of a symmetric ridge.
  constexpr double kTan22 = 0.41421356237309503;
  Field thin(w, h);
  auto mag = [&](int x, int y) {
    return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0 : g.magnitude(x, y);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = g.magnitude(x, y);
      if (m <= 0.0) continue;
      const double ax = std::abs(g.gx(x, y));
      const double ay = std::abs(g.gy(x, y));
      int dx, dy;
      if (ay <= kTan22 * ax) {
        dx = 1, dy = 0;
      } else if (ax <= kTan22 * ay) {
        dx = 0, dy = 1;
      } else {
        dx = 1;
        dy = (g.gx(x, y) > 0) == (g.gy(x, y) > 0) ? 1 : -1;
      }
      if (m > mag(x - dx, y - dy) && m >= mag(x + dx, y + dy)) thin(x, y) = m;
    }
  }

  const double high = p.high_ratio * top;
  const double low = p.low_ratio * top;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (thin(x, y) >= high && thin(x, y) > 0.0) {
        edges.set(x, y, 1);
        stack.emplace_back(x, y);
      }
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    for (int ny = y - 1; ny <= y + 1; ++ny)
      for (int nx = x - 1; nx <= x + 1; ++nx) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h || edges(nx, ny)) continue;
        if (thin(nx, ny) >= low && thin(nx, ny) > 0.0) {
          edges.set(nx, ny, 1);
          stack.emplace_back(nx, ny);
        }
      }
  }
  return edges;
}

inline BinaryImage edge_detect(const GrayImage& img, EdgeMethod method, const CannyParams& p = {}) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  if (method == EdgeMethod::Canny) return canny(img, p);
  const auto g = detail::gradient(detail::to_field(img), method == EdgeMethod::Sobel ? 2.0 : 1.0);
  BinaryImage out = detail::otsu_magnitude(g.magnitude);
  out.set_scale(img.scale());
  return out;
}

// ---------------------------------------------------------------------------
// Segmentation and report
// ---------------------------------------------------------------------------

enum class Polarity { Thick, Thin };

constexpr std::string_view to_string(Polarity p) { return p == Polarity::Thick ? "thick" : "thin"; }

struct DefectRegion {
  Rect bbox;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  std::int64_t area = 0;
  double mean_intensity = 0.0;
  Polarity polarity = Polarity::Thick;
};

/// Lower median of the pixel values.
inline int median_level(const GrayImage& img) {
  const auto h = imgcore::histogram(img);
  const std::uint64_t target = (img.size() - 1) / 2;
  std::uint64_t acc = 0;
  for (int v = 0; v < 256; ++v) {
    acc += h[v];
    if (acc > target) return v;
  }
  return 255;
}

/// |p - median| split by Otsu; 8-connected components of the deviating
/// pixels with area >= min_size. Under transmitted light a region darker than
/// the median is Thick; `convention` Reflected swaps the sign.
inline std::vector<DefectRegion> segment_defects(const GrayImage& img, std::int64_t min_size = 9,
                                                 Illumination convention = Illumination::Transmitted) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  if (min_size < 1) throw Error(ErrorCode::InvalidParams, "min_size must be >= 1");
  const int med = median_level(img);
  GrayImage dev(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) dev(x, y) = static_cast<std::uint8_t>(std::abs(img(x, y) - med));

  int t = 0;
  try {
    t = imgcore::otsu_level(imgcore::histogram(dev));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateHistogram) throw;
    return {};
  }
  const auto lab = imgcore::label_components(
      img.width(), img.height(), [&](int x, int y) { return dev(x, y) > t; }, [](int, int) { return 1; });

  std::vector<double> sums(lab.components.size(), 0.0);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (const int id = lab.labels(x, y); id >= 0) sums[id] += img(x, y);

  std::vector<DefectRegion> out;
  for (const auto& c : lab.components) {
    if (c.area < min_size) continue;
    DefectRegion r;
    r.bbox = c.bbox;
    r.area = c.area;
    r.centroid_x = c.sum_x / static_cast<double>(c.area);
    r.centroid_y = c.sum_y / static_cast<double>(c.area);
    r.mean_intensity = sums[c.label] / static_cast<double>(c.area);
    const bool darker = r.mean_intensity < med;
    r.polarity = (darker == (convention == Illumination::Transmitted)) ? Polarity::Thick : Polarity::Thin;
    out.push_back(r);
  }
  return out;
}

struct DefectReport {
  std::vector<DefectRegion> regions;
  std::int64_t total_area = 0;
  std::int64_t defect_area = 0;
  double percent_defective = 0.0;
  std::int64_t min_size_used = 0;
};

inline DefectReport defect_report(std::vector<DefectRegion> regions, int width, int height, std::int64_t min_size) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidInput, "image dimensions must be >= 1");
  DefectReport r;
  r.total_area = static_cast<std::int64_t>(width) * height;
  for (const auto& reg : regions) r.defect_area += reg.area;
  r.percent_defective = 100.0 * static_cast<double>(r.defect_area) / static_cast<double>(r.total_area);
  r.min_size_used = min_size;
  r.regions = std::move(regions);
  return r;
}

/// Gray image in colour with a red (thick) or blue (thin) cross at every centroid.
inline RgbImage annotate(const GrayImage& img, const std::vector<DefectRegion>& regions, int arm = 4) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out(x, y) = Rgb{img(x, y), img(x, y), img(x, y)};
  for (const auto& r : regions) {
    const Rgb mark = r.polarity == Polarity::Thick ? Rgb{255, 0, 0} : Rgb{0, 0, 255};
    const int cx = static_cast<int>(std::lround(r.centroid_x));
    const int cy = static_cast<int>(std::lround(r.centroid_y));
    for (int d = -arm; d <= arm; ++d) {
      if (out.contains(cx + d, cy)) out(cx + d, cy) = mark;
      if (out.contains(cx, cy + d)) out(cx, cy + d) = mark;
    }
  }
  return out;
}

}  // namespace fabric::defect
