#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fabric/error.hpp"
#include "fabric/image.hpp"

namespace fabric::imgcore {

using Histogram = std::array<std::uint64_t, 256>;

/// Rec.601 luma, rounded half-up. Integer arithmetic keeps gray triples exact.
inline std::uint8_t luma(Rgb p) noexcept {
  const unsigned v = 299U * p.r + 587U * p.g + 114U * p.b;
  return static_cast<std::uint8_t>((v + 500U) / 1000U);
}

inline GrayImage to_grayscale(const RgbImage& rgb, std::optional<double> scale = std::nullopt) {
  if (rgb.empty()) throw Error(ErrorCode::InvalidInput, "empty RGB image");
  GrayImage out(rgb.width(), rgb.height(), 0, scale);
  auto src = rgb.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = luma(src[i]);
  return out;
}

inline Histogram histogram(const GrayImage& img) {
  Histogram h{};
  for (auto v : img.pixels()) ++h[v];
  return h;
}

/// Classic discrete CDF equalization:
///   out = round((cdf(v) - cdf_min) / (N - cdf_min) * 255)
/// A single-level image is returned unchanged.
inline GrayImage histogram_equalize(const GrayImage& img) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  const Histogram h = histogram(img);
  const std::uint64_t n = img.size();

  std::array<std::uint64_t, 256> cdf{};
  std::uint64_t run = 0;
  std::uint64_t cdf_min = 0;
  for (int v = 0; v < 256; ++v) {
    run += h[v];
    cdf[v] = run;
    if (cdf_min == 0 && h[v] > 0) cdf_min = run;
  }
  if (cdf_min == n) return img;

  const std::uint64_t denom = n - cdf_min;
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    const std::uint64_t num = cdf[v] >= cdf_min ? cdf[v] - cdf_min : 0;
    // floor(num * 255 / denom + 1/2) in integers.
    lut[v] = static_cast<std::uint8_t>((2 * num * 255 + denom) / (2 * denom));
  }
  GrayImage out = img;
  for (auto& v : out.pixels()) v = lut[v];
  return out;
}

/// Threshold maximizing the between-class variance of a 256-bin histogram.
/// Class 0 is {v <= t}. Ties resolve to the smallest t.
inline int otsu_level(const Histogram& h) {
  std::uint64_t n = 0;
  std::uint64_t total = 0;
  int occupied = 0;
  for (int v = 0; v < 256; ++v) {
    n += h[v];
    total += h[v] * static_cast<std::uint64_t>(v);
    occupied += h[v] > 0 ? 1 : 0;
  }
  if (occupied < 2) {
    throw Error(ErrorCode::DegenerateHistogram, "histogram has fewer than two occupied levels");
  }

  int best_t = 0;
  double best = -1.0;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += h[t];
    s0 += h[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const double m0 = static_cast<double>(s0) / static_cast<double>(n0);
    const double m1 = static_cast<double>(total - s0) / static_cast<double>(n1);
    const double between = static_cast<double>(n0) * static_cast<double>(n1) * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

struct OtsuResult {
  std::uint8_t threshold = 0;
  BinaryImage binary;
};

inline BinaryImage threshold_binary(const GrayImage& img, int threshold) {
  BinaryImage out(img.width(), img.height(), 0, img.scale());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.set(x, y, img(x, y) > threshold ? 1 : 0);
    }
  }
  return out;
}

/// Global Otsu binarization: pixels <= threshold become 0, the rest 1.
inline OtsuResult otsu_threshold(const GrayImage& img) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  const int t = otsu_level(histogram(img));
  return {static_cast<std::uint8_t>(t), threshold_binary(img, t)};
}

// ---------------------------------------------------------------------------
// Local window statistics
// ---------------------------------------------------------------------------

struct LocalStats {
  Field mean;
  Field variance;  // population variance
};

/// Mean and population variance over a window_w x window_h neighbourhood of
/// every pixel, with reflect-101 borders. Integral images keep this O(N).
inline LocalStats local_stats(const Raster<std::uint8_t>& img, int window_w, int window_h) {
  if (window_w < 1 || window_h < 1) {
    throw Error(ErrorCode::InvalidParams, "window dimensions must be >= 1");
  }
  const int w = img.width();
  const int h = img.height();
  const int pw = w + window_w - 1;
  const int ph = h + window_h - 1;
  const int ox = window_lo(window_w);
  const int oy = window_lo(window_h);

  // Integral tables of the padded image, (pw+1) x (ph+1).
  const std::size_t stride = static_cast<std::size_t>(pw) + 1;
  std::vector<std::int64_t> sum(stride * (static_cast<std::size_t>(ph) + 1), 0);
  std::vector<std::int64_t> sq(sum.size(), 0);
  std::vector<int> col_src(pw);
  for (int px = 0; px < pw; ++px) col_src[px] = reflect101(px + ox, w);
  for (int py = 0; py < ph; ++py) {
    const int sy = reflect101(py + oy, h);
    std::int64_t row_sum = 0;
    std::int64_t row_sq = 0;
    for (int px = 0; px < pw; ++px) {
      const std::int64_t v = img(col_src[px], sy);
      row_sum += v;
      row_sq += v * v;
      const std::size_t at = (py + 1) * stride + (px + 1);
      sum[at] = sum[at - stride] + row_sum;
      sq[at] = sq[at - stride] + row_sq;
    }
  }

  LocalStats out{Field(w, h), Field(w, h)};
  const __int128 n = static_cast<__int128>(window_w) * window_h;
  auto box = [&](const std::vector<std::int64_t>& t, int x, int y) {
    const std::size_t x0 = x, y0 = y, x1 = x + window_w, y1 = y + window_h;
    return t[y1 * stride + x1] - t[y0 * stride + x1] - t[y1 * stride + x0] + t[y0 * stride + x0];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const __int128 s = box(sum, x, y);
      const __int128 q = box(sq, x, y);
      const __int128 num = n * q - s * s;  // n^2 * variance, exact
      out.mean(x, y) = static_cast<double>(s) / static_cast<double>(n);
      out.variance(x, y) = static_cast<double>(num) / (static_cast<double>(n) * static_cast<double>(n));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Niblack
// ---------------------------------------------------------------------------

struct NiblackParams {
  int window_w = 33;
  int window_h = 33;
  double k = 0.2;

  /// Even sizes are rounded up so that a centre pixel exists (32 -> 33).
  NiblackParams normalized() const {
    NiblackParams p = *this;
    if (p.window_w % 2 == 0) ++p.window_w;
    if (p.window_h % 2 == 0) ++p.window_h;
    return p;
  }
};

inline NiblackParams validate(const NiblackParams& params, const Raster<std::uint8_t>& img) {
  const NiblackParams p = params.normalized();
  if (p.window_w < 3 || p.window_h < 3) {
    throw Error(ErrorCode::InvalidParams, "Niblack window must be at least 3x3");
  }
  if (!std::isfinite(p.k)) throw Error(ErrorCode::InvalidParams, "Niblack k must be finite");
  if (p.window_w > 4 * img.width() || p.window_h > 4 * img.height()) {
    throw Error(ErrorCode::InvalidParams, "Niblack window larger than 4x the image");
  }
  return p;
}

/// Per-pixel threshold T = mean + k * stddev over the centred window.
inline Field niblack_threshold_map(const GrayImage& img, const NiblackParams& params = {}) {
  const NiblackParams p = validate(params, img);
  LocalStats st = local_stats(img, p.window_w, p.window_h);
  Field t(img.width(), img.height());
  auto mean = st.mean.pixels();
  auto var = st.variance.pixels();
  auto out = t.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mean[i] + p.k * std::sqrt(var[i]);
  return t;
}

/// Pixels strictly above the local threshold are gaps (1); the rest are yarn (0).
inline BinaryImage niblack_threshold(const GrayImage& img, const NiblackParams& params = {}) {
  const Field t = niblack_threshold_map(img, params);
  BinaryImage out(img.width(), img.height(), 0, img.scale());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.set(x, y, static_cast<double>(img(x, y)) > t(x, y) ? 1 : 0);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Connected components
// ---------------------------------------------------------------------------

struct Component {
  int label = 0;
  std::uint8_t value = 0;
  std::int64_t area = 0;
  Rect bbox;
  double sum_x = 0.0;
  double sum_y = 0.0;
  bool touches_border = false;
};

struct Labeling {
  Raster<int> labels;  // -1 for pixels outside every component
  std::vector<Component> components;
};

/// 8-connected labelling of the pixels for which `member(x, y)` holds.
/// Pixels of the same `value(x, y)` join; label ids index `components`.
template <typename Member, typename Value>
Labeling label_components(int width, int height, Member member, Value value) {
  Labeling out{Raster<int>(width, height, -1), {}};
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < height; ++y0) {
    for (int x0 = 0; x0 < width; ++x0) {
      if (out.labels(x0, y0) >= 0 || !member(x0, y0)) continue;
      const int id = static_cast<int>(out.components.size());
      Component c;
      c.label = id;
      c.value = value(x0, y0);
      int min_x = x0, max_x = x0, min_y = y0, max_y = y0;
      out.labels(x0, y0) = id;
      stack.assign(1, {x0, y0});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++c.area;
        c.sum_x += x;
        c.sum_y += y;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
        if (x == 0 || y == 0 || x == width - 1 || y == height - 1) c.touches_border = true;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
            if (out.labels(nx, ny) >= 0 || !member(nx, ny) || value(nx, ny) != c.value) continue;
            out.labels(nx, ny) = id;
            stack.emplace_back(nx, ny);
          }
        }
      }
      c.bbox = Rect{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
      out.components.push_back(c);
    }
  }
  return out;
}

inline Labeling label_binary(const BinaryImage& img) {
  return label_components(
      img.width(), img.height(), [](int, int) { return true; },
      [&img](int x, int y) { return img(x, y); });
}

/// Flips every 8-connected component of either polarity whose area is at most
/// `max_area` to the surrounding polarity. Small 0-components are filled first,
/// then small 1-components; the result is a fixed point of the operation.
/// A component covering the whole image is never flipped.
inline BinaryImage remove_small_components(const BinaryImage& img, std::int64_t max_area = 9) {
  if (max_area < 0) throw Error(ErrorCode::InvalidParams, "max_area must be >= 0");
  BinaryImage out = img;
  if (max_area == 0) return out;
  for (std::uint8_t polarity : {std::uint8_t{0}, std::uint8_t{1}}) {
    const Labeling lab = label_binary(out);
    if (lab.components.size() < 2) break;
    std::vector<bool> flip(lab.components.size(), false);
    bool any = false;
    for (const auto& c : lab.components) {
      if (c.value == polarity && c.area <= max_area) {
        flip[c.label] = true;
        any = true;
      }
    }
    if (!any) continue;
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        if (flip[lab.labels(x, y)]) out.flip(x, y);
      }
    }
  }
  return out;
}

}  // namespace fabric::imgcore
