#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fabric/error.hpp"
#include "fabric/image.hpp"
#include "fabric/imgcore.hpp"

namespace fabric::wiener {

/// Neighbourhood of window_h rows by window_w columns and the noise variance v^2.
struct WienerParams {
  int window_w = 3;
  int window_h = 3;
  double noise_variance = 0.0;
};

/// Long window extent used by `decompose`; the short side is kShortWindow.
inline constexpr int kLongWindow = 60;
inline constexpr int kShortWindow = 5;

struct WindowDims {
  int width = 0;
  int height = 0;
};

/// Window that keeps the given yarn group: weft (horizontal yarns) averages
/// along rows with a 5-high x 60-wide window, warp uses 60-high x 5-wide.
constexpr WindowDims window_for(YarnAxis axis) {
  return axis == YarnAxis::Weft ? WindowDims{kLongWindow, kShortWindow}
                                : WindowDims{kShortWindow, kLongWindow};
}

/// Mean of the per-pixel local variances over the whole image.
inline double estimate_noise_variance(const GrayImage& img, WindowDims window) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  const auto st = imgcore::local_stats(img, window.width, window.height);
  double acc = 0.0;
  for (double v : st.variance.pixels()) acc += v;
  return std::max(0.0, acc / static_cast<double>(img.size()));
}

/// Adaptive Wiener gain with the negative-gain guard:
///   max(0, S^2 - v^2) / max(S^2, v^2)
inline double wiener_gain(double local_variance, double noise_variance) noexcept {
  const double denom = std::max(local_variance, noise_variance);
  if (denom <= 0.0) return 1.0;
  return std::max(0.0, local_variance - noise_variance) / denom;
}

inline GrayImage wiener_filter(const GrayImage& img, const WienerParams& p) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  if (p.window_w < 1 || p.window_h < 1) {
    throw Error(ErrorCode::InvalidParams, "Wiener window must be at least 1x1");
  }
  if (!(p.noise_variance >= 0.0) || !std::isfinite(p.noise_variance)) {
    throw Error(ErrorCode::InvalidParams, "noise variance must be finite and >= 0");
  }
  const auto st = imgcore::local_stats(img, p.window_w, p.window_h);
  GrayImage out(img.width(), img.height(), 0, img.scale());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double mu = st.mean(x, y);
      const double s2 = st.variance(x, y);
      const double l = img(x, y);
      double w;
      if (s2 <= 0.0) {
        w = mu;
      } else if (p.noise_variance == 0.0) {
        w = l;
      } else {
        w = mu + wiener_gain(s2, p.noise_variance) * (l - mu);
      }
      out(x, y) = clamp_round(w);
    }
  }
  return out;
}

struct DecomposeOptions {
  /// Apply histogram equalization to the filtered sub-image.
  bool equalize = true;
};

/// Wiener-filters with the axis-specific directional window (v^2 estimated from
/// the image itself) and equalizes the result. The output keeps one yarn group.
inline GrayImage decompose(const GrayImage& img, YarnAxis axis, DecomposeOptions opts = {}) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  const WindowDims win = window_for(axis);
  if (img.width() < win.width || img.height() < win.height) {
    throw Error(ErrorCode::ImageTooSmall, "image smaller than the directional Wiener window");
  }
  const double v2 = estimate_noise_variance(img, win);
  GrayImage filtered = wiener_filter(img, WienerParams{win.width, win.height, v2});
  return opts.equalize ? imgcore::histogram_equalize(filtered) : filtered;
}

struct Stripe {
  int start = 0;
  int end = 0;  // inclusive

  int width() const noexcept { return end - start + 1; }
  double center() const noexcept { return 0.5 * (start + end); }
  friend bool operator==(const Stripe&, const Stripe&) = default;
};

/// Yarn intervals across the yarn direction: columns for warp, rows for weft.
struct YarnOutlines {
  YarnAxis axis = YarnAxis::Warp;
  std::vector<Stripe> stripes;
  int image_extent = 0;
  std::optional<double> scale;
};

/// Fraction of foreground pixels a column (warp) or row (weft) needs to count as yarn.
inline constexpr double kOccupancyThreshold = 0.5;

/// Projects yarn (0) pixels across the yarn direction and returns the runs of
/// columns/rows whose foreground fraction reaches the occupancy threshold.
inline YarnOutlines extract_yarn_outlines(const BinaryImage& sub, YarnAxis axis) {
  if (sub.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  const bool warp = axis == YarnAxis::Warp;
  const int extent = warp ? sub.width() : sub.height();
  const int depth = warp ? sub.height() : sub.width();
  std::vector<int> counts(extent, 0);
  for (int y = 0; y < sub.height(); ++y) {
    for (int x = 0; x < sub.width(); ++x) {
      if (sub(x, y) == 0) ++counts[warp ? x : y];
    }
  }

  YarnOutlines out{axis, {}, extent, sub.scale()};
  int run_start = -1;
  for (int i = 0; i <= extent; ++i) {
    const bool yarn = i < extent && static_cast<double>(counts[i]) >= kOccupancyThreshold * depth;
    if (yarn && run_start < 0) run_start = i;
    if (!yarn && run_start >= 0) {
      out.stripes.push_back(Stripe{run_start, i - 1});
      run_start = -1;
    }
  }
  return out;
}

}  // namespace fabric::wiener
