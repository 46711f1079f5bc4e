#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fabric/error.hpp"
#include "fabric/image.hpp"
#include "fabric/wiener.hpp"

namespace fabric::metrics {

inline constexpr double kMmPerInch = 25.4;
inline constexpr double kTexTimesNe = 590.5;
/// Constant of the cotton diameter relation d = 1 / (28 sqrt(Ne)), d in inches.
inline constexpr double kDiameterConstant = 28.0;

namespace detail {

inline double require_scale(const wiener::YarnOutlines& o) {
  if (!o.scale) throw Error(ErrorCode::InvalidScale, "outlines carry no scale");
  return *o.scale;
}

/// Stripes cut by the image border underestimate the width; they are skipped
/// whenever at least one interior stripe exists.
inline std::vector<wiener::Stripe> measurable(const wiener::YarnOutlines& o) {
  std::vector<wiener::Stripe> inner;
  for (const auto& s : o.stripes) {
    if (s.start > 0 && s.end < o.image_extent - 1) inner.push_back(s);
  }
  return inner.empty() ? o.stripes : inner;
}

/// Three-class Otsu on the histogram; classes are v <= t1, t1 < v <= t2, v > t2.
inline std::array<double, 3> three_class_means(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (auto v : img.pixels()) hist[v] += 1.0;
  std::array<double, 257> n{}, s{};
  for (int i = 0; i < 256; ++i) {
    n[i + 1] = n[i] + hist[i];
    s[i + 1] = s[i] + i * hist[i];
  }
  auto term = [&](int a, int b) {
    const double c = n[b] - n[a];
    return c > 0.0 ? (s[b] - s[a]) * (s[b] - s[a]) / c : 0.0;
  };
  double best = -1.0;
  int t1 = 0, t2 = 1;
  for (int a = 0; a < 255; ++a)
    for (int b = a + 1; b < 256; ++b) {
      const double v = term(0, a + 1) + term(a + 1, b + 1) + term(b + 1, 256);
      if (v > best) {
        best = v;
        t1 = a;
        t2 = b;
      }
    }
  auto mean = [&](int a, int b) { return n[b] > n[a] ? (s[b] - s[a]) / (n[b] - n[a]) : NAN; };
  return {mean(0, t1 + 1), mean(t1 + 1, t2 + 1), mean(t2 + 1, 256)};
}

/// Splits scalars into two groups (Otsu over sorted positions) and returns the
/// midpoint of the group means.
inline double two_group_cut(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double total = [&] {
    double t = 0.0;
    for (double x : v) t += x;
    return t;
  }();
  const double n = static_cast<double>(v.size());
  double best = -1.0, cut = v.front(), left = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    left += v[i];
    if (v[i] == v[i + 1]) continue;
    const double n0 = static_cast<double>(i + 1), n1 = n - n0;
    const double m0 = left / n0, m1 = (total - left) / n1;
    const double between = n0 * n1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      cut = (m0 + m1) / 2.0;
    }
  }
  return cut;
}

}  // namespace detail

/// Yarn outlines for width measurement, taken from the undecomposed image.
/// Gap pixels are those nearer the gap class than the adjacent yarn class
/// (three-class split); a column (warp) or row (weft) is yarn when its gap
/// fraction falls in the lower of two groups. Smoothing would widen stripes,
/// so no filtering or speck removal is applied.
inline wiener::YarnOutlines gap_outlines(const GrayImage& img, YarnAxis axis, Illumination mode) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  const auto mu = detail::three_class_means(img);
  const bool bright_gaps = mode == Illumination::Transmitted;
  const double gap = bright_gaps ? mu[2] : mu[0];
  const double yarn = bright_gaps ? (std::isnan(mu[1]) ? mu[0] : mu[1]) : (std::isnan(mu[1]) ? mu[2] : mu[1]);
  if (std::isnan(gap) || std::isnan(yarn)) throw Error(ErrorCode::NoYarn, "image has a single intensity");
  const double level = (gap + yarn) / 2.0;

  const bool warp = axis == YarnAxis::Warp;
  const int extent = warp ? img.width() : img.height();
  const int depth = warp ? img.height() : img.width();
  std::vector<double> frac(extent, 0.0);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const bool is_gap = bright_gaps ? img(x, y) > level : img(x, y) < level;
      if (is_gap) frac[warp ? x : y] += 1.0;
    }
  for (double& f : frac) f /= depth;
  if (std::all_of(frac.begin(), frac.end(), [&](double f) { return f == frac.front(); })) {
    throw Error(ErrorCode::NoYarn, "no gap structure across the yarns");
  }
  const double cut = detail::two_group_cut(frac);

  wiener::YarnOutlines out{axis, {}, extent, img.scale()};
  int run_start = -1;
  for (int i = 0; i <= extent; ++i) {
    const bool is_yarn = i < extent && frac[i] < cut;
    if (is_yarn && run_start < 0) run_start = i;
    if (!is_yarn && run_start >= 0) {
      out.stripes.push_back(wiener::Stripe{run_start, i - 1});
      run_start = -1;
    }
  }
  return out;
}

/// Mean projected yarn width in mm.
inline double diameters_from_outlines(const wiener::YarnOutlines& o) {
  if (o.stripes.empty()) throw Error(ErrorCode::NoYarn, "no yarn outlines");
  const double scale = detail::require_scale(o);
  const auto stripes = detail::measurable(o);
  double acc = 0.0;
  for (const auto& s : stripes) acc += s.width();
  return acc / static_cast<double>(stripes.size()) * scale * 10.0;
}

/// Mean centre-to-centre distance in mm.
inline double spacing_from_outlines(const wiener::YarnOutlines& o) {
  if (o.stripes.size() < 2) throw Error(ErrorCode::InsufficientYarns, "spacing needs at least two yarns");
  const double scale = detail::require_scale(o);
  const double span = o.stripes.back().center() - o.stripes.front().center();
  return span / static_cast<double>(o.stripes.size() - 1) * scale * 10.0;
}

struct YarnCount {
  double ne = 0.0;   // English cotton count
  double tex = 0.0;  // g/km
};

/// Inverts d = 1 / (28 sqrt(Ne)); `diameter_in` in inches.
inline YarnCount count_ne_from_diameter(double diameter_in) {
  if (!(diameter_in > 0.0) || !std::isfinite(diameter_in)) {
    throw Error(ErrorCode::InvalidDiameter, "diameter must be positive");
  }
  const double root = 1.0 / (kDiameterConstant * diameter_in);
  const double ne = root * root;
  return {ne, kTexTimesNe / ne};
}

inline double diameter_from_ne(double ne) {
  if (!(ne > 0.0)) throw Error(ErrorCode::InvalidInput, "count must be positive");
  return 1.0 / (kDiameterConstant * std::sqrt(ne));
}

/// Pierce cover factor n / sqrt(Ne), n in threads per inch.
inline double cover_factor(double threads_per_inch, double ne) {
  if (!(threads_per_inch > 0.0) || !(ne > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "cover factor needs positive density and count");
  }
  return threads_per_inch / std::sqrt(ne);
}

struct FractionalCover {
  double value = 0.0;
  bool saturated = false;  // d > s: neighbouring yarns touch
};

inline FractionalCover fractional_cover(double diameter, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidSpacing, "spacing must be positive");
  if (!(diameter > 0.0)) throw Error(ErrorCode::InvalidDiameter, "diameter must be positive");
  const double r = diameter / spacing;
  return r > 1.0 ? FractionalCover{1.0, true} : FractionalCover{r, false};
}

/// Cw + Cf - Cw * Cf, evaluated as 1 - (1 - Cw)(1 - Cf) so that it is
/// symmetric and stays within [max(Cw, Cf), 1] under rounding.
inline double total_cover(double cw, double cf) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(cw) || !in_unit(cf)) throw Error(ErrorCode::InvalidFraction, "cover fractions must lie in [0, 1]");
  return std::clamp(1.0 - (1.0 - cw) * (1.0 - cf), std::max(cw, cf), 1.0);
}

struct AxisMetrics {
  double diameter_mm = 0.0;
  double spacing_mm = 0.0;
  double count_ne = 0.0;
  double count_tex = 0.0;
  double threads_per_inch = 0.0;
  double cover_factor = 0.0;  // Pierce
  FractionalCover cover_fractional;
  int yarns = 0;
};

struct FabricMetrics {
  AxisMetrics warp;
  AxisMetrics weft;
  double cover_total = 0.0;
};

inline AxisMetrics axis_metrics(const wiener::YarnOutlines& o) {
  AxisMetrics m;
  m.yarns = static_cast<int>(o.stripes.size());
  m.diameter_mm = diameters_from_outlines(o);
  m.spacing_mm = spacing_from_outlines(o);
  const YarnCount c = count_ne_from_diameter(m.diameter_mm / kMmPerInch);
  m.count_ne = c.ne;
  m.count_tex = c.tex;
  m.threads_per_inch = kMmPerInch / m.spacing_mm;
  m.cover_factor = cover_factor(m.threads_per_inch, m.count_ne);
  m.cover_fractional = fractional_cover(m.diameter_mm, m.spacing_mm);
  return m;
}

inline FabricMetrics fabric_metrics(const wiener::YarnOutlines& warp, const wiener::YarnOutlines& weft) {
  FabricMetrics f;
  f.warp = axis_metrics(warp);
  f.weft = axis_metrics(weft);
  f.cover_total = total_cover(f.warp.cover_fractional.value, f.weft.cover_fractional.value);
  return f;
}

}  // namespace fabric::metrics
