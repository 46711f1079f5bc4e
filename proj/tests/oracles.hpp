#pragma once

// Slow, direct reference implementations used to cross-check the library.
// They deliberately share no code with include/fabric beyond the image types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "fabric/image.hpp"

namespace oracle {

using fabric::GrayImage;

inline GrayImage random_gray(int w, int h, std::uint64_t seed, int lo = 0, int hi = 255) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(lo, hi);
  GrayImage img(w, h);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(d(rng));
  return img;
}

// Exhaustive Otsu in exact integer arithmetic. The between-class variance
// for split t is proportional to (N*S0 - n0*S)^2 / (n0*n1); candidates are
// compared by cross-multiplication so there is no rounding at all.
inline int otsu_exhaustive(const GrayImage& img) {
  std::int64_t n = 0, s = 0;
  std::vector<std::int64_t> h(256, 0);
  for (auto v : img.pixels()) {
    ++h[v];
    ++n;
    s += v;
  }
  int best_t = -1;
  __int128 best_num = -1, best_den = 1;
  for (int t = 0; t < 255; ++t) {
    std::int64_t n0 = 0, s0 = 0;
    for (int v = 0; v <= t; ++v) {
      n0 += h[v];
      s0 += h[v] * v;
    }
    const std::int64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const __int128 diff = static_cast<__int128>(n) * s0 - static_cast<__int128>(n0) * s;
    const __int128 num = diff * diff;
    const __int128 den = static_cast<__int128>(n0) * n1;
    if (best_t < 0 || num * best_den > best_num * den) {
      best_t = t;
      best_num = num;
      best_den = den;
    }
  }
  return best_t;
}

inline int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
  return i;
}

struct Window {
  double mean;
  double var;  // population
};

// Two-pass mean/variance over the window anchored like the library: the
// first sample sits size/2 before the centre.
inline Window window_stats(const GrayImage& img, int cx, int cy, int ww, int wh) {
  std::vector<double> vals;
  for (int dy = 0; dy < wh; ++dy)
    for (int dx = 0; dx < ww; ++dx)
      vals.push_back(img(mirror(cx - ww / 2 + dx, img.width()), mirror(cy - wh / 2 + dy, img.height())));
  double m = 0;
  for (double v : vals) m += v;
  m /= static_cast<double>(vals.size());
  double q = 0;
  for (double v : vals) q += (v - m) * (v - m);
  return {m, q / static_cast<double>(vals.size())};
}

inline double niblack_t(const GrayImage& img, int x, int y, int ww, int wh, double k) {
  const Window s = window_stats(img, x, y, ww, wh);
  return s.mean + k * std::sqrt(s.var);
}

// Unrounded adaptive Wiener output at one pixel.
inline double wiener_value(const GrayImage& img, int x, int y, int ww, int wh, double v2) {
  const Window s = window_stats(img, x, y, ww, wh);
  if (s.var == 0.0) return s.mean;
  const double gain = std::max(0.0, s.var - v2) / std::max(s.var, v2);
  return s.mean + gain * (img(x, y) - s.mean);
}

// O(N^2) DFT with the unnormalized forward convention.
inline std::vector<std::complex<double>> dft2(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(w) * h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      std::complex<double> acc = 0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double ang = -2.0 * std::numbers::pi * (static_cast<double>(u) * x / w + static_cast<double>(v) * y / h);
          acc += static_cast<double>(img(x, y)) * std::polar(1.0, ang);
        }
      out[static_cast<std::size_t>(v) * w + u] = acc;
    }
  return out;
}

struct Run {
  int value, start, end;
};

inline std::vector<Run> runs_of(const std::vector<std::uint8_t>& line) {
  std::vector<Run> r;
  for (int i = 0; i < static_cast<int>(line.size()); ++i) {
    if (r.empty() || r.back().value != line[i])
      r.push_back({line[i], i, i});
    else
      r.back().end = i;
  }
  return r;
}

struct LineCount {
  int n = 0, sp = -1, ep = -1;
};

// Standard-line rules phrased over the run list: SP opens the second run, EP
// closes the last complete run of the opposite value, N counts SP-value runs
// inside [SP, EP].
inline LineCount scan_runs(const std::vector<std::uint8_t>& line) {
  const auto r = runs_of(line);
  if (r.size() < 2) return {};
  const int n = static_cast<int>(line.size());
  const int sv = r[1].value;
  int last = -1;
  for (int k = 1; k < static_cast<int>(r.size()); ++k)
    if (r[k].value != sv && r[k].end < n - 1) last = k;
  if (last < 0) return {};
  LineCount c{0, r[1].start, r[last].end};
  for (int k = 1; k <= last; ++k) c.n += r[k].value == sv ? 1 : 0;
  return c;
}

}  // namespace oracle
