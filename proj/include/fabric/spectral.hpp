#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>

#include "fabric/error.hpp"
#include "fabric/image.hpp"

namespace fabric::spectral {

/// Complex DFT coefficients of an image. `centered` records whether DC sits at
/// (width/2, height/2) (after fft_shift) or at (0, 0).
struct ComplexSpectrum {
  Raster<std::complex<double>> coeffs;
  bool centered = false;
  std::optional<double> scale;

  int width() const noexcept { return coeffs.width(); }
  int height() const noexcept { return coeffs.height(); }
};

namespace detail {

// FFTW's planner is not thread-safe; execution of a private plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

struct FftwPlanDestroy {
  void operator()(fftw_plan_s* p) const noexcept {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

/// In-place unnormalized 2D DFT of a row-major buffer.
inline void transform(Raster<std::complex<double>>& data, int sign) {
  static_assert(sizeof(std::complex<double>) == sizeof(fftw_complex));
  const std::size_t n = data.size();
  std::unique_ptr<fftw_complex[], FftwFree> buf(fftw_alloc_complex(n));
  std::unique_ptr<fftw_plan_s, FftwPlanDestroy> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_2d(data.height(), data.width(), buf.get(), buf.get(), sign, FFTW_ESTIMATE));
  }
  if (!plan) throw Error(ErrorCode::InvalidState, "FFTW could not create a plan");
  std::copy(data.pixels().begin(), data.pixels().end(), reinterpret_cast<std::complex<double>*>(buf.get()));
  fftw_execute(plan.get());
  const auto* res = reinterpret_cast<const std::complex<double>*>(buf.get());
  std::copy(res, res + n, data.pixels().begin());
}

}  // namespace detail

/// Forward 2D DFT, unnormalized: F(u,v) = sum f(x,y) exp(-2 pi i (ux/W + vy/H)).
inline ComplexSpectrum fft2(const GrayImage& img) {
  if (img.empty()) throw Error(ErrorCode::InvalidInput, "empty image");
  Raster<std::complex<double>> data(img.width(), img.height());
  auto src = img.pixels();
  auto dst = data.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<double>(src[i]);
  detail::transform(data, FFTW_FORWARD);
  return ComplexSpectrum{std::move(data), false, img.scale()};
}

/// Forward transform of an arbitrary real field (same convention as fft2).
inline ComplexSpectrum fft2(const Field& field) {
  Raster<std::complex<double>> data(field.width(), field.height());
  auto src = field.pixels();
  auto dst = data.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
  detail::transform(data, FFTW_FORWARD);
  return ComplexSpectrum{std::move(data), false, std::nullopt};
}

/// Inverse transform with the 1/(W*H) factor. Requires natural layout.
inline Raster<std::complex<double>> ifft2(const ComplexSpectrum& spec) {
  if (spec.centered) throw Error(ErrorCode::InvalidState, "inverse transform needs natural layout");
  Raster<std::complex<double>> data = spec.coeffs;
  detail::transform(data, FFTW_BACKWARD);
  const double norm = 1.0 / static_cast<double>(data.size());
  for (auto& c : data.pixels()) c *= norm;
  return data;
}

namespace detail {

template <typename T>
Raster<T> roll(const Raster<T>& in, int dx, int dy) {
  const int w = in.width();
  const int h = in.height();
  Raster<T> out(w, h);
  for (int y = 0; y < h; ++y) {
    const int ty = (y + dy) % h;
    for (int x = 0; x < w; ++x) out((x + dx) % w, ty) = in(x, y);
  }
  return out;
}

}  // namespace detail

/// Exchanges quadrants 1<->3 and 2<->4. From natural layout DC moves to
/// (floor(W/2), floor(H/2)); from centred layout the exact inverse permutation
/// is applied, so shifting twice always restores the original on any size.
inline ComplexSpectrum fft_shift(const ComplexSpectrum& spec) {
  const int w = spec.width();
  const int h = spec.height();
  ComplexSpectrum out;
  out.scale = spec.scale;
  out.centered = !spec.centered;
  out.coeffs = spec.centered ? detail::roll(spec.coeffs, w - w / 2, h - h / 2)
                             : detail::roll(spec.coeffs, w / 2, h / 2);
  return out;
}

/// Natural-layout view of a spectrum in either layout.
inline ComplexSpectrum natural_layout(const ComplexSpectrum& spec) {
  return spec.centered ? fft_shift(spec) : spec;
}

inline ComplexSpectrum centered_layout(const ComplexSpectrum& spec) {
  return spec.centered ? spec : fft_shift(spec);
}

/// Amplitude spectrum M = sqrt(R^2 + I^2) per bin.
inline Field amplitude(const Raster<std::complex<double>>& coeffs) {
  Field out(coeffs.width(), coeffs.height());
  auto src = coeffs.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::hypot(src[i].real(), src[i].imag());
  return out;
}

inline Field amplitude(const ComplexSpectrum& spec) { return amplitude(spec.coeffs); }

/// StreM = log2(M + 1).
inline Field log_stretch(const Field& m) {
  Field out(m.width(), m.height());
  auto src = m.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!(src[i] >= 0.0)) throw Error(ErrorCode::InvalidInput, "amplitude must be non-negative");
    dst[i] = std::log2(src[i] + 1.0);
  }
  return out;
}

struct AmplitudeDisplay {
  GrayImage values;
  double t_min = 0.0;
  double t_max = 0.0;
};

/// TM = floor((StreM - Tmin) / (Tmax - Tmin) * 255 + 0.5). A constant field maps to 0.
inline AmplitudeDisplay rescale_display(const Field& s) {
  if (s.empty()) throw Error(ErrorCode::InvalidInput, "empty field");
  const auto [lo, hi] = std::minmax_element(s.pixels().begin(), s.pixels().end());
  AmplitudeDisplay out{GrayImage(s.width(), s.height()), *lo, *hi};
  if (!(out.t_max > out.t_min)) return out;
  const double range = out.t_max - out.t_min;
  auto src = s.pixels();
  auto dst = out.values.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double tm = std::floor((src[i] - out.t_min) / range * 255.0 + 0.5);
    dst[i] = static_cast<std::uint8_t>(std::clamp(tm, 0.0, 255.0));
  }
  return out;
}

/// Display image of an amplitude spectrum (centred, log-stretched, rescaled).
inline AmplitudeDisplay spectrum_display(const ComplexSpectrum& spec) {
  return rescale_display(log_stretch(amplitude(centered_layout(spec))));
}

/// 0/1 band mask in centred layout. Warp keeps the horizontal line through DC
/// plus `half_width` rows on either side (periodicity along x); weft keeps the
/// corresponding vertical band of columns.
struct FilterTemplate {
  Raster<std::uint8_t> mask;
  YarnAxis axis = YarnAxis::Warp;
  int half_width = 0;

  int width() const noexcept { return mask.width(); }
  int height() const noexcept { return mask.height(); }
  std::size_t ones() const {
    return static_cast<std::size_t>(std::count(mask.pixels().begin(), mask.pixels().end(), 1));
  }
};

inline constexpr int kDefaultBandHalfWidth = 3;

inline FilterTemplate band_template(int width, int height, YarnAxis axis,
                                    int half_width = kDefaultBandHalfWidth) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidParams, "template dims must be >= 1");
  if (half_width < 0) throw Error(ErrorCode::InvalidParams, "half_width must be >= 0");
  const bool warp = axis == YarnAxis::Warp;
  const int extent = warp ? height : width;
  const int center = extent / 2;
  if (center - half_width < 0 || center + half_width > extent - 1) {
    throw Error(ErrorCode::InvalidParams, "band half_width exceeds the image half-extent");
  }
  FilterTemplate tp{Raster<std::uint8_t>(width, height, 0), axis, half_width};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int d = warp ? y - center : x - center;
      if (d >= -half_width && d <= half_width) tp.mask(x, y) = 1;
    }
  }
  return tp;
}

/// Masks a centred spectrum, transforms back, and maps the modulus of the
/// inverse through log2(M+1) and the [0,255] rescale.
inline GrayImage reconstruct(const ComplexSpectrum& spec, const FilterTemplate& tp) {
  if (!spec.centered) {
    throw Error(ErrorCode::InvalidState, "reconstruct expects a centred spectrum");
  }
  if (spec.width() != tp.width() || spec.height() != tp.height()) {
    throw Error(ErrorCode::InvalidParams, "template and spectrum dimensions differ");
  }
  ComplexSpectrum masked = spec;
  auto c = masked.coeffs.pixels();
  auto m = tp.mask.pixels();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= static_cast<double>(m[i]);
  const auto spatial = ifft2(fft_shift(masked));
  GrayImage out = rescale_display(log_stretch(amplitude(spatial))).values;
  out.set_scale(spec.scale);
  return out;
}

}  // namespace fabric::spectral
