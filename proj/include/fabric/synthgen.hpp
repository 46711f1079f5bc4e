#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "fabric/error.hpp"
#include "fabric/image.hpp"
#include "fabric/weave.hpp"

namespace fabric::synthgen {

struct Levels {
  std::uint8_t warp = 0;
  std::uint8_t weft = 0;
  std::uint8_t gap = 0;
};

/// Reflected light: yarns bright, gaps dark. Transmitted: gaps brightest.
constexpr Levels default_levels(Illumination mode) {
  return mode == Illumination::Reflected ? Levels{200, 150, 30} : Levels{40, 90, 230};
}

struct SynthSpec {
  double warp_density = 30.0;  // threads/cm
  double weft_density = 30.0;
  double warp_width_mm = 0.2;
  double weft_width_mm = 0.2;
  weave::BoolMatrix tile = weave::plain_tile();
  double scale = 0.002;  // cm/pixel
  Illumination illumination = Illumination::Reflected;
  double noise_sigma = 0.0;
  Levels levels = default_levels(Illumination::Reflected);
  std::uint64_t seed = 0;
  int width = 512;
  int height = 384;
  double phase_x = 0.0;  // px offset of the first warp yarn
  double phase_y = 0.0;  // px offset of the first weft yarn

  double warp_pitch_px() const { return 1.0 / (warp_density * scale); }
  double weft_pitch_px() const { return 1.0 / (weft_density * scale); }
  double warp_width_px() const { return warp_width_mm / (10.0 * scale); }
  double weft_width_px() const { return weft_width_mm / (10.0 * scale); }
};

/// Spec whose yarn widths are `fill` times the pitch and whose levels follow
/// the illumination mode.
inline SynthSpec make_spec(double warp_density, double weft_density, weave::BoolMatrix tile, double scale,
                           Illumination mode, double fill = 0.45) {
  SynthSpec s;
  s.warp_density = warp_density;
  s.weft_density = weft_density;
  s.tile = std::move(tile);
  s.scale = scale;
  s.illumination = mode;
  s.levels = default_levels(mode);
  s.warp_width_mm = fill * 10.0 / warp_density;
  s.weft_width_mm = fill * 10.0 / weft_density;
  return s;
}

inline void validate(const SynthSpec& s) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(s.warp_density) || !positive(s.weft_density)) {
    throw Error(ErrorCode::InvalidSpec, "densities must be positive");
  }
  if (!positive(s.scale)) throw Error(ErrorCode::InvalidSpec, "scale must be positive");
  if (!positive(s.warp_width_mm) || !positive(s.weft_width_mm)) {
    throw Error(ErrorCode::InvalidSpec, "yarn widths must be positive");
  }
  if (s.warp_width_px() >= s.warp_pitch_px() || s.weft_width_px() >= s.weft_pitch_px()) {
    throw Error(ErrorCode::InvalidSpec, "yarn width must be smaller than the yarn spacing");
  }
  if (s.tile.empty()) throw Error(ErrorCode::InvalidSpec, "empty weave tile");
  const Levels& l = s.levels;
  if (l.warp == l.weft || l.warp == l.gap || l.weft == l.gap) {
    throw Error(ErrorCode::InvalidSpec, "warp, weft and gap levels must be distinct");
  }
  const bool gap_brightest = l.gap > l.warp && l.gap > l.weft;
  const bool gap_darkest = l.gap < l.warp && l.gap < l.weft;
  if (s.illumination == Illumination::Transmitted && !gap_brightest) {
    throw Error(ErrorCode::InvalidSpec, "transmitted light needs the gap level brightest");
  }
  if (s.illumination == Illumination::Reflected && !gap_darkest) {
    throw Error(ErrorCode::InvalidSpec, "reflected light needs the gap level darkest");
  }
  if (!(s.noise_sigma >= 0.0) || !std::isfinite(s.noise_sigma)) {
    throw Error(ErrorCode::InvalidSpec, "noise sigma must be >= 0");
  }
  if (s.width < 1 || s.height < 1) throw Error(ErrorCode::InvalidSpec, "image dimensions must be >= 1");
}

namespace detail {

/// Index of the yarn covering coordinate `c` (pixel centre), or -1 in a gap.
inline long yarn_index(double c, double phase, double pitch, double width) {
  const double t = c - phase;
  const double k = std::floor(t / pitch);
  return t - k * pitch < width ? static_cast<long>(k) : -1;
}

enum class Top { Tile, Warp, Weft };

inline std::uint8_t noiseless_pixel(const SynthSpec& s, int x, int y, Top top = Top::Tile) {
  const long j = yarn_index(x + 0.5, s.phase_x, s.warp_pitch_px(), s.warp_width_px());
  const long i = yarn_index(y + 0.5, s.phase_y, s.weft_pitch_px(), s.weft_width_px());
  if (j < 0 && i < 0) return s.levels.gap;
  if (i < 0) return s.levels.warp;
  if (j < 0) return s.levels.weft;
  bool warp_over;
  switch (top) {
    case Top::Warp: warp_over = true; break;
    case Top::Weft: warp_over = false; break;
    default: warp_over = s.tile.wrapped(static_cast<int>(i % s.tile.rows()), static_cast<int>(j % s.tile.cols()));
  }
  return warp_over ? s.levels.warp : s.levels.weft;
}

}  // namespace detail

/// Flat-topped yarn model. Pixel centres decide stripe membership; at each
/// crossing tile(i mod rows, j mod cols) true puts the warp level on top.
inline GrayImage render_fabric(const SynthSpec& s) {
  validate(s);
  GrayImage img(s.width, s.height, 0, s.scale);
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> noise(0.0, s.noise_sigma > 0.0 ? s.noise_sigma : 1.0);
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      double v = detail::noiseless_pixel(s, x, y);
      if (s.noise_sigma > 0.0) v += noise(rng);
      img(x, y) = clamp_round(v);
    }
  }
  return img;
}

enum class DefectKind { Hole, Stain, Slub, Float };

constexpr std::string_view to_string(DefectKind k) {
  switch (k) {
    case DefectKind::Hole: return "hole";
    case DefectKind::Stain: return "stain";
    case DefectKind::Slub: return "slub";
    case DefectKind::Float: return "float";
  }
  return "hole";
}

struct InjectedDefect {
  GrayImage image;
  BinaryImage mask;  // 1 inside the defect region
};

/// Hole: gap level. Stain: darkened by `level`. Slub: thickened yarn (weft
/// level). Float: warp forced on top at every crossing in the region.
inline InjectedDefect inject_defect(const SynthSpec& spec, const GrayImage& img, DefectKind kind,
                                    const Rect& region, int level = 0) {
  if (region.width < 1 || region.height < 1 || region.x < 0 || region.y < 0 ||
      region.right() > img.width() || region.bottom() > img.height()) {
    throw Error(ErrorCode::InvalidRegion, "defect region outside the image");
  }
  InjectedDefect out{img, BinaryImage(img.width(), img.height(), 0, img.scale())};
  for (int y = region.y; y < region.bottom(); ++y) {
    for (int x = region.x; x < region.right(); ++x) {
      out.mask.set(x, y, 1);
      std::uint8_t& p = out.image(x, y);
      switch (kind) {
        case DefectKind::Hole: p = spec.levels.gap; break;
        case DefectKind::Stain: p = clamp_round(static_cast<double>(p) - level); break;
        case DefectKind::Slub: p = spec.levels.weft; break;
        case DefectKind::Float: p = detail::noiseless_pixel(spec, x, y, detail::Top::Warp); break;
      }
    }
  }
  return out;
}

}  // namespace fabric::synthgen
