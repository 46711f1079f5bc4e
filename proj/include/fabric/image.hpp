#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fabric/error.hpp"

namespace fabric {

/// Dense row-major 2D buffer. Width and height are both >= 1 for any
/// non-default-constructed raster.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(ErrorCode::InvalidInput, "pixel buffer length does not match width x height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator()(int x, int y) { return data_[index(x, y)]; }

  std::span<const T> pixels() const noexcept { return data_; }
  std::span<T> pixels() noexcept { return data_; }

  std::span<const T> row(int y) const {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidInput, "image dimensions must be at least 1x1");
    }
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Field = Raster<double>;

inline void check_scale(std::optional<double> scale) {
  if (scale && !(*scale > 0.0 && std::isfinite(*scale))) {
    throw Error(ErrorCode::InvalidScale, "scale must be a positive cm/pixel value");
  }
}

/// 8-bit intensity image with an optional physical scale in cm/pixel.
class GrayImage : public Raster<std::uint8_t> {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0, std::optional<double> scale = std::nullopt)
      : Raster(width, height, fill), scale_(scale) {
    check_scale(scale_);
  }
  GrayImage(int width, int height, std::vector<std::uint8_t> data,
            std::optional<double> scale = std::nullopt)
      : Raster(width, height, std::move(data)), scale_(scale) {
    check_scale(scale_);
  }

  std::optional<double> scale() const noexcept { return scale_; }
  void set_scale(std::optional<double> scale) {
    check_scale(scale);
    scale_ = scale;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::optional<double> scale_;
};

/// Two-valued image: 0 = yarn (dark foreground), 1 = gap (light background).
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, std::uint8_t fill = 0, std::optional<double> scale = std::nullopt)
      : raster_(width, height, check_value(fill)), scale_(scale) {
    check_scale(scale_);
  }
  BinaryImage(int width, int height, std::vector<std::uint8_t> data,
              std::optional<double> scale = std::nullopt)
      : raster_(width, height, std::move(data)), scale_(scale) {
    check_scale(scale_);
    for (auto v : raster_.pixels()) check_value(v);
  }

  int width() const noexcept { return raster_.width(); }
  int height() const noexcept { return raster_.height(); }
  std::size_t size() const noexcept { return raster_.size(); }
  bool empty() const noexcept { return raster_.empty(); }

  std::uint8_t operator()(int x, int y) const { return raster_(x, y); }
  void set(int x, int y, std::uint8_t v) { raster_(x, y) = check_value(v); }
  void flip(int x, int y) { raster_(x, y) ^= 1U; }

  std::span<const std::uint8_t> pixels() const noexcept { return raster_.pixels(); }
  std::span<const std::uint8_t> row(int y) const { return raster_.row(y); }

  std::optional<double> scale() const noexcept { return scale_; }
  void set_scale(std::optional<double> scale) {
    check_scale(scale);
    scale_ = scale;
  }

  std::size_t count_ones() const {
    return static_cast<std::size_t>(std::count(raster_.pixels().begin(), raster_.pixels().end(), 1));
  }

  BinaryImage inverted() const {
    BinaryImage out = *this;
    for (auto& v : out.raster_.pixels()) v ^= 1U;
    return out;
  }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  static std::uint8_t check_value(std::uint8_t v) {
    if (v > 1) throw Error(ErrorCode::InvalidInput, "binary pixels must be 0 or 1");
    return v;
  }

  Raster<std::uint8_t> raster_;
  std::optional<double> scale_;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

using RgbImage = Raster<Rgb>;

enum class YarnAxis { Warp, Weft };

constexpr std::string_view to_string(YarnAxis axis) {
  return axis == YarnAxis::Warp ? "warp" : "weft";
}

/// Transmitted: backlit, gaps bright and yarns dark. Reflected: yarns bright.
enum class Illumination { Transmitted, Reflected };

constexpr std::string_view to_string(Illumination mode) {
  return mode == Illumination::Transmitted ? "transmitted" : "reflected";
}

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int right() const noexcept { return x + width; }
  int bottom() const noexcept { return y + height; }
  long long area() const noexcept { return static_cast<long long>(width) * height; }
  bool contains(double px, double py) const noexcept {
    return px >= x && py >= y && px <= right() - 1 && py <= bottom() - 1;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Mirror index without repeating the edge sample (…2 1 | 0 1 2 … n-1 | n-2 …).
inline int reflect101(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Offset of the first window sample relative to the centre pixel. Odd sizes
/// are symmetric; even sizes put the extra sample before the centre.
constexpr int window_lo(int size) noexcept { return -(size / 2); }

/// Exact 90-degree clockwise rotation (index permutation, no resampling).
template <typename Img>
Img rotate_cw(const Img& in) {
  const int w = in.width();
  const int h = in.height();
  Img out(h, w);
  for (int y = 0; y < w; ++y) {
    for (int x = 0; x < h; ++x) {
      out(x, y) = in(y, h - 1 - x);
    }
  }
  return out;
}

inline GrayImage rotate_cw(const GrayImage& in) {
  const int w = in.width();
  const int h = in.height();
  GrayImage out(h, w, 0, in.scale());
  for (int y = 0; y < w; ++y) {
    for (int x = 0; x < h; ++x) {
      out(x, y) = in(y, h - 1 - x);
    }
  }
  return out;
}

inline BinaryImage rotate_cw(const BinaryImage& in) {
  const int w = in.width();
  const int h = in.height();
  BinaryImage out(h, w, 0, in.scale());
  for (int y = 0; y < w; ++y) {
    for (int x = 0; x < h; ++x) {
      out.set(x, y, in(y, h - 1 - x));
    }
  }
  return out;
}

inline std::uint8_t clamp_round(double v) noexcept {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace fabric
