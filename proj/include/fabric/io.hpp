#pragma once

#include <png.h>

#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fabric/error.hpp"
#include "fabric/image.hpp"
#include "fabric/imgcore.hpp"

namespace fabric::io {

namespace detail {

inline bool has_extension(const std::filesystem::path& path, std::string_view ext) {
  std::string e = path.extension().string();
  for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e == ext;
}

inline bool is_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[2] = {};
  in.read(magic, 2);
  return in.gcount() == 2 && magic[0] == 'P' && magic[1] == '5';
}

inline void skip_ws_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline int read_header_int(std::istream& in) {
  skip_ws_and_comments(in);
  int v = -1;
  in >> v;
  if (!in) throw Error(ErrorCode::Io, "malformed PGM header");
  return v;
}

}  // namespace detail

inline GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') throw Error(ErrorCode::Io, "not a binary PGM: " + path.string());
  const int w = detail::read_header_int(in);
  const int h = detail::read_header_int(in);
  const int maxval = detail::read_header_int(in);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
    throw Error(ErrorCode::Io, "unsupported PGM geometry or depth: " + path.string());
  }
  in.get();  // single whitespace before the raster
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw Error(ErrorCode::Io, "truncated PGM raster: " + path.string());
  }
  if (maxval != 255) {
    for (auto& v : data) v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  }
  return GrayImage(w, h, std::move(data));
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()), static_cast<std::streamsize>(img.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

inline RgbImage read_png_rgb(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw Error(ErrorCode::Io, "cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::Io, "cannot decode PNG " + path.string() + ": " + msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  RgbImage out(w, h);
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = Rgb{buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
  return out;
}

inline void write_png_raw(const std::filesystem::path& path, int width, int height,
                          std::uint32_t format, const void* data) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, data, 0, nullptr)) {
    throw Error(ErrorCode::Io, "cannot write PNG " + path.string() + ": " + image.message);
  }
}

inline void write_png(const std::filesystem::path& path, const GrayImage& img) {
  write_png_raw(path, img.width(), img.height(), PNG_FORMAT_GRAY, img.pixels().data());
}

/// Binary images serialize as 0 -> black, 1 -> white.
inline void write_png(const std::filesystem::path& path, const BinaryImage& img) {
  std::vector<std::uint8_t> buf(img.size());
  auto px = img.pixels();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = px[i] ? 255 : 0;
  write_png_raw(path, img.width(), img.height(), PNG_FORMAT_GRAY, buf.data());
}

inline void write_png(const std::filesystem::path& path, const RgbImage& img) {
  static_assert(sizeof(Rgb) == 3);
  write_png_raw(path, img.width(), img.height(), PNG_FORMAT_RGB, img.pixels().data());
}

inline void write_pgm(const std::filesystem::path& path, const BinaryImage& img) {
  std::vector<std::uint8_t> buf(img.size());
  auto px = img.pixels();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = px[i] ? 255 : 0;
  write_pgm(path, GrayImage(img.width(), img.height(), std::move(buf)));
}

/// Reads a PNG (any colour type, converted with Rec.601 luma) or a binary PGM.
inline GrayImage read_gray(const std::filesystem::path& path,
                           std::optional<double> scale = std::nullopt) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, "no such file: " + path.string());
  GrayImage img = detail::is_pgm(path) ? read_pgm(path) : imgcore::to_grayscale(read_png_rgb(path));
  img.set_scale(scale);
  return img;
}

inline RgbImage read_rgb(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, "no such file: " + path.string());
  if (detail::is_pgm(path)) {
    const GrayImage g = read_pgm(path);
    RgbImage out(g.width(), g.height());
    for (int y = 0; y < g.height(); ++y)
      for (int x = 0; x < g.width(); ++x) out(x, y) = Rgb{g(x, y), g(x, y), g(x, y)};
    return out;
  }
  return read_png_rgb(path);
}

/// Chooses the encoder from the extension: ".pgm" writes PGM, anything else PNG.
template <typename Img>
void write_image(const std::filesystem::path& path, const Img& img) {
  if constexpr (std::is_same_v<Img, RgbImage>) {
    write_png(path, img);
  } else {
    if (detail::has_extension(path, ".pgm")) {
      write_pgm(path, img);
    } else {
      write_png(path, img);
    }
  }
}

}  // namespace fabric::io
