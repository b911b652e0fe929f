#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "toposnake/grid.hpp"

namespace toposnake {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 8-bit raster, row-major, `channels` samples per pixel (1 or 3).
struct Raster {
  std::size_t rows = 0;
  std::size_t cols = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Next header token of a PNM file, skipping whitespace and # comments.
inline std::string pnm_token(const std::vector<std::uint8_t>& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    const char c = static_cast<char>(buf[pos]);
    if (c == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < buf.size() && std::isspace(buf[pos]) == 0 && buf[pos] != '#') tok.push_back(static_cast<char>(buf[pos++]));
  if (tok.empty()) throw ImageIoError("truncated PGM header");
  return tok;
}

inline std::size_t pnm_number(const std::vector<std::uint8_t>& buf, std::size_t& pos) {
  const std::string tok = pnm_token(buf, pos);
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(tok, &used);
  } catch (const std::exception&) {
    throw ImageIoError("malformed PGM header field '" + tok + "'");
  }
  if (used != tok.size()) throw ImageIoError("malformed PGM header field '" + tok + "'");
  return v;
}

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() { png_destroy_read_struct(&png, info != nullptr ? &info : nullptr, nullptr); }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() { png_destroy_write_struct(&png, info != nullptr ? &info : nullptr); }
};

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};

}  // namespace detail

inline ScalarField raster_to_field(const Raster& r) {
  if (r.rows == 0 || r.cols == 0) throw ImageIoError("zero-size image");
  ScalarField f(GridDims(r.rows, r.cols));
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (r.channels == 1) {
      f[k] = r.data[k] / 255.0;
    } else {
      const double red = r.data[3 * k];
      const double grn = r.data[3 * k + 1];
      const double blu = r.data[3 * k + 2];
      // ITU-R BT.601 luma
      f[k] = (0.299 * red + 0.587 * grn + 0.114 * blu) / 255.0;
    }
  }
  return f;
}

/// Plain (P2) or raw (P5) 8-bit PGM.
inline Raster decode_pgm(const std::vector<std::uint8_t>& buf) {
  if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '2' && buf[1] != '5')) throw ImageIoError("not a P2/P5 PGM");
  const bool plain = buf[1] == '2';
  std::size_t pos = 2;
  Raster r;
  r.cols = detail::pnm_number(buf, pos);
  r.rows = detail::pnm_number(buf, pos);
  const std::size_t maxval = detail::pnm_number(buf, pos);
  if (r.rows == 0 || r.cols == 0) throw ImageIoError("zero-size image");
  if (maxval == 0 || maxval > 255) throw ImageIoError("only 8-bit PGM is supported");
  r.data.resize(r.rows * r.cols);
  if (plain) {
    for (auto& v : r.data) {
      const std::size_t x = detail::pnm_number(buf, pos);
      if (x > maxval) throw ImageIoError("PGM sample exceeds maxval");
      v = static_cast<std::uint8_t>(std::lround(255.0 * static_cast<double>(x) / static_cast<double>(maxval)));
    }
  } else {
    ++pos;  // single whitespace after maxval
    if (buf.size() < pos + r.data.size()) throw ImageIoError("truncated PGM raster");
    for (std::size_t k = 0; k < r.data.size(); ++k) {
      r.data[k] = static_cast<std::uint8_t>(
          std::lround(255.0 * static_cast<double>(buf[pos + k]) / static_cast<double>(maxval)));
    }
  }
  return r;
}

/// 8-bit grayscale or RGB PNG; palettes and alpha are expanded/stripped, 16-bit is reduced.
inline Raster read_png(const std::string& path) {
  std::unique_ptr<std::FILE, detail::FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw ImageIoError("cannot open " + path);
  std::array<unsigned char, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), fp.get()) != sig.size() || png_sig_cmp(sig.data(), 0, sig.size()) != 0) {
    throw ImageIoError("not a PNG: " + path);
  }
  detail::PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (g.png == nullptr) throw ImageIoError("libpng init failed");
  g.info = png_create_info_struct(g.png);
  if (g.info == nullptr) throw ImageIoError("libpng init failed");
  Raster r;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(g.png))) throw ImageIoError("corrupt or truncated PNG: " + path);
  png_init_io(g.png, fp.get());
  png_set_sig_bytes(g.png, static_cast<int>(sig.size()));
  png_read_info(g.png, g.info);
  const auto color = png_get_color_type(g.png, g.info);
  const auto depth = png_get_bit_depth(g.png, g.info);
  if (depth == 16) png_set_strip_16(g.png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(g.png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(g.png);
  if ((color & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(g.png);
  png_read_update_info(g.png, g.info);
  r.cols = png_get_image_width(g.png, g.info);
  r.rows = png_get_image_height(g.png, g.info);
  r.channels = png_get_channels(g.png, g.info);
  if (r.channels != 1 && r.channels != 3) throw ImageIoError("unsupported PNG channel layout");
  if (r.rows == 0 || r.cols == 0) throw ImageIoError("zero-size image");
  r.data.resize(r.rows * r.cols * static_cast<std::size_t>(r.channels));
  rows.resize(r.rows);
  for (std::size_t i = 0; i < r.rows; ++i) rows[i] = r.data.data() + i * r.cols * static_cast<std::size_t>(r.channels);
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
  return r;
}

inline void write_png(const std::string& path, const Raster& r) {
  if (r.channels != 1 && r.channels != 3) throw ImageIoError("write_png: 1 or 3 channels");
  std::unique_ptr<std::FILE, detail::FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw ImageIoError("cannot write " + path);
  detail::PngWriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (g.png == nullptr) throw ImageIoError("libpng init failed");
  g.info = png_create_info_struct(g.png);
  if (g.info == nullptr) throw ImageIoError("libpng init failed");
  std::vector<png_bytep> rows(r.rows);
  if (setjmp(png_jmpbuf(g.png))) throw ImageIoError("PNG write failed: " + path);
  png_init_io(g.png, fp.get());
  png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(r.cols), static_cast<png_uint_32>(r.rows), 8,
               r.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(g.png, g.info);
  for (std::size_t i = 0; i < r.rows; ++i) {
    rows[i] = const_cast<png_bytep>(r.data.data() + i * r.cols * static_cast<std::size_t>(r.channels));
  }
  png_write_image(g.png, rows.data());
  png_write_end(g.png, nullptr);
}

/// Grayscale PGM (P2/P5) or PNG, detected from the file signature; values in [0, 1].
inline ScalarField load_image(const std::string& path) {
  const auto buf = detail::read_file(path);
  if (buf.empty()) throw ImageIoError("empty file " + path);
  if (buf.size() >= 2 && buf[0] == 'P' && (buf[1] == '2' || buf[1] == '5')) return raster_to_field(decode_pgm(buf));
  if (buf.size() >= 8 && png_sig_cmp(buf.data(), 0, 8) == 0) return raster_to_field(read_png(path));
  throw ImageIoError("unsupported image format: " + path);
}

inline Raster field_to_gray(const ScalarField& f) {
  Raster r{f.rows(), f.cols(), 1, std::vector<std::uint8_t>(f.size())};
  for (std::size_t k = 0; k < f.size(); ++k) {
    r.data[k] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(f[k], 0.0, 1.0)));
  }
  return r;
}

inline void save_pgm(const std::string& path, const ScalarField& f) {
  const Raster r = field_to_gray(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot write " + path);
  out << "P5\n" << r.cols << ' ' << r.rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(r.data.data()), static_cast<std::streamsize>(r.data.size()));
  if (!out) throw ImageIoError("write failed: " + path);
}

/// Writes PNG or PGM depending on the extension (".pgm" selects PGM).
inline void save_image(const std::string& path, const ScalarField& f) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0) {
    save_pgm(path, f);
  } else {
    write_png(path, field_to_gray(f));
  }
}

/// Nonzero pixels white.
inline void save_mask_png(const std::string& path, const Mask& m) {
  Raster r{m.rows(), m.cols(), 1, std::vector<std::uint8_t>(m.size())};
  for (std::size_t k = 0; k < m.size(); ++k) r.data[k] = m[k] != 0 ? 255 : 0;
  write_png(path, r);
}

inline Mask load_mask(const std::string& path) {
  const ScalarField f = load_image(path);
  Mask m(f.dims());
  for (std::size_t k = 0; k < f.size(); ++k) m[k] = f[k] >= 0.5 ? 1 : 0;
  return m;
}

/// The image in gray with the contour drawn in red: inside pixels with an
/// outside 4-neighbour are marked.
inline void save_overlay_png(const std::string& path, const ScalarField& image, const ScalarField& phi) {
  require_same_dims(image.dims(), phi.dims(), "save_overlay_png");
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  Raster r{m, n, 3, std::vector<std::uint8_t>(3 * phi.size())};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i * n + j;
      const auto v = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(image[k], 0.0, 1.0)));
      bool edge = false;
      const bool in = phi[k] < 0.0;
      if (in) {
        if (i > 0 && phi(i - 1, j) >= 0.0) edge = true;
        if (i + 1 < m && phi(i + 1, j) >= 0.0) edge = true;
        if (j > 0 && phi(i, j - 1) >= 0.0) edge = true;
        if (j + 1 < n && phi(i, j + 1) >= 0.0) edge = true;
      }
      r.data[3 * k] = edge ? 255 : v;
      r.data[3 * k + 1] = edge ? 0 : v;
      r.data[3 * k + 2] = edge ? 0 : v;
    }
  }
  write_png(path, r);
}

}  // namespace toposnake
