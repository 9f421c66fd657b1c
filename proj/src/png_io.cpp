#include "thermoscan/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace thermoscan::png {
namespace {

struct ErrorSlot {
  char message[256] = {0};
};

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
  auto* slot = static_cast<ErrorSlot*>(png_get_error_ptr(png));
  if (slot != nullptr) std::snprintf(slot->message, sizeof(slot->message), "%s", msg);
  std::longjmp(png_jmpbuf(png), 1);
}

void on_png_warning(png_structp, png_const_charp) {}

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

struct ReadCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void read_bytes(png_structp png, png_bytep out, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->size - cur->pos < length) png_error(png, "unexpected end of PNG stream");
  std::memcpy(out, cur->data + cur->pos, length);
  cur->pos += length;
}

// rows: pointers into caller-owned storage, one per image row.
Bytes encode_rows(int width, int height, int color_type, int bit_depth,
                  std::vector<png_bytep>& rows) {
  Bytes out;
  ErrorSlot slot;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &slot, on_png_error,
                                            on_png_warning);
  if (png == nullptr) throw Error(Errc::BadPng, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(Errc::BadPng, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::BadPng, slot.message);
  }
  png_set_write_fn(png, &out, append_bytes, flush_noop);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // samples are host little-endian
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void check_dims(int width, int height, std::size_t have, std::size_t per_pixel) {
  if (width <= 0 || height <= 0) throw Error(Errc::BadPng, "PNG dimensions must be positive");
  if (have != static_cast<std::size_t>(width) * height * per_pixel) {
    throw Error(Errc::ShapeMismatch, "PNG sample buffer does not match dimensions");
  }
}

}  // namespace

Bytes encode_rgb8(int width, int height, std::span<const std::uint8_t> rgb) {
  check_dims(width, height, rgb.size(), 3);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    rows[r] = const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(r) * width * 3);
  }
  return encode_rows(width, height, PNG_COLOR_TYPE_RGB, 8, rows);
}

Bytes encode_gray8(int width, int height, std::span<const std::uint8_t> gray) {
  check_dims(width, height, gray.size(), 1);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    rows[r] = const_cast<png_bytep>(gray.data() + static_cast<std::size_t>(r) * width);
  }
  return encode_rows(width, height, PNG_COLOR_TYPE_GRAY, 8, rows);
}

Bytes encode_gray16(int width, int height, std::span<const std::uint16_t> gray) {
  check_dims(width, height, gray.size(), 1);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    rows[r] = reinterpret_cast<png_bytep>(
        const_cast<std::uint16_t*>(gray.data() + static_cast<std::size_t>(r) * width));
  }
  return encode_rows(width, height, PNG_COLOR_TYPE_GRAY, 16, rows);
}

Decoded decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(Errc::BadPng, "missing PNG signature");
  }
  Decoded out;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> raw;
  ErrorSlot slot;
  ReadCursor cursor{bytes.data(), bytes.size(), 0};

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &slot, on_png_error,
                                           on_png_warning);
  if (png == nullptr) throw Error(Errc::BadPng, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(Errc::BadPng, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::BadPng, slot.message);
  }
  png_set_read_fn(png, &cursor, read_bytes);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.channels = static_cast<int>(png_get_channels(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);

  raw.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 r = 0; r < h; ++r) rows[r] = raw.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (out.channels == 2 || out.channels == 4) {
    throw Error(Errc::BadPng, "alpha channel could not be stripped");
  }
  const std::size_t count = static_cast<std::size_t>(w) * h * out.channels;
  out.samples.resize(count);
  if (out.bit_depth == 16) {
    std::memcpy(out.samples.data(), raw.data(), count * sizeof(std::uint16_t));
  } else {
    std::copy(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(count), out.samples.begin());
  }
  return out;
}

Bytes encode_gray(const GrayImage& g) {
  std::vector<std::uint8_t> q(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    q[i] = static_cast<std::uint8_t>(std::lround(std::clamp(g[i], 0.0f, 1.0f) * 255.0f));
  }
  return encode_gray8(g.width(), g.height(), q);
}

Bytes encode_mask(const BinaryMask& m) {
  std::vector<std::uint8_t> q(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) q[i] = m[i] ? 255 : 0;
  return encode_gray8(m.width(), m.height(), q);
}

std::string to_pgm(const GrayImage& g) {
  std::string out = "P5\n" + std::to_string(g.width()) + " " + std::to_string(g.height()) +
                    "\n255\n";
  for (float v : g.values()) {
    out.push_back(static_cast<char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::Io, "write failed for " + path.string());
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace thermoscan::png
