#include "thermoscan/thermogram.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <optional>

#include <json.hpp>

#include "thermoscan/png_io.hpp"

namespace thermoscan {
namespace {

static_assert(std::endian::native == std::endian::little, "TGRM I/O assumes a little-endian host");

constexpr char kMagic[4] = {'T', 'G', 'R', 'M'};
constexpr std::size_t kPreamble = 4 + 2 + 4;

std::string at_offset(std::size_t off) { return " at offset " + std::to_string(off); }

template <class T>
T read_le(std::span<const std::uint8_t> bytes, std::size_t off) {
  T v;
  std::memcpy(&v, bytes.data() + off, sizeof(T));
  return v;
}

template <class T>
void append_le(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

bool has_png_signature(std::span<const std::uint8_t> bytes, std::size_t off) {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return off + 8 <= bytes.size() && std::memcmp(bytes.data() + off, sig, 8) == 0;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Header {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Metadata meta;
};

std::uint32_t header_dim(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw Error(Errc::BadHeader, std::string("missing field '") + field + "'");
  const auto& v = j.at(field);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0 ||
      v.get<std::uint64_t>() > 65535) {
    throw Error(Errc::BadHeader, std::string("field '") + field + "' must be an integer in [1, 65535]");
  }
  return v.get<std::uint32_t>();
}

Header parse_header(std::span<const std::uint8_t> text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadHeader, std::string("header is not valid JSON") + at_offset(kPreamble) +
                                     ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::BadHeader, "header must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "width" && key != "height" && key != "temp_unit" && key != "meta") {
      throw Error(Errc::BadHeader, "unknown header field '" + key + "'");
    }
  }
  Header h;
  h.width = header_dim(j, "width");
  h.height = header_dim(j, "height");
  if (!j.contains("temp_unit") || j.at("temp_unit") != "celsius") {
    throw Error(Errc::BadHeader, "field 'temp_unit' must be \"celsius\"");
  }
  if (j.contains("meta")) {
    const auto& m = j.at("meta");
    if (!m.is_object()) throw Error(Errc::BadHeader, "field 'meta' must be an object");
    for (const auto& [key, value] : m.items()) {
      if (!value.is_string()) {
        throw Error(Errc::BadHeader, "field 'meta." + key + "' must be a string");
      }
      h.meta.emplace(key, value.get<std::string>());
    }
  }
  return h;
}

// Locates the PNG trailer. Returns the offset of the u32 PNG length field.
std::size_t locate_png_trailer(std::span<const std::uint8_t> bytes, std::size_t temps_off,
                               std::uint64_t expected_cells) {
  const std::size_t total = bytes.size();
  const std::uint64_t expected_len_off = temps_off + 4 * expected_cells;
  if (expected_len_off + 4 <= total) {
    const std::uint64_t png_len = read_le<std::uint32_t>(bytes, expected_len_off);
    if (expected_len_off + 4 + png_len == total) return expected_len_off;
  }
  // The declared shape does not fit. Look for a self-consistent layout with a
  // different number of temperature cells so the diagnostic can say so.
  for (std::size_t off = temps_off; off + 4 + 8 <= total; off += 4) {
    const std::uint64_t png_len = read_le<std::uint32_t>(bytes, off);
    if (off + 4 + png_len == total && has_png_signature(bytes, off + 4)) {
      throw Error(Errc::ShapeMismatch,
                  "header declares " + std::to_string(expected_cells) +
                      " temperature cells but the payload carries " +
                      std::to_string((off - temps_off) / 4) + at_offset(temps_off));
    }
  }
  if (expected_len_off + 4 > total) {
    throw Error(Errc::Truncated, "temperature payload or PNG length cut short" +
                                     at_offset(expected_len_off));
  }
  const std::uint64_t png_len = read_le<std::uint32_t>(bytes, expected_len_off);
  if (expected_len_off + 4 + png_len > total) {
    throw Error(Errc::Truncated, "PNG length " + std::to_string(png_len) + " exceeds remaining " +
                                     std::to_string(total - expected_len_off - 4) + " bytes" +
                                     at_offset(expected_len_off));
  }
  throw Error(Errc::TrailingBytes,
              std::to_string(total - (expected_len_off + 4 + png_len)) + " bytes after PNG" +
                  at_offset(expected_len_off + 4 + png_len));
}

VisualImage decode_visual(std::span<const std::uint8_t> png_bytes, std::size_t off,
                          std::uint32_t width, std::uint32_t height) {
  png::Decoded d;
  try {
    d = png::decode(png_bytes);
  } catch (const Error& e) {
    throw Error(Errc::BadPng, std::string("visual image") + at_offset(off) + ": " + e.what());
  }
  if (static_cast<std::uint32_t>(d.width) != width ||
      static_cast<std::uint32_t>(d.height) != height) {
    throw Error(Errc::ShapeMismatch, "visual PNG is " + std::to_string(d.width) + "x" +
                                         std::to_string(d.height) + " but header says " +
                                         std::to_string(width) + "x" + std::to_string(height));
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<float> rgb(n * 3);
  const auto scale = static_cast<float>(d.max_value());
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const std::uint16_t s = d.channels == 1 ? d.samples[i] : d.samples[i * 3 + c];
      rgb[i * 3 + c] = static_cast<float>(s) / scale;
    }
  }
  return VisualImage(static_cast<int>(width), static_cast<int>(height), std::move(rgb));
}

}  // namespace

VisualImage::VisualImage(int width, int height)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * height * kChannels, 0.0f) {
  if (width < 0 || height < 0) throw Error(Errc::ShapeMismatch, "negative image dimension");
}

VisualImage::VisualImage(int width, int height, std::vector<float> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
  if (width < 0 || height < 0) throw Error(Errc::ShapeMismatch, "negative image dimension");
  if (data_.size() != static_cast<std::size_t>(width) * height * kChannels) {
    throw Error(Errc::ShapeMismatch, "visual data length " + std::to_string(data_.size()) +
                                         " != " + std::to_string(width) + "x" +
                                         std::to_string(height) + "x3");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!(data_[i] >= 0.0f && data_[i] <= 1.0f)) {
      throw Error(Errc::InvalidParameter,
                  "visual sample " + std::to_string(i) + " outside [0,1]");
    }
  }
}

VisualImage VisualImage::from_rgb8(int width, int height, std::span<const std::uint8_t> rgb) {
  std::vector<float> data(rgb.size());
  for (std::size_t i = 0; i < rgb.size(); ++i) data[i] = static_cast<float>(rgb[i]) / 255.0f;
  return VisualImage(width, height, std::move(data));
}

void VisualImage::set(int row, int col, float r, float g, float b) noexcept {
  const std::size_t i = (static_cast<std::size_t>(row) * width_ + col) * kChannels;
  data_[i] = r;
  data_[i + 1] = g;
  data_[i + 2] = b;
}

std::vector<std::uint8_t> VisualImage::to_rgb8() const {
  std::vector<std::uint8_t> out(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(data_[i] * 255.0f));
  }
  return out;
}

std::string content_id(const VisualImage& visual, const TemperatureMatrix& temperature,
                       const Metadata& meta) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int32_t dims[2] = {visual.width(), visual.height()};
  h = fnv1a(h, dims, sizeof(dims));
  const auto rgb = visual.to_rgb8();
  h = fnv1a(h, rgb.data(), rgb.size());
  h = fnv1a(h, temperature.data().data(), temperature.size() * sizeof(float));
  for (const auto& [k, v] : meta) {
    h = fnv1a(h, k.data(), k.size());
    h = fnv1a(h, "\0", 1);
    h = fnv1a(h, v.data(), v.size());
    h = fnv1a(h, "\0", 1);
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "tg-%012llx",
                static_cast<unsigned long long>(h & 0xffffffffffffULL));
  return buf;
}

Thermogram::Thermogram(VisualImage visual, TemperatureMatrix temperature, Metadata meta)
    : visual_(std::move(visual)), temperature_(std::move(temperature)), meta_(std::move(meta)) {
  if (visual_.width() != temperature_.width() || visual_.height() != temperature_.height()) {
    throw Error(Errc::ShapeMismatch,
                "visual is " + std::to_string(visual_.width()) + "x" +
                    std::to_string(visual_.height()) + " but temperature is " +
                    std::to_string(temperature_.width()) + "x" +
                    std::to_string(temperature_.height()));
  }
  const auto it = meta_.find("id");
  id_ = it != meta_.end() ? it->second : content_id(visual_, temperature_, meta_);
}

Thermogram load_thermogram(std::span<const std::uint8_t> bytes, const LoadOptions& options) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(Errc::BadMagic, "expected \"TGRM\"" + at_offset(0));
  }
  if (bytes.size() < kPreamble) throw Error(Errc::Truncated, "preamble cut short" + at_offset(4));
  const auto version = read_le<std::uint16_t>(bytes, 4);
  if (version != kTgrmVersion) {
    throw Error(Errc::UnsupportedVersion, "version " + std::to_string(version) + at_offset(4));
  }
  const auto header_len = read_le<std::uint32_t>(bytes, 6);
  if (kPreamble + static_cast<std::uint64_t>(header_len) > bytes.size()) {
    throw Error(Errc::Truncated, "header length " + std::to_string(header_len) +
                                     " exceeds file" + at_offset(6));
  }
  const Header header = parse_header(bytes.subspan(kPreamble, header_len));

  const std::size_t temps_off = kPreamble + header_len;
  const std::uint64_t cells = static_cast<std::uint64_t>(header.width) * header.height;
  const std::size_t png_len_off = locate_png_trailer(bytes, temps_off, cells);

  TemperatureMatrix temps(static_cast<int>(header.width), static_cast<int>(header.height));
  std::memcpy(temps.values().data(), bytes.data() + temps_off, cells * sizeof(float));
  for (std::size_t i = 0; i < cells; ++i) {
    const float t = temps[i];
    const auto where = [&] {
      return "temperature[" + std::to_string(i / header.width) + "][" +
             std::to_string(i % header.width) + "]" + at_offset(temps_off + 4 * i);
    };
    if (!std::isfinite(t)) throw Error(Errc::NonFiniteTemperature, where());
    if (t < options.min_celsius || t > options.max_celsius) {
      throw Error(Errc::OutOfPhysicalRange, where() + " = " + std::to_string(t) + " outside [" +
                                                std::to_string(options.min_celsius) + ", " +
                                                std::to_string(options.max_celsius) + "]");
    }
  }

  const std::size_t png_off = png_len_off + 4;
  VisualImage visual = decode_visual(bytes.subspan(png_off), png_off, header.width, header.height);
  return Thermogram(std::move(visual), std::move(temps), header.meta);
}

std::vector<std::uint8_t> save_thermogram(const Thermogram& t) {
  nlohmann::json header = {
      {"width", t.width()},
      {"height", t.height()},
      {"temp_unit", "celsius"},
      {"meta", nlohmann::json::object()},
  };
  for (const auto& [k, v] : t.meta()) header["meta"][k] = v;
  const std::string text = header.dump();

  const auto rgb = t.visual().to_rgb8();
  const auto png_bytes = png::encode_rgb8(t.width(), t.height(), rgb);

  std::vector<std::uint8_t> out;
  out.reserve(kPreamble + text.size() + t.temperature().size() * 4 + 4 + png_bytes.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  append_le<std::uint16_t>(out, kTgrmVersion);
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  const auto* temps = reinterpret_cast<const std::uint8_t*>(t.temperature().data().data());
  out.insert(out.end(), temps, temps + t.temperature().size() * sizeof(float));
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(png_bytes.size()));
  out.insert(out.end(), png_bytes.begin(), png_bytes.end());
  return out;
}

}  // namespace thermoscan
