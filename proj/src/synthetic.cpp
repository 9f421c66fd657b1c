#include "thermoscan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace thermoscan {
namespace {

struct Rect {
  int row0, col0, row1, col1;  // half-open
};

int image_width_of(const SyntheticSpec& s) {
  if (s.image_width) return *s.image_width;
  return 2 * s.margin + s.cols * s.module_width + std::max(0, s.cols - 1) * s.gap;
}

int image_height_of(const SyntheticSpec& s) {
  if (s.image_height) return *s.image_height;
  return 2 * s.margin + s.rows * s.module_height + std::max(0, s.rows - 1) * s.gap;
}

Rect module_rect(const SyntheticSpec& s, int index) {
  const int r = index / s.cols;
  const int c = index % s.cols;
  const int top = s.origin_row.value_or(s.margin) + r * (s.module_height + s.gap);
  const int left = s.origin_col.value_or(s.margin) + c * (s.module_width + s.gap);
  return {top, left, top + s.module_height, left + s.module_width};
}

Rect clip(const Rect& r, int width, int height) {
  return {std::clamp(r.row0, 0, height), std::clamp(r.col0, 0, width),
          std::clamp(r.row1, 0, height), std::clamp(r.col1, 0, width)};
}

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::SpecInvalid, what); }

double hot_spot_excess(const HotSpot& h, double local_row, double local_col) {
  const double dr = local_row - h.row;
  const double dc = local_col - h.col;
  return h.delta_c * std::exp(-std::numbers::ln2 * (dr * dr + dc * dc) / (h.radius * h.radius));
}

}  // namespace

void validate(const SyntheticSpec& s) {
  if (s.rows < 0 || s.cols < 0 || s.rows > 64 || s.cols > 64) invalid("rows/cols must be in [0, 64]");
  if (s.module_width < 4 || s.module_height < 4) invalid("module size must be at least 4x4");
  if (s.gap < 0 || s.margin < 0) invalid("gap and margin must be non-negative");
  if (s.image_width && *s.image_width < 1) invalid("image_width must be positive");
  if (s.image_height && *s.image_height < 1) invalid("image_height must be positive");
  const int w = image_width_of(s);
  const int h = image_height_of(s);
  if (w < 1 || h < 1 || w > 8192 || h > 8192) invalid("image size must be within [1, 8192]");
  if (!std::isfinite(s.noise_std_c) || s.noise_std_c < 0) invalid("noise_std_c must be >= 0");
  if (!std::isfinite(s.background_c) || !std::isfinite(s.module_c)) invalid("temperatures must be finite");
  const int modules = s.rows * s.cols;
  for (int i = 0; i < modules; ++i) {
    const Rect r = clip(module_rect(s, i), w, h);
    if (r.row0 >= r.row1 || r.col0 >= r.col1) {
      invalid("module " + std::to_string(i) + " lies entirely outside the image");
    }
  }
  double max_delta = 0;
  for (std::size_t k = 0; k < s.hot_spots.size(); ++k) {
    const HotSpot& hs = s.hot_spots[k];
    const std::string which = "hot_spots[" + std::to_string(k) + "]";
    if (hs.module < 0 || hs.module >= modules) invalid(which + ".module out of range");
    if (!(hs.row >= 0 && hs.row < s.module_height && hs.col >= 0 && hs.col < s.module_width)) {
      invalid(which + " center lies outside its module");
    }
    if (!(hs.delta_c > 0) || !std::isfinite(hs.delta_c)) invalid(which + ".delta_c must be > 0");
    if (!(hs.radius > 0) || !std::isfinite(hs.radius)) invalid(which + ".radius must be > 0");
    max_delta = std::max(max_delta, hs.delta_c);
  }
  const double lo = std::min(s.background_c, s.module_c) - 6 * s.noise_std_c;
  const double hi = std::max(s.background_c, s.module_c) + max_delta + 6 * s.noise_std_c;
  if (lo < -40.0 || hi > 200.0) invalid("temperatures would leave the plausible [-40, 200] C range");
}

SyntheticThermogram generate_synthetic(const SyntheticSpec& s) {
  validate(s);
  const int w = image_width_of(s);
  const int h = image_height_of(s);
  const int modules = s.rows * s.cols;

  std::vector<double> clean(static_cast<std::size_t>(w) * h, s.background_c);
  LabelMap truth(w, h);
  truth.label_count = modules;
  BinaryMask defects(w, h, 0);

  for (int m = 0; m < modules; ++m) {
    const Rect full = module_rect(s, m);
    const Rect r = clip(full, w, h);
    for (int row = r.row0; row < r.row1; ++row) {
      for (int col = r.col0; col < r.col1; ++col) {
        clean[static_cast<std::size_t>(row) * w + col] = s.module_c;
        truth.labels(row, col) = m + 1;
      }
    }
  }
  for (const HotSpot& hs : s.hot_spots) {
    const Rect full = module_rect(s, hs.module);
    const Rect r = clip(full, w, h);
    for (int row = r.row0; row < r.row1; ++row) {
      for (int col = r.col0; col < r.col1; ++col) {
        const double excess = hot_spot_excess(hs, row - full.row0, col - full.col0);
        clean[static_cast<std::size_t>(row) * w + col] += excess;
        if (excess > hs.delta_c / 2) defects(row, col) = 1;
      }
    }
  }

  TemperatureMatrix temps(w, h);
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> noise(0.0, s.noise_std_c > 0 ? s.noise_std_c : 1.0);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double n = s.noise_std_c > 0 ? noise(rng) : 0.0;
    temps[i] = static_cast<float>(clean[i] + n);
  }

  // Grayscale-with-warm-tint palette, monotone in temperature so hotter always
  // renders brighter. Quantized to 8 bits so the image survives TGRM storage.
  double max_delta = 0;
  for (const HotSpot& hs : s.hot_spots) max_delta = std::max(max_delta, hs.delta_c);
  const double lo = std::min(s.background_c, s.module_c) - 5.0;
  const double hi = std::max(s.background_c, s.module_c) + max_delta + 5.0;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  const auto q = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double v = std::clamp((static_cast<double>(temps[i]) - lo) / (hi - lo), 0.0, 1.0);
    rgb[i * 3 + 0] = q(1.2 * v);
    rgb[i * 3 + 1] = q(v);
    rgb[i * 3 + 2] = q(0.8 * v);
  }

  Metadata meta{{"source", "synthetic"}, {"seed", std::to_string(s.seed)}};
  return {Thermogram(VisualImage::from_rgb8(w, h, rgb), std::move(temps), std::move(meta)),
          std::move(truth), std::move(defects)};
}

namespace {

template <class T>
T take(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> take_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return take<T>(j, key, T{});
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  if (!j.is_object()) invalid(where + " must be a JSON object");
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) invalid("unknown field '" + key + "' in " + where);
  }
}

}  // namespace

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"rows", "cols", "module_width", "module_height", "gap", "margin", "origin_row",
                  "origin_col", "image_width", "image_height", "background_c", "module_c",
                  "hot_spots", "noise_std_c", "seed"},
                 "synthetic spec");
  SyntheticSpec s;
  s.rows = take(j, "rows", s.rows);
  s.cols = take(j, "cols", s.cols);
  s.module_width = take(j, "module_width", s.module_width);
  s.module_height = take(j, "module_height", s.module_height);
  s.gap = take(j, "gap", s.gap);
  s.margin = take(j, "margin", s.margin);
  s.origin_row = take_optional<int>(j, "origin_row");
  s.origin_col = take_optional<int>(j, "origin_col");
  s.image_width = take_optional<int>(j, "image_width");
  s.image_height = take_optional<int>(j, "image_height");
  s.background_c = take(j, "background_c", s.background_c);
  s.module_c = take(j, "module_c", s.module_c);
  s.noise_std_c = take(j, "noise_std_c", s.noise_std_c);
  s.seed = take(j, "seed", s.seed);
  if (j.contains("hot_spots")) {
    const auto& arr = j.at("hot_spots");
    if (!arr.is_array()) invalid("field 'hot_spots' must be an array");
    for (const auto& item : arr) {
      reject_unknown(item, {"module", "row", "col", "radius", "delta_c"}, "hot spot");
      HotSpot h;
      h.module = take(item, "module", h.module);
      h.row = take(item, "row", h.row);
      h.col = take(item, "col", h.col);
      h.radius = take(item, "radius", h.radius);
      h.delta_c = take(item, "delta_c", h.delta_c);
      s.hot_spots.push_back(h);
    }
  }
  validate(s);
  return s;
}

nlohmann::json to_json(const SyntheticSpec& s) {
  nlohmann::json j = {
      {"rows", s.rows},
      {"cols", s.cols},
      {"module_width", s.module_width},
      {"module_height", s.module_height},
      {"gap", s.gap},
      {"margin", s.margin},
      {"background_c", s.background_c},
      {"module_c", s.module_c},
      {"noise_std_c", s.noise_std_c},
      {"seed", s.seed},
      {"hot_spots", nlohmann::json::array()},
  };
  if (s.origin_row) j["origin_row"] = *s.origin_row;
  if (s.origin_col) j["origin_col"] = *s.origin_col;
  if (s.image_width) j["image_width"] = *s.image_width;
  if (s.image_height) j["image_height"] = *s.image_height;
  for (const HotSpot& h : s.hot_spots) {
    j["hot_spots"].push_back(
        {{"module", h.module}, {"row", h.row}, {"col", h.col}, {"radius", h.radius},
         {"delta_c", h.delta_c}});
  }
  return j;
}

}  // namespace thermoscan
