#include "thermoscan/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermoscan/imgproc.hpp"

namespace thermoscan {

namespace ip = imgproc;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(Errc::InvalidConfig, field + ": " + why);
}

void require_int(const std::string& field, int v, int lo, int hi) {
  if (v < lo || v > hi) {
    bad(field, "expected integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                   "], got " + std::to_string(v));
  }
}

void require_real(const std::string& field, double v, double lo, double hi, bool lo_open) {
  const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) && v <= hi;
  if (!ok) {
    bad(field, std::string("expected number in ") + (lo_open ? "(" : "[") + std::to_string(lo) +
                   ", " + std::to_string(hi) + "], got " + std::to_string(v));
  }
}

const char* shape_name(ElementShape s) { return s == ElementShape::Box ? "box" : "cross"; }

int read_int(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number_integer()) {
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 1e9) return static_cast<int>(d);
    }
    bad(field, "expected integer");
  }
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    bad(field, "integer out of range");
  }
  return static_cast<int>(x);
}

double read_real(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number()) bad(field, "expected number");
  return v.get<double>();
}

}  // namespace

void validate(const PipelineConfig& c) {
  require_int("dhe_smoothing_window", c.dhe_smoothing_window, 1, 255);
  if (c.dhe_smoothing_window % 2 == 0) bad("dhe_smoothing_window", "must be odd");
  require_int("dhe_min_partition_span", c.dhe_min_partition_span, 1, 256);
  require_int("clahe_tiles_x", c.clahe_tiles_x, 1, 256);
  require_int("clahe_tiles_y", c.clahe_tiles_y, 1, 256);
  require_real("clahe_clip_limit", c.clahe_clip_limit, 1.0, 256.0, false);
  require_real("gaussian_sigma", c.gaussian_sigma, 0.0, 64.0, true);
  require_int("structuring_element_size", c.structuring_element_size, 1, 101);
  if (c.structuring_element_size % 2 == 0) bad("structuring_element_size", "must be odd");
  require_real("marker_foreground_fraction", c.marker_foreground_fraction, 0.0, 1.0, true);
  if (c.marker_foreground_fraction >= 1.0) bad("marker_foreground_fraction", "must be below 1");
  require_int("background_dilation_iterations", c.background_dilation_iterations, 0, 1000);
  if (c.connectivity != 4 && c.connectivity != 8) bad("connectivity", "must be 4 or 8");
  require_real("min_module_area_fraction", c.min_module_area_fraction, 0.0, 1.0, false);
}

ip::StructuringElement structuring_element(const PipelineConfig& cfg) {
  if (cfg.structuring_element == ElementShape::Box) {
    return ip::StructuringElement::box(cfg.structuring_element_size);
  }
  return ip::StructuringElement::cross(cfg.structuring_element_size / 2);
}

nlohmann::json to_json(const PipelineConfig& c) {
  return {
      {"dhe_smoothing_window", c.dhe_smoothing_window},
      {"dhe_min_partition_span", c.dhe_min_partition_span},
      {"clahe_tiles_x", c.clahe_tiles_x},
      {"clahe_tiles_y", c.clahe_tiles_y},
      {"clahe_clip_limit", c.clahe_clip_limit},
      {"gaussian_sigma", c.gaussian_sigma},
      {"structuring_element", shape_name(c.structuring_element)},
      {"structuring_element_size", c.structuring_element_size},
      {"marker_foreground_fraction", c.marker_foreground_fraction},
      {"background_dilation_iterations", c.background_dilation_iterations},
      {"connectivity", c.connectivity},
      {"min_module_area_fraction", c.min_module_area_fraction},
      {"watershed_relief", "inverted_distance"},
  };
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "pipeline config must be a JSON object");
  PipelineConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "dhe_smoothing_window") {
      c.dhe_smoothing_window = read_int(v, key);
    } else if (key == "dhe_min_partition_span") {
      c.dhe_min_partition_span = read_int(v, key);
    } else if (key == "clahe_tiles_x") {
      c.clahe_tiles_x = read_int(v, key);
    } else if (key == "clahe_tiles_y") {
      c.clahe_tiles_y = read_int(v, key);
    } else if (key == "clahe_clip_limit") {
      c.clahe_clip_limit = read_real(v, key);
    } else if (key == "gaussian_sigma") {
      c.gaussian_sigma = read_real(v, key);
    } else if (key == "structuring_element") {
      if (v == "box") {
        c.structuring_element = ElementShape::Box;
      } else if (v == "cross") {
        c.structuring_element = ElementShape::Cross;
      } else {
        bad(key, "expected \"box\" or \"cross\"");
      }
    } else if (key == "structuring_element_size") {
      c.structuring_element_size = read_int(v, key);
    } else if (key == "marker_foreground_fraction") {
      c.marker_foreground_fraction = read_real(v, key);
    } else if (key == "background_dilation_iterations") {
      c.background_dilation_iterations = read_int(v, key);
    } else if (key == "connectivity") {
      c.connectivity = read_int(v, key);
    } else if (key == "min_module_area_fraction") {
      c.min_module_area_fraction = read_real(v, key);
    } else if (key == "watershed_relief") {
      if (v != "inverted_distance") bad(key, "only \"inverted_distance\" is supported");
    } else {
      bad(key, "unknown key");
    }
  }
  validate(c);
  return c;
}

GrayImage enhance(const GrayImage& gray, const PipelineConfig& cfg) {
  const GrayImage a = ip::dhe(gray, cfg.dhe_smoothing_window, cfg.dhe_min_partition_span);
  const GrayImage b = ip::clahe(a, cfg.clahe_tiles_x, cfg.clahe_tiles_y, cfg.clahe_clip_limit);
  return ip::gaussian_blur(b, cfg.gaussian_sigma);
}

LabelMap build_markers(const BinaryMask& opened, const PipelineConfig& cfg) {
  const auto conn = static_cast<ip::Connectivity>(cfg.connectivity);
  const DistanceField dt = ip::distance_transform(opened);
  const LabelMap comps = ip::connected_components(opened, conn);
  std::vector<double> peak(static_cast<std::size_t>(comps.label_count) + 1, 0.0);
  for (std::size_t i = 0; i < dt.size(); ++i) {
    const int l = comps.labels[i];
    if (l > 0) peak[l] = std::max(peak[l], dt[i]);
  }
  BinaryMask sure(opened.width(), opened.height(), 0);
  for (std::size_t i = 0; i < dt.size(); ++i) {
    const int l = comps.labels[i];
    if (l > 0 && dt[i] > 0.0 && dt[i] >= cfg.marker_foreground_fraction * peak[l]) sure[i] = 1;
  }
  return ip::connected_components(sure, conn);
}

std::vector<Point> trace_boundary(const LabelMap& labels, int label) {
  // Clockwise in image coordinates (row grows downwards), starting west.
  static constexpr int kDr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  static constexpr int kDc[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  const auto inside = [&](int r, int c) {
    return labels.labels.in_bounds(r, c) && labels(r, c) == label;
  };

  Point start{-1, -1};
  for (int r = 0; r < labels.height() && start.row < 0; ++r) {
    for (int c = 0; c < labels.width(); ++c) {
      if (labels(r, c) == label) {
        start = {r, c};
        break;
      }
    }
  }
  if (start.row < 0) throw Error(Errc::LabelNotFound, "label " + std::to_string(label));

  std::vector<Point> contour{start};
  Point p = start;
  int back = 0;  // direction from p to the last background pixel examined
  Point second{-1, -1};
  for (;;) {
    int d = -1;
    for (int i = 1; i <= 8; ++i) {
      const int k = (back + i) % 8;
      if (inside(p.row + kDr[k], p.col + kDc[k])) {
        d = k;
        break;
      }
    }
    if (d < 0) return contour;  // isolated pixel
    const Point q{p.row + kDr[d], p.col + kDc[d]};
    if (p == start && second.row >= 0 && q == second) break;
    if (second.row < 0) second = q;
    const int pb = (d + 7) % 8;
    const int br = p.row + kDr[pb] - q.row;
    const int bc = p.col + kDc[pb] - q.col;
    for (int k = 0; k < 8; ++k) {
      if (kDr[k] == br && kDc[k] == bc) back = k;
    }
    contour.push_back(q);
    p = q;
  }
  return contour;
}

SegmentationResult segment_modules(const Thermogram& t, const PipelineConfig& cfg,
                                   bool keep_stages) {
  validate(cfg);
  const int w = t.width();
  const int h = t.height();

  StageSnapshots st;
  st.gray = ip::to_grayscale(t.visual());
  st.dhe = ip::dhe(st.gray, cfg.dhe_smoothing_window, cfg.dhe_min_partition_span);
  st.clahe = ip::clahe(st.dhe, cfg.clahe_tiles_x, cfg.clahe_tiles_y, cfg.clahe_clip_limit);
  st.enhanced = ip::gaussian_blur(st.clahe, cfg.gaussian_sigma);

  SegmentationResult res;
  res.config = cfg;
  res.otsu_threshold = ip::otsu_threshold(ip::histogram(st.enhanced));
  st.binary = ip::threshold_above_bin(st.enhanced, res.otsu_threshold);
  st.opened = ip::open(st.binary, structuring_element(cfg));

  const DistanceField dt = ip::distance_transform(st.opened);
  const double max_dt = dt.empty() ? 0.0 : *std::max_element(dt.values().begin(), dt.values().end());
  st.relief = GrayImage(w, h, 1.0f);
  if (max_dt > 0.0) {
    for (std::size_t i = 0; i < dt.size(); ++i) {
      st.relief[i] = static_cast<float>(1.0 - dt[i] / max_dt);
    }
  }
  st.flood_region = st.opened;
  const auto ring = ip::StructuringElement::box(3);
  for (int i = 0; i < cfg.background_dilation_iterations; ++i) {
    st.flood_region = ip::dilate(st.flood_region, ring);
  }
  st.markers = build_markers(st.opened, cfg);

  res.mask = BinaryMask(w, h, 0);
  res.labels = LabelMap(w, h);
  if (st.markers.label_count > 0) {
    st.watershed = ip::watershed(st.relief, st.markers, st.flood_region, true);

    const int n = st.watershed.label_count;
    std::vector<std::size_t> area(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t i = 0; i < st.opened.size(); ++i) {
      const int l = st.watershed.labels[i];
      if (l >= 1 && l <= n && st.opened[i]) ++area[l];
    }
    const double min_area_d =
        std::ceil(cfg.min_module_area_fraction * static_cast<double>(w) * static_cast<double>(h));
    const std::size_t min_area = std::max<std::size_t>(1, static_cast<std::size_t>(min_area_d));
    std::vector<int> relabel(static_cast<std::size_t>(n) + 1, 0);
    int next = 0;
    for (int l = 1; l <= n; ++l) {
      if (area[l] >= min_area) relabel[l] = ++next;
    }
    for (std::size_t i = 0; i < st.opened.size(); ++i) {
      const int l = st.watershed.labels[i];
      if (l >= 1 && l <= n && st.opened[i] && relabel[l] > 0) {
        res.labels.labels[i] = relabel[l];
        res.mask[i] = 1;
      }
    }
    res.labels.label_count = next;

    res.modules.resize(static_cast<std::size_t>(next));
    for (int l = 1; l <= next; ++l) {
      auto& m = res.modules[l - 1];
      m.label = l;
      m.bbox = {h, w, -1, -1};
    }
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const int l = res.labels(r, c);
        if (l == 0) continue;
        auto& m = res.modules[l - 1];
        ++m.pixel_count;
        m.bbox.row0 = std::min(m.bbox.row0, r);
        m.bbox.col0 = std::min(m.bbox.col0, c);
        m.bbox.row1 = std::max(m.bbox.row1, r);
        m.bbox.col1 = std::max(m.bbox.col1, c);
      }
    }
    for (auto& m : res.modules) {
      m.touches_border = m.bbox.row0 == 0 || m.bbox.col0 == 0 || m.bbox.row1 == h - 1 ||
                         m.bbox.col1 == w - 1;
      m.boundary = trace_boundary(res.labels, m.label);
    }
  } else {
    st.watershed = LabelMap(w, h);
  }
  if (keep_stages) res.stages = std::move(st);
  return res;
}

SegmentationResult segment(const Thermogram& t, const PipelineConfig& cfg, bool keep_stages) {
  SegmentationResult res = segment_modules(t, cfg, keep_stages);
  if (res.modules.empty()) {
    throw Error(Errc::NoModulesFound, "no module region survived segmentation of " + t.id());
  }
  return res;
}

}  // namespace thermoscan
