#include "thermoscan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermoscan/imgproc/labeling.hpp"
#include "thermoscan/parallel.hpp"

namespace thermoscan {
namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

[[noreturn]] void bad_config(const std::string& what) { throw Error(Errc::InvalidConfig, what); }
[[noreturn]] void bad_doc(const std::string& what) { throw Error(Errc::BadDocument, what); }

TemperatureHistogram build_histogram(const ModuleTemperatures& mt, double lo, double hi, int bins) {
  TemperatureHistogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = hi - lo;
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + width * i / bins;
  h.edges.back() = hi;
  for (const auto& s : mt.samples) {
    const double t = s.temp_c;
    if (!(width > 0)) {
      ++h.counts[0];
      continue;
    }
    int idx = std::clamp(static_cast<int>((t - lo) / width * bins), 0, bins - 1);
    while (idx + 1 < bins && t >= h.edges[idx + 1]) ++idx;
    while (idx > 0 && t < h.edges[idx]) --idx;
    ++h.counts[idx];
  }
  return h;
}

template <class T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad_doc(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad_doc(std::string("field '") + key + "' has the wrong type");
  }
}

Verdict verdict_from(const std::string& s) {
  if (s == "healthy") return Verdict::Healthy;
  if (s == "suspect") return Verdict::Suspect;
  bad_doc("unknown verdict '" + s + "'");
}

}  // namespace

const char* to_string(Verdict v) noexcept { return v == Verdict::Suspect ? "suspect" : "healthy"; }

double round6(double v) noexcept {
  if (!std::isfinite(v)) return v;
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

std::string dump_document(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void validate(const AnalysisConfig& c) {
  if (c.histogram_bins < 2 || c.histogram_bins > 4096) {
    bad_config("histogram_bins: expected integer in [2, 4096]");
  }
  if (c.min_blob_size < 1) bad_config("min_blob_size: expected integer >= 1");
  if (c.fixed_delta_c && !(std::isfinite(*c.fixed_delta_c) && *c.fixed_delta_c > 0)) {
    bad_config("fixed_delta_c: expected a positive number");
  }
}

nlohmann::json to_json(const AnalysisConfig& c) {
  nlohmann::json j = {{"histogram_bins", c.histogram_bins}, {"min_blob_size", c.min_blob_size}};
  j["fixed_delta_c"] = c.fixed_delta_c ? nlohmann::json(*c.fixed_delta_c) : nlohmann::json();
  return j;
}

AnalysisConfig analysis_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_config("analysis config must be a JSON object");
  AnalysisConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "histogram_bins" || key == "min_blob_size") {
      if (!v.is_number_integer()) bad_config(key + ": expected integer");
      const auto x = v.get<std::int64_t>();
      if (x < 0 || x > std::numeric_limits<int>::max()) bad_config(key + ": out of range");
      (key == "histogram_bins" ? c.histogram_bins : c.min_blob_size) = static_cast<int>(x);
    } else if (key == "fixed_delta_c") {
      if (v.is_null()) {
        c.fixed_delta_c.reset();
      } else if (v.is_number()) {
        c.fixed_delta_c = v.get<double>();
      } else {
        bad_config("fixed_delta_c: expected number or null");
      }
    } else {
      bad_config(key + ": unknown key");
    }
  }
  validate(c);
  return c;
}

std::vector<ModuleTemperatures> extract_module_temperatures(const Thermogram& t,
                                                            const SegmentationResult& seg) {
  const auto& temps = t.temperature();
  if (!same_shape(temps, seg.labels) || !same_shape(temps, seg.mask)) {
    throw Error(Errc::ShapeMismatch, "segmentation is " + std::to_string(seg.labels.width()) +
                                         "x" + std::to_string(seg.labels.height()) +
                                         ", thermogram is " + std::to_string(t.width()) + "x" +
                                         std::to_string(t.height()));
  }
  std::vector<ModuleTemperatures> out(static_cast<std::size_t>(seg.labels.label_count));
  for (int l = 1; l <= seg.labels.label_count; ++l) out[l - 1].label = l;
  for (int r = 0; r < temps.height(); ++r) {
    for (int c = 0; c < temps.width(); ++c) {
      const int l = seg.labels(r, c);
      if (l < 1 || l > seg.labels.label_count || !seg.mask(r, c)) continue;
      out[l - 1].samples.push_back({r, c, temps(r, c)});
    }
  }
  std::erase_if(out, [](const ModuleTemperatures& m) { return m.samples.empty(); });
  return out;
}

ThermalStats module_stats(const ModuleTemperatures& mt, int bins) {
  if (mt.samples.empty()) {
    throw Error(Errc::EmptyModule, "module " + std::to_string(mt.label) + " has no pixels");
  }
  if (bins < 2) throw Error(Errc::InvalidParameter, "histogram needs at least 2 bins");
  ThermalStats s;
  s.n = mt.samples.size();
  const double n = static_cast<double>(s.n);

  CompensatedSum sum;
  s.min_c = std::numeric_limits<double>::infinity();
  s.max_c = -std::numeric_limits<double>::infinity();
  for (const auto& p : mt.samples) {
    const double t = p.temp_c;
    sum.add(t);
    s.min_c = std::min(s.min_c, t);
    s.max_c = std::max(s.max_c, t);
  }
  s.mean_c = std::clamp(sum.value() / n, s.min_c, s.max_c);

  CompensatedSum sq;
  for (const auto& p : mt.samples) {
    const double d = static_cast<double>(p.temp_c) - s.mean_c;
    sq.add(d * d);
  }
  s.std_c = std::sqrt(std::max(0.0, sq.value() / n));
  if (s.min_c == s.max_c) s.std_c = 0.0;
  s.threshold_c = s.mean_c + s.std_c;
  s.histogram = build_histogram(mt, s.min_c, s.max_c, bins);
  return s;
}

ModuleReport detect_defects(const ModuleTemperatures& mt, const ThermalStats& stats,
                            const AnalysisConfig& cfg) {
  ModuleReport rep;
  rep.label = mt.label;
  rep.stats = stats;
  if (mt.samples.empty()) return rep;

  int r0 = std::numeric_limits<int>::max(), c0 = r0, r1 = -1, c1 = -1;
  for (const auto& p : mt.samples) {
    if (static_cast<double>(p.temp_c) > stats.threshold_c) {
      rep.defect_pixels.push_back({p.row, p.col});
      r0 = std::min(r0, p.row);
      c0 = std::min(c0, p.col);
      r1 = std::max(r1, p.row);
      c1 = std::max(c1, p.col);
    }
  }
  rep.defect_fraction = static_cast<double>(rep.defect_pixels.size()) /
                        static_cast<double>(mt.samples.size());

  if (!rep.defect_pixels.empty()) {
    const int w = c1 - c0 + 1;
    const int h = r1 - r0 + 1;
    BinaryMask local(w, h, 0);
    Raster<float, struct LocalTempTag> temp(w, h, 0.0f);
    for (const auto& p : mt.samples) {
      if (p.row < r0 || p.row > r1 || p.col < c0 || p.col > c1) continue;
      temp(p.row - r0, p.col - c0) = p.temp_c;
    }
    for (const auto& p : rep.defect_pixels) local(p.row - r0, p.col - c0) = 1;
    const LabelMap cc = imgproc::connected_components(local, imgproc::Connectivity::Eight);

    struct Acc {
      double sr = 0, sc = 0, peak = -std::numeric_limits<double>::infinity();
      std::size_t n = 0;
    };
    std::vector<Acc> acc(static_cast<std::size_t>(cc.label_count));
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const int l = cc(r, c);
        if (l == 0) continue;
        Acc& a = acc[l - 1];
        a.sr += r + r0;
        a.sc += c + c0;
        a.peak = std::max(a.peak, static_cast<double>(temp(r, c)));
        ++a.n;
      }
    }
    for (const Acc& a : acc) {
      const double n = static_cast<double>(a.n);
      rep.blobs.push_back({a.sr / n, a.sc / n, a.peak, a.n});
    }
  }
  const bool suspect = std::any_of(rep.blobs.begin(), rep.blobs.end(), [&](const DefectBlob& b) {
    return b.size >= static_cast<std::size_t>(cfg.min_blob_size);
  });
  rep.verdict = suspect ? Verdict::Suspect : Verdict::Healthy;

  if (cfg.fixed_delta_c) {
    FixedDeltaComparison cmp;
    cmp.delta_c = *cfg.fixed_delta_c;
    for (const auto& p : mt.samples) {
      if (static_cast<double>(p.temp_c) - stats.mean_c > cmp.delta_c) ++cmp.pixel_count;
    }
    cmp.verdict = cmp.pixel_count > 0 ? Verdict::Suspect : Verdict::Healthy;
    rep.fixed_delta = cmp;
  }
  return rep;
}

DefectReport analyze(const Thermogram& t, const SegmentationResult& seg,
                     const AnalysisConfig& cfg) {
  validate(cfg);
  const auto modules = extract_module_temperatures(t, seg);
  DefectReport rep;
  rep.thermogram_id = t.id();
  rep.modules.resize(modules.size());
  parallel_for(modules.size(), [&](std::size_t i) {
    rep.modules[i] = detect_defects(modules[i], module_stats(modules[i], cfg.histogram_bins), cfg);
  });
  auto& s = rep.summary;
  s.module_count = rep.modules.size();
  for (const auto& m : rep.modules) {
    s.defect_pixel_count += m.defect_pixels.size();
    if (m.verdict == Verdict::Suspect) {
      ++s.suspect_count;
      s.suspect_labels.push_back(m.label);
    }
  }
  s.healthy_count = s.module_count - s.suspect_count;
  return rep;
}

float query_temperature(const Thermogram& t, int row, int col) {
  if (!t.temperature().in_bounds(row, col)) {
    throw Error(Errc::OutOfBounds, "(" + std::to_string(row) + ", " + std::to_string(col) +
                                       ") outside " + std::to_string(t.width()) + "x" +
                                       std::to_string(t.height()));
  }
  return t.temperature()(row, col);
}

nlohmann::json to_json(const DefectReport& r) {
  using nlohmann::json;
  json modules = json::array();
  for (const auto& m : r.modules) {
    json edges = json::array();
    for (double e : m.stats.histogram.edges) edges.push_back(round6(e));
    json pixels = json::array();
    for (const auto& p : m.defect_pixels) pixels.push_back({p.row, p.col});
    json blobs = json::array();
    for (const auto& b : m.blobs) {
      blobs.push_back({{"centroid", {round6(b.centroid_row), round6(b.centroid_col)}},
                       {"peak_c", round6(b.peak_c)},
                       {"size", b.size}});
    }
    json entry = {
        {"label", m.label},
        {"n", m.stats.n},
        {"mean_c", round6(m.stats.mean_c)},
        {"std_c", round6(m.stats.std_c)},
        {"threshold_c", round6(m.stats.threshold_c)},
        {"min_c", round6(m.stats.min_c)},
        {"max_c", round6(m.stats.max_c)},
        {"histogram", {{"edges", edges}, {"counts", m.stats.histogram.counts}}},
        {"defect_fraction", round6(m.defect_fraction)},
        {"defect_pixels", pixels},
        {"blobs", blobs},
        {"verdict", to_string(m.verdict)},
    };
    if (m.fixed_delta) {
      entry["fixed_delta"] = {{"delta_c", round6(m.fixed_delta->delta_c)},
                              {"pixel_count", m.fixed_delta->pixel_count},
                              {"verdict", to_string(m.fixed_delta->verdict)}};
    }
    modules.push_back(std::move(entry));
  }
  return {
      {"version", r.version},
      {"thermogram_id", r.thermogram_id},
      {"modules", modules},
      {"summary",
       {{"module_count", r.summary.module_count},
        {"suspect_count", r.summary.suspect_count},
        {"healthy_count", r.summary.healthy_count},
        {"defect_pixel_count", r.summary.defect_pixel_count},
        {"suspect_labels", r.summary.suspect_labels}}},
  };
}

DefectReport defect_report_from_json(const nlohmann::json& j) {
  DefectReport r;
  r.version = field<int>(j, "version");
  if (r.version != kReportVersion) bad_doc("unsupported report version " + std::to_string(r.version));
  r.thermogram_id = field<std::string>(j, "thermogram_id");
  const auto modules = field<nlohmann::json>(j, "modules");
  if (!modules.is_array()) bad_doc("'modules' must be an array");
  for (const auto& e : modules) {
    ModuleReport m;
    m.label = field<int>(e, "label");
    m.stats.n = field<std::size_t>(e, "n");
    m.stats.mean_c = field<double>(e, "mean_c");
    m.stats.std_c = field<double>(e, "std_c");
    m.stats.threshold_c = field<double>(e, "threshold_c");
    m.stats.min_c = field<double>(e, "min_c");
    m.stats.max_c = field<double>(e, "max_c");
    const auto hist = field<nlohmann::json>(e, "histogram");
    m.stats.histogram.edges = field<std::vector<double>>(hist, "edges");
    m.stats.histogram.counts = field<std::vector<std::uint64_t>>(hist, "counts");
    if (m.stats.histogram.edges.size() != m.stats.histogram.counts.size() + 1) {
      bad_doc("histogram edges/counts length mismatch");
    }
    m.defect_fraction = field<double>(e, "defect_fraction");
    for (const auto& p : field<std::vector<std::array<int, 2>>>(e, "defect_pixels")) {
      m.defect_pixels.push_back({p[0], p[1]});
    }
    for (const auto& b : field<nlohmann::json>(e, "blobs")) {
      const auto c = field<std::array<double, 2>>(b, "centroid");
      m.blobs.push_back({c[0], c[1], field<double>(b, "peak_c"), field<std::size_t>(b, "size")});
    }
    m.verdict = verdict_from(field<std::string>(e, "verdict"));
    if (e.contains("fixed_delta")) {
      const auto& f = e.at("fixed_delta");
      m.fixed_delta = FixedDeltaComparison{field<double>(f, "delta_c"),
                                           field<std::size_t>(f, "pixel_count"),
                                           verdict_from(field<std::string>(f, "verdict"))};
    }
    r.modules.push_back(std::move(m));
  }
  const auto s = field<nlohmann::json>(j, "summary");
  r.summary.module_count = field<std::size_t>(s, "module_count");
  r.summary.suspect_count = field<std::size_t>(s, "suspect_count");
  r.summary.healthy_count = field<std::size_t>(s, "healthy_count");
  r.summary.defect_pixel_count = field<std::size_t>(s, "defect_pixel_count");
  r.summary.suspect_labels = field<std::vector<int>>(s, "suspect_labels");
  return r;
}

nlohmann::json regions_to_json(const SegmentationResult& seg, const std::string& thermogram_id) {
  using nlohmann::json;
  json modules = json::array();
  for (const auto& m : seg.modules) {
    json boundary = json::array();
    for (const auto& p : m.boundary) boundary.push_back({p.row, p.col});
    modules.push_back({
        {"label", m.label},
        {"pixel_count", m.pixel_count},
        {"bbox", {m.bbox.row0, m.bbox.col0, m.bbox.row1, m.bbox.col1}},
        {"boundary", boundary},
        {"touches_border", m.touches_border},
    });
  }
  return {
      {"version", 1},
      {"thermogram_id", thermogram_id},
      {"width", seg.labels.width()},
      {"height", seg.labels.height()},
      {"otsu_threshold", seg.otsu_threshold},
      {"config", to_json(seg.config)},
      {"modules", modules},
  };
}

}  // namespace thermoscan
