#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "scenarios.hpp"
#include "thermoscan/imgproc.hpp"
#include "thermoscan/pipeline.hpp"
#include "thermoscan/synthetic.hpp"

using namespace thermoscan;

namespace {

double iou(const LabelMap& a, int la, const LabelMap& b, int lb) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const bool x = a.labels[i] == la, y = b.labels[i] == lb;
    inter += x && y;
    uni += x || y;
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// Best IoU of each truth module against any predicted region.
std::vector<double> module_ious(const SyntheticThermogram& syn, const SegmentationResult& seg) {
  std::vector<double> out;
  for (int l = 1; l <= syn.truth_labels.label_count; ++l) {
    double best = 0;
    for (const auto& m : seg.modules) best = std::max(best, iou(syn.truth_labels, l, seg.labels, m.label));
    out.push_back(best);
  }
  return out;
}

Thermogram crop(const Thermogram& t, int r0, int c0, int w, int h) {
  std::vector<float> rgb;
  TemperatureMatrix temp(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int k = 0; k < 3; ++k) rgb.push_back(t.visual().at(r0 + r, c0 + c, k));
      temp(r, c) = t.temperature()(r0 + r, c0 + c);
    }
  }
  return Thermogram(VisualImage(w, h, std::move(rgb)), std::move(temp));
}

LabelMap single_label(const BinaryMask& m) {
  LabelMap out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out.labels[i] = m[i];
  out.label_count = 1;
  return out;
}

bool invalid_config(const nlohmann::json& j) {
  try {
    pipeline_config_from_json(j);
  } catch (const Error& e) {
    return e.code() == Errc::InvalidConfig;
  }
  return false;
}

}  // namespace

TEST_SUITE("segment") {
  TEST_CASE("noiseless 2x3 grid gives six matching regions") {
    SyntheticSpec s;
    const auto syn = generate_synthetic(s);
    const auto seg = segment(syn.thermogram);
    REQUIRE(seg.modules.size() == 6);
    for (double v : module_ious(syn, seg)) CHECK(v >= 0.9);
    for (std::size_t k = 0; k < seg.modules.size(); ++k) CHECK(seg.modules[k].label == static_cast<int>(k) + 1);
    CHECK(seg.labels.label_count == 6);
  }

  TEST_CASE("all-background image has no modules") {
    const Thermogram t(VisualImage(40, 30), TemperatureMatrix(40, 30, 25.0f));
    CHECK_THROWS_AS(segment(t), Error);
    try {
      segment(t);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NoModulesFound);
    }
    const auto empty = segment_modules(t);
    CHECK(empty.modules.empty());
    CHECK(empty.labels.label_count == 0);
  }

  TEST_CASE("partially visible module touches the border") {
    SyntheticSpec s;
    s.rows = 1;
    s.cols = 3;
    s.origin_col = -30;
    const auto syn = generate_synthetic(s);
    const auto seg = segment(syn.thermogram);
    REQUIRE(seg.modules.size() == 3);
    std::vector<bool> touches;
    for (const auto& m : seg.modules) touches.push_back(m.touches_border);
    CHECK(touches == std::vector<bool>{true, false, false});
    CHECK(seg.modules[0].bbox.col0 == 0);
    for (double v : module_ious(syn, seg)) CHECK(v >= 0.9);
  }

  TEST_CASE("bounding boxes are tight and pixel counts exact") {
    const auto syn = generate_synthetic(scenarios::segmentation(4));
    const auto seg = segment(syn.thermogram);
    for (const auto& m : seg.modules) {
      BoundingBox b{seg.labels.height(), seg.labels.width(), -1, -1};
      std::size_t n = 0;
      for (int r = 0; r < seg.labels.height(); ++r) {
        for (int c = 0; c < seg.labels.width(); ++c) {
          if (seg.labels(r, c) != m.label) continue;
          ++n;
          b = {std::min(b.row0, r), std::min(b.col0, c), std::max(b.row1, r), std::max(b.col1, c)};
        }
      }
      CHECK(m.bbox == b);
      CHECK(m.pixel_count == n);
      const bool edge = b.row0 == 0 || b.col0 == 0 || b.row1 == seg.labels.height() - 1 ||
                        b.col1 == seg.labels.width() - 1;
      CHECK(m.touches_border == edge);
    }
  }

  TEST_CASE("purity, consistency, containment and area on seeded scenarios") {
    for (int i = 0; i < 12; ++i) {
      CAPTURE(i);
      const auto syn = generate_synthetic(scenarios::segmentation(i));
      const auto a = segment_modules(syn.thermogram, {}, true);
      const auto b = segment_modules(syn.thermogram, {}, true);
      REQUIRE(a == b);
      REQUIRE(a.stages.has_value());
      const auto& st = *a.stages;

      const std::size_t pixels = a.mask.size();
      const auto min_area = static_cast<std::size_t>(std::ceil(a.config.min_module_area_fraction * pixels));
      std::size_t covered = 0;
      for (const auto& m : a.modules) {
        CHECK(m.pixel_count >= min_area);
        covered += m.pixel_count;
      }
      for (std::size_t k = 0; k < pixels; ++k) {
        const bool in_region = a.labels.labels[k] > 0;
        REQUIRE(a.mask[k] == (in_region ? 1 : 0));
        if (in_region) REQUIRE(st.opened[k] == 1);
        if (st.watershed.labels[k] > 0) REQUIRE(st.flood_region[k] == 1);
      }
      CHECK(covered == std::count(a.mask.values().begin(), a.mask.values().end(), std::uint8_t{1}));

      for (std::size_t k = 0; k < pixels; ++k) {
        if (st.markers.labels[k] > 0) REQUIRE(st.watershed.labels[k] == st.markers.labels[k]);
      }
      for (int l = 1; l <= static_cast<int>(a.modules.size()); ++l) CHECK(oracle::connected(a.labels, l));
    }
  }

  TEST_CASE("regions below the minimum area never appear") {
    SyntheticSpec s;
    s.rows = 1;
    s.cols = 2;
    const auto syn = generate_synthetic(s);
    PipelineConfig cfg;
    const std::size_t area = static_cast<std::size_t>(s.module_width) * s.module_height;
    const double pixels = static_cast<double>(syn.thermogram.width()) * syn.thermogram.height();
    cfg.min_module_area_fraction = static_cast<double>(area + 200) / pixels;
    CHECK(segment_modules(syn.thermogram, cfg).modules.empty());
    cfg.min_module_area_fraction = static_cast<double>(area - 200) / pixels;
    CHECK(segment_modules(syn.thermogram, cfg).modules.size() == 2);
  }

  TEST_CASE("cropping around a module keeps its region") {
    SyntheticSpec s;
    const auto syn = generate_synthetic(s);
    const auto full = segment(syn.thermogram);
    // Window around module 0 with some background, clear of module 1.
    const int r0 = 4, c0 = 4, w = s.module_width + 2 * 12 - 8 + 1, h = s.module_height + 2 * 12 - 8 + 1;
    const auto part = segment(crop(syn.thermogram, r0, c0, w, h));
    REQUIRE(part.modules.size() >= 1);
    LabelMap want(w, h);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) want.labels(r, c) = full.labels(r0 + r, c0 + c) == 1 ? 1 : 0;
    }
    double best = 0;
    for (const auto& m : part.modules) best = std::max(best, iou(want, 1, part.labels, m.label));
    CHECK(best >= 0.9);
  }

  TEST_CASE("invalid configs are rejected before any work") {
    const Thermogram t(VisualImage(10, 10), TemperatureMatrix(10, 10, 25.0f));
    PipelineConfig cfg;
    cfg.structuring_element_size = 4;
    CHECK_THROWS_AS(segment_modules(t, cfg), Error);
  }
}

TEST_SUITE("markers") {
  TEST_CASE("two separated squares give one marker each") {
    BinaryMask m(40, 20, 0);
    for (int r = 3; r < 17; ++r) {
      for (int c = 3; c < 17; ++c) m(r, c) = m(r, c + 20) = 1;
    }
    const auto mk = build_markers(m, {});
    REQUIRE(mk.label_count == 2);
    CHECK(mk(10, 10) == 1);
    CHECK(mk(10, 30) == 2);
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (mk.labels[k]) REQUIRE(m[k] == 1);
    }
  }

  TEST_CASE("single square marker sits on the distance peak") {
    BinaryMask m(21, 21, 0);
    for (int r = 3; r < 18; ++r) {
      for (int c = 3; c < 18; ++c) m(r, c) = 1;
    }
    const auto mk = build_markers(m, {});
    REQUIRE(mk.label_count == 1);
    CHECK(mk(10, 10) == 1);
    const auto dt = oracle::distance(m);
    double peak = 0;
    for (double v : dt.values()) peak = std::max(peak, v);
    for (std::size_t k = 0; k < m.size(); ++k) CHECK((mk.labels[k] == 1) == (dt[k] >= 0.5 * peak));
  }

  TEST_CASE("squares bridged by a thin line split after opening") {
    BinaryMask m(40, 20, 0);
    for (int r = 2; r < 18; ++r) {
      for (int c = 2; c < 18; ++c) m(r, c) = m(r, c + 20) = 1;
    }
    for (int c = 18; c < 22; ++c) m(10, c) = 1;
    const PipelineConfig cfg;
    // The bridge itself joins them before opening.
    CHECK(imgproc::connected_components(m).label_count == 1);
    const auto opened = imgproc::open(m, structuring_element(cfg));
    for (int c = 18; c < 22; ++c) CHECK(opened(10, c) == 0);
    // Oracle: per-component peak of the brute-force distance, threshold at half.
    const auto comps = oracle::flood_components(opened, true);
    REQUIRE(comps.label_count == 2);
    const auto dt = oracle::distance(opened);
    std::vector<double> peak(3, 0.0);
    for (std::size_t k = 0; k < dt.size(); ++k) peak[comps.labels[k]] = std::max(peak[comps.labels[k]], dt[k]);
    BinaryMask sure(40, 20, 0);
    for (std::size_t k = 0; k < dt.size(); ++k) {
      sure[k] = comps.labels[k] > 0 && dt[k] >= 0.5 * peak[comps.labels[k]] ? 1 : 0;
    }
    const auto mk = build_markers(opened, cfg);
    CHECK(mk.label_count == 2);
    CHECK(mk == oracle::flood_components(sure, true));
  }

  TEST_CASE("a small module is not starved by a large one") {
    BinaryMask m(80, 40, 0);
    for (int r = 2; r < 38; ++r) {
      for (int c = 2; c < 50; ++c) m(r, c) = 1;
    }
    for (int r = 10; r < 18; ++r) {
      for (int c = 60; c < 68; ++c) m(r, c) = 1;
    }
    CHECK(build_markers(m, {}).label_count == 2);
  }

  TEST_CASE("empty mask gives no markers") { CHECK(build_markers(BinaryMask(8, 8, 0), {}).label_count == 0); }
}

TEST_SUITE("boundary") {
  TEST_CASE("lone pixel") {
    LabelMap m(3, 3);
    m.labels(1, 1) = 1;
    m.label_count = 1;
    CHECK(trace_boundary(m, 1) == std::vector<Point>{{1, 1}});
  }

  TEST_CASE("3x3 square walks its perimeter clockwise and closes") {
    BinaryMask b(5, 5, 0);
    for (int r = 1; r < 4; ++r) {
      for (int c = 1; c < 4; ++c) b(r, c) = 1;
    }
    const std::vector<Point> want = {{1, 1}, {1, 2}, {1, 3}, {2, 3}, {3, 3}, {3, 2}, {3, 1}, {2, 1}, {1, 1}};
    CHECK(trace_boundary(single_label(b), 1) == want);
  }

  TEST_CASE("unknown label") {
    LabelMap m(2, 2);
    try {
      trace_boundary(m, 4);
      FAIL("expected LabelNotFound");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::LabelNotFound);
    }
  }

  TEST_CASE("random blobs: contour pixels lie on the region edge and step by one") {
    std::mt19937_64 rng(606);
    for (int i = 0; i < 150; ++i) {
      const auto blobs = oracle::random_blobs(rng, 20, 16, 3);
      const auto comps = oracle::flood_components(blobs, true);
      if (comps.label_count == 0) continue;
      const int l = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(comps.label_count));
      const auto path = trace_boundary(comps, l);
      REQUIRE(!path.empty());
      REQUIRE(path.front() == path.back());
      // Raster-first pixel of the label.
      std::size_t first = 0;
      while (comps.labels[first] != l) ++first;
      REQUIRE(path.front() == Point{static_cast<int>(first) / 20, static_cast<int>(first) % 20});
      for (std::size_t k = 0; k < path.size(); ++k) {
        const auto [r, c] = path[k];
        REQUIRE(comps(r, c) == l);
        bool edge = false;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = r + dr, nc = c + dc;
            edge = edge || !comps.labels.in_bounds(nr, nc) || comps(nr, nc) != l;
          }
        }
        REQUIRE(edge);
        if (k > 0) {
          REQUIRE(std::max(std::abs(r - path[k - 1].row), std::abs(c - path[k - 1].col)) == 1);
        }
      }
    }
  }

  TEST_CASE("a rectangle's contour visits every edge pixel once") {
    BinaryMask b(12, 9, 0);
    for (int r = 2; r < 7; ++r) {
      for (int c = 1; c < 11; ++c) b(r, c) = 1;
    }
    const auto path = trace_boundary(single_label(b), 1);
    const std::set<Point> unique(path.begin(), path.end());
    CHECK(path.size() == 2 * (10 + 5) - 4 + 1);
    CHECK(unique.size() == path.size() - 1);
    // Clockwise in image coordinates: positive shoelace area with rows down.
    long twice = 0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      twice += static_cast<long>(path[k].col) * path[k + 1].row - static_cast<long>(path[k + 1].col) * path[k].row;
    }
    CHECK(twice > 0);
  }
}

TEST_SUITE("config") {
  TEST_CASE("round trip and defaults") {
    PipelineConfig cfg;
    cfg.clahe_tiles_x = 3;
    cfg.structuring_element = ElementShape::Cross;
    cfg.gaussian_sigma = 0.75;
    CHECK(pipeline_config_from_json(to_json(cfg)) == cfg);
    CHECK(pipeline_config_from_json(nlohmann::json::object()) == PipelineConfig{});
    const auto j = to_json(PipelineConfig{});
    CHECK(j["watershed_relief"] == "inverted_distance");
    CHECK(j["structuring_element"] == "box");
  }

  TEST_CASE("strictness") {
    CHECK(invalid_config({{"bogus", 1}}));
    CHECK(invalid_config({{"gaussian_sigma", "1.0"}}));
    CHECK(invalid_config({{"gaussian_sigma", 0.0}}));
    CHECK(invalid_config({{"structuring_element_size", 4}}));
    CHECK(invalid_config({{"structuring_element", "disk"}}));
    CHECK(invalid_config({{"marker_foreground_fraction", 1.0}}));
    CHECK(invalid_config({{"connectivity", 6}}));
    CHECK(invalid_config({{"clahe_clip_limit", 0.5}}));
    CHECK(invalid_config({{"dhe_smoothing_window", 4}}));
    CHECK(invalid_config({{"watershed_relief", "gradient"}}));
    CHECK(invalid_config(nlohmann::json::array()));
    CHECK_FALSE(invalid_config({{"connectivity", 4}}));
  }
}
