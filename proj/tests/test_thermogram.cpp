#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "thermoscan/png_io.hpp"
#include "thermoscan/synthetic.hpp"
#include "thermoscan/thermogram.hpp"

using namespace thermoscan;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = THERMOSCAN_FIXTURES;

std::vector<std::uint8_t> fixture(const char* name) { return png::read_file(kFixtures / name); }

Errc load_error(const std::vector<std::uint8_t>& bytes, const LoadOptions& o = {}) {
  try {
    load_thermogram(bytes, o);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("load succeeded");
  return Errc::Io;
}

Thermogram random_thermogram(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 24);
  const int w = dim(rng), h = dim(rng);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  for (auto& v : rgb) v = static_cast<std::uint8_t>(byte(rng));
  std::uniform_real_distribution<float> temp(-40.0f, 200.0f);
  TemperatureMatrix t(w, h);
  for (auto& v : t.values()) v = temp(rng);
  Metadata meta;
  const int keys = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int k = 0; k < keys; ++k) meta["k" + std::to_string(k)] = "v\"" + std::to_string(byte(rng)) + "é";
  return Thermogram(VisualImage::from_rgb8(w, h, rgb), std::move(t), std::move(meta));
}

std::uint32_t bits(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

}  // namespace

TEST_SUITE("tgrm") {
  TEST_CASE("checked-in fixtures round-trip byte for byte") {
    for (const char* name : {"small.tgrm", "grid.tgrm", "partial.tgrm"}) {
      CAPTURE(name);
      const auto bytes = fixture(name);
      const Thermogram t = load_thermogram(bytes);
      CHECK(save_thermogram(t) == bytes);
      CHECK(load_thermogram(save_thermogram(t)) == t);
    }
  }

  TEST_CASE("small fixture decodes to the known cells") {
    const Thermogram t = load_thermogram(fixture("small.tgrm"));
    REQUIRE(t.width() == 3);
    REQUIRE(t.height() == 2);
    const std::vector<float> want = {21.5f, 22.25f, -3.0f, 99.125f, 0.0f, 37.0f};
    CHECK(t.temperature().data() == want);
    CHECK(t.meta() == Metadata{{"camera", "bench"}, {"site", "lab-1"}});
    const std::vector<std::uint8_t> rgb = {0,   0,   0,  255, 255, 255, 10, 20,  30,
                                           200, 100, 50, 1,   2,   3,   90, 180, 255};
    CHECK(t.visual().to_rgb8() == rgb);
    CHECK(t.visual().at(0, 1, 0) == 1.0f);
    CHECK(t.id() == "tg-3b4800281f0d");
  }

  TEST_CASE("meta id overrides the content digest") {
    const Thermogram t = load_thermogram(fixture("partial.tgrm"));
    CHECK(t.id() == "partial-row");
  }

  TEST_CASE("malformed fixtures raise the named errors") {
    CHECK(load_error(fixture("bad_magic.tgrm")) == Errc::BadMagic);
    CHECK(load_error(fixture("bad_version.tgrm")) == Errc::UnsupportedVersion);
    CHECK(load_error(fixture("shape_mismatch.tgrm")) == Errc::ShapeMismatch);
    CHECK(load_error(fixture("bad_header.tgrm")) == Errc::BadHeader);
    CHECK(load_error(fixture("nonfinite.tgrm")) == Errc::NonFiniteTemperature);
    CHECK(load_error(fixture("out_of_range.tgrm")) == Errc::OutOfPhysicalRange);
    CHECK(load_error(fixture("trailing_bytes.tgrm")) == Errc::TrailingBytes);
    CHECK(load_error(fixture("truncated.tgrm")) == Errc::Truncated);
  }

  TEST_CASE("diagnostics name the offending offset or field") {
    try {
      load_thermogram(fixture("out_of_range.tgrm"));
      FAIL("expected OutOfPhysicalRange");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("temperature[0][2]") != std::string::npos);
      CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
  }

  TEST_CASE("plausibility range is configurable") {
    LoadOptions wide;
    wide.max_celsius = 300.0f;
    const Thermogram t = load_thermogram(fixture("out_of_range.tgrm"), wide);
    CHECK(t.temperature()(0, 2) == 250.0f);
    LoadOptions narrow;
    narrow.max_celsius = 30.0f;
    CHECK(load_error(fixture("small.tgrm"), narrow) == Errc::OutOfPhysicalRange);
  }

  TEST_CASE("2x2 file of 20 C") {
    const Thermogram t(VisualImage(2, 2), TemperatureMatrix(2, 2, 20.0f));
    const Thermogram back = load_thermogram(save_thermogram(t));
    REQUIRE(back.temperature().size() == 4);
    for (float v : back.temperature().values()) CHECK(v == 20.0f);
  }

  TEST_CASE("header claiming 4x4 over 12 floats is a shape mismatch") {
    const Thermogram t(VisualImage(4, 3), TemperatureMatrix(4, 3, 20.0f));
    auto bytes = save_thermogram(t);
    const std::string from = R"("height":3)";
    const std::string to = R"("height":4)";
    auto it = std::search(bytes.begin(), bytes.end(), from.begin(), from.end());
    REQUIRE(it != bytes.end());
    std::copy(to.begin(), to.end(), it);
    CHECK(load_error(bytes) == Errc::ShapeMismatch);
  }

  TEST_CASE("1x1 file starts with the magic") {
    const Thermogram t(VisualImage::from_rgb8(1, 1, std::vector<std::uint8_t>{255, 255, 255}),
                       TemperatureMatrix(1, 1, 25.0f));
    const auto bytes = save_thermogram(t);
    REQUIRE(bytes.size() > 10);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "TGRM");
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
  }

  TEST_CASE("one differing cell changes the bytes") {
    TemperatureMatrix a(3, 3, 25.0f), b(3, 3, 25.0f);
    b(1, 1) = 25.5f;
    CHECK(save_thermogram(Thermogram(VisualImage(3, 3), a)) !=
          save_thermogram(Thermogram(VisualImage(3, 3), b)));
  }

  TEST_CASE("random thermograms round-trip bit-exactly") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
      const Thermogram t = random_thermogram(rng);
      const auto bytes = save_thermogram(t);
      const Thermogram back = load_thermogram(bytes);
      REQUIRE(back == t);
      for (std::size_t k = 0; k < t.temperature().size(); ++k) {
        REQUIRE(bits(back.temperature()[k]) == bits(t.temperature()[k]));
      }
      REQUIRE(save_thermogram(back) == bytes);
    }
  }

  TEST_CASE("every strict prefix of a valid file is rejected") {
    const auto bytes = fixture("small.tgrm");
    for (std::size_t n = 0; n < bytes.size(); ++n) {
      std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<long>(n));
      CHECK_THROWS_AS(load_thermogram(cut), Error);
    }
  }

  TEST_CASE("a 16-bit embedded PNG is normalized to [0,1]") {
    const Thermogram t(VisualImage::from_rgb8(2, 1, std::vector<std::uint8_t>{0, 0, 0, 255, 255, 255}),
                       TemperatureMatrix(2, 1, 30.0f));
    auto bytes = save_thermogram(t);
    // Swap the 8-bit PNG for a 16-bit grey one of the same size.
    const auto grey16 = png::encode_gray16(2, 1, std::vector<std::uint16_t>{0, 65535});
    const std::size_t png_at = bytes.size() - png::encode_rgb8(2, 1, t.visual().to_rgb8()).size();
    bytes.resize(png_at - 4);
    const auto n = static_cast<std::uint32_t>(grey16.size());
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    bytes.insert(bytes.end(), grey16.begin(), grey16.end());
    const Thermogram back = load_thermogram(bytes);
    CHECK(back.visual().at(0, 0, 0) == 0.0f);
    CHECK(back.visual().at(0, 1, 2) == 1.0f);
  }
}

TEST_SUITE("model") {
  TEST_CASE("visual and temperature shapes must agree") {
    CHECK_THROWS_AS(Thermogram(VisualImage(3, 2), TemperatureMatrix(2, 3)), Error);
  }

  TEST_CASE("visual samples are validated") {
    CHECK_THROWS_AS(VisualImage(1, 1, std::vector<float>{0.0f, 0.5f}), Error);
    CHECK_THROWS_AS(VisualImage(1, 1, std::vector<float>{0.0f, 1.5f, 0.0f}), Error);
    CHECK_THROWS_AS(VisualImage(1, 1, std::vector<float>{0.0f, std::nanf(""), 0.0f}), Error);
  }

  TEST_CASE("rgb8 conversion is exact") {
    std::vector<std::uint8_t> all(256 * 3);
    for (int i = 0; i < 256; ++i) all[i * 3] = all[i * 3 + 1] = all[i * 3 + 2] = static_cast<std::uint8_t>(i);
    CHECK(VisualImage::from_rgb8(256, 1, all).to_rgb8() == all);
  }

  TEST_CASE("content id tracks content") {
    const Thermogram a(VisualImage(2, 2), TemperatureMatrix(2, 2, 20.0f));
    const Thermogram b(VisualImage(2, 2), TemperatureMatrix(2, 2, 20.0f));
    const Thermogram c(VisualImage(2, 2), TemperatureMatrix(2, 2, 20.5f));
    CHECK(a.id() == b.id());
    CHECK(a.id() != c.id());
    CHECK(a.id().rfind("tg-", 0) == 0);
    CHECK(a.id().size() == 15);
  }
}

TEST_SUITE("synthetic") {
  TEST_CASE("no hot spots and no noise leave the defect mask empty") {
    SyntheticSpec s;
    s.noise_std_c = 0;
    const auto syn = generate_synthetic(s);
    for (auto v : syn.truth_defects.values()) REQUIRE(v == 0);
  }

  TEST_CASE("a hot spot in module 0 of a 1x2 grid stays inside module 0") {
    SyntheticSpec s;
    s.rows = 1;
    s.cols = 2;
    s.hot_spots = {{0, 18, 30, 4.0, 10.0}};
    const auto syn = generate_synthetic(s);
    std::size_t defects = 0;
    for (std::size_t i = 0; i < syn.truth_defects.size(); ++i) {
      if (!syn.truth_defects[i]) continue;
      ++defects;
      CHECK(syn.truth_labels.labels[i] == 1);
    }
    CHECK(defects > 0);
  }

  TEST_CASE("fixed seed is reproducible") {
    SyntheticSpec s;
    s.seed = 42;
    s.noise_std_c = 0.7;
    s.hot_spots = {{1, 10, 10, 3.0, 8.0}};
    const auto a = generate_synthetic(s);
    const auto b = generate_synthetic(s);
    CHECK(save_thermogram(a.thermogram) == save_thermogram(b.thermogram));
    CHECK(a.truth_labels == b.truth_labels);
    CHECK(a.truth_defects == b.truth_defects);
    s.seed = 43;
    CHECK(save_thermogram(generate_synthetic(s).thermogram) != save_thermogram(a.thermogram));
  }

  TEST_CASE("temperatures follow base + hot spot profile when noiseless") {
    SyntheticSpec s;
    s.rows = 1;
    s.cols = 1;
    s.margin = 10;
    s.hot_spots = {{0, 18, 30, 4.0, 10.0}};
    const auto syn = generate_synthetic(s);
    const auto& T = syn.thermogram.temperature();
    CHECK(T(0, 0) == doctest::Approx(s.background_c));
    CHECK(T(10 + 18, 10 + 30) == doctest::Approx(s.module_c + 10.0));
    // Half the rise at the half-max radius.
    CHECK(T(10 + 18, 10 + 34) == doctest::Approx(s.module_c + 5.0).epsilon(1e-6));
    CHECK(syn.truth_defects(10 + 18, 10 + 33) == 1);
    CHECK(syn.truth_defects(10 + 18, 10 + 34) == 0);
  }

  TEST_CASE("generator honesty") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 30; ++i) {
      SyntheticSpec s;
      s.rows = 1 + static_cast<int>(rng() % 3);
      s.cols = 1 + static_cast<int>(rng() % 3);
      const int m = static_cast<int>(rng() % static_cast<std::uint64_t>(s.rows * s.cols));
      s.hot_spots = {{m, 5.0 + static_cast<double>(rng() % 26), 5.0 + static_cast<double>(rng() % 50),
                      1.0 + static_cast<double>(rng() % 5), 1.0 + static_cast<double>(rng() % 15)}};
      const auto syn = generate_synthetic(s);
      double in = 0, out = 0;
      std::size_t nin = 0, nout = 0;
      for (std::size_t k = 0; k < syn.truth_defects.size(); ++k) {
        if (syn.truth_labels.labels[k] == 0) continue;
        const double t = syn.thermogram.temperature()[k];
        if (syn.truth_defects[k]) {
          in += t;
          ++nin;
        } else {
          out += t;
          ++nout;
        }
      }
      REQUIRE(nin > 0);
      CHECK(in / nin > out / nout);
    }
  }

  TEST_CASE("modules render brighter than background, hot spots brighter still") {
    SyntheticSpec s;
    s.rows = 1;
    s.cols = 1;
    s.hot_spots = {{0, 18, 30, 4.0, 10.0}};
    const auto syn = generate_synthetic(s);
    const auto& v = syn.thermogram.visual();
    const int r0 = s.margin, c0 = s.margin;
    CHECK(v.at(r0 + 2, c0 + 2, 1) > v.at(0, 0, 1));
    CHECK(v.at(r0 + 18, c0 + 30, 1) > v.at(r0 + 2, c0 + 2, 1));
  }

  TEST_CASE("every module gets a distinct label") {
    SyntheticSpec s;
    s.rows = 3;
    s.cols = 4;
    const auto syn = generate_synthetic(s);
    std::vector<std::size_t> count(13, 0);
    for (auto l : syn.truth_labels.labels.values()) ++count[static_cast<std::size_t>(l)];
    for (int l = 1; l <= 12; ++l) CHECK(count[l] == static_cast<std::size_t>(s.module_width * s.module_height));
  }

  TEST_CASE("modules may hang off the image edge") {
    SyntheticSpec s;
    s.rows = 1;
    s.cols = 2;
    s.origin_col = -20;
    const auto syn = generate_synthetic(s);
    std::size_t first = 0;
    for (auto l : syn.truth_labels.labels.values()) first += l == 1;
    CHECK(first == static_cast<std::size_t>((s.module_width - 20) * s.module_height));
  }

  TEST_CASE("invalid specs are rejected") {
    const auto invalid = [](auto mutate) {
      SyntheticSpec s;
      mutate(s);
      try {
        generate_synthetic(s);
      } catch (const Error& e) {
        return e.code() == Errc::SpecInvalid;
      }
      return false;
    };
    CHECK(invalid([](SyntheticSpec& s) { s.hot_spots = {{0, 100, 1, 2.0, 5.0}}; }));
    CHECK(invalid([](SyntheticSpec& s) { s.hot_spots = {{0, 1, 1, 2.0, 0.0}}; }));
    CHECK(invalid([](SyntheticSpec& s) { s.hot_spots = {{9, 1, 1, 2.0, 5.0}}; }));
    CHECK(invalid([](SyntheticSpec& s) { s.noise_std_c = -1; }));
    CHECK(invalid([](SyntheticSpec& s) { s.module_c = 500; }));
    CHECK(invalid([](SyntheticSpec& s) { s.origin_col = -1000; }));
  }

  TEST_CASE("spec JSON round-trips and rejects unknown fields") {
    SyntheticSpec s;
    s.rows = 3;
    s.noise_std_c = 0.25;
    s.hot_spots = {{2, 4, 5, 2.5, 7.0}};
    s.origin_row = -3;
    const auto back = synthetic_spec_from_json(to_json(s));
    CHECK(to_json(back) == to_json(s));
    auto j = to_json(s);
    j["colour"] = "blue";
    CHECK_THROWS_AS(synthetic_spec_from_json(j), Error);
    CHECK_THROWS_AS(synthetic_spec_from_json(nlohmann::json{{"rows", "two"}}), Error);
  }
}

TEST_SUITE("png") {
  TEST_CASE("rgb8 and gray16 survive encode/decode") {
    std::mt19937_64 rng(5);
    std::vector<std::uint8_t> rgb(7 * 5 * 3);
    for (auto& v : rgb) v = static_cast<std::uint8_t>(rng());
    const auto d = png::decode(png::encode_rgb8(7, 5, rgb));
    REQUIRE(d.channels == 3);
    REQUIRE(d.bit_depth == 8);
    for (std::size_t i = 0; i < rgb.size(); ++i) REQUIRE(d.samples[i] == rgb[i]);

    std::vector<std::uint16_t> g(6 * 4);
    for (auto& v : g) v = static_cast<std::uint16_t>(rng());
    const auto d16 = png::decode(png::encode_gray16(6, 4, g));
    REQUIRE(d16.bit_depth == 16);
    CHECK(d16.samples == g);
  }

  TEST_CASE("encoding is deterministic") {
    std::vector<std::uint8_t> rgb(16 * 16 * 3, 77);
    CHECK(png::encode_rgb8(16, 16, rgb) == png::encode_rgb8(16, 16, rgb));
  }

  TEST_CASE("garbage is BadPng") {
    const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    try {
      png::decode(junk);
      FAIL("decoded junk");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::BadPng);
    }
  }
}
