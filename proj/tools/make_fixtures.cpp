// Regenerates tests/fixtures. Usage: make_fixtures OUT_DIR
//
// Valid files come from save_thermogram; malformed ones are byte-level edits
// of a valid file, each breaking exactly one rule of the container.
#include <cmath>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <limits>

#include "thermoscan/analysis.hpp"
#include "thermoscan/png_io.hpp"
#include "thermoscan/synthetic.hpp"
#include "thermoscan/thermogram.hpp"

namespace ts = thermoscan;
namespace fs = std::filesystem;
using Bytes = std::vector<std::uint8_t>;

namespace {

ts::Thermogram small() {
  const std::vector<std::uint8_t> rgb = {0,   0,   0,   255, 255, 255, 10, 20,  30,
                                         200, 100, 50,  1,   2,   3,   90, 180, 255};
  ts::TemperatureMatrix temps(3, 2, std::vector<float>{21.5f, 22.25f, -3.0f, 99.125f, 0.0f, 37.0f});
  return ts::Thermogram(ts::VisualImage::from_rgb8(3, 2, rgb), std::move(temps),
                        {{"camera", "bench"}, {"site", "lab-1"}});
}

std::uint32_t header_length(const Bytes& b) {
  return b[6] | (b[7] << 8) | (b[8] << 16) | (static_cast<std::uint32_t>(b[9]) << 24);
}

std::size_t first_float(const Bytes& b) { return 10 + header_length(b); }

void put_float(Bytes& b, std::size_t at, float v) { std::memcpy(b.data() + at, &v, 4); }

Bytes with_header(const Bytes& b, const std::string& header) {
  Bytes out(b.begin(), b.begin() + 6);
  const auto n = static_cast<std::uint32_t>(header.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), b.begin() + first_float(b), b.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures OUT_DIR\n";
    return 1;
  }
  const fs::path out = argv[1];
  fs::create_directories(out);

  const Bytes small_bytes = ts::save_thermogram(small());
  ts::png::write_file(out / "small.tgrm", small_bytes);

  ts::SyntheticSpec grid;
  grid.noise_std_c = 0.3;
  grid.seed = 42;
  grid.hot_spots = {{4, 18, 30, 4.0, 10.0}};
  ts::png::write_file(out / "grid.tgrm", ts::save_thermogram(ts::generate_synthetic(grid).thermogram));

  ts::SyntheticSpec partial;
  partial.rows = 1;
  partial.cols = 3;
  partial.origin_col = -30;
  partial.seed = 7;
  auto syn = ts::generate_synthetic(partial);
  auto meta = syn.thermogram.meta();
  meta["id"] = "partial-row";
  const ts::Thermogram partial_t(syn.thermogram.visual(), syn.thermogram.temperature(), meta);
  ts::png::write_file(out / "partial.tgrm", ts::save_thermogram(partial_t));

  Bytes b = small_bytes;
  b[0] = 'X';
  ts::png::write_file(out / "bad_magic.tgrm", b);

  b = small_bytes;
  b[4] = 2;
  ts::png::write_file(out / "bad_version.tgrm", b);

  b = with_header(small_bytes,
                  R"({"height":2,"meta":{},"temp_unit":"celsius","width":4})");
  ts::png::write_file(out / "shape_mismatch.tgrm", b);

  b = with_header(small_bytes, R"({"height":2,"meta":{},"temp_unit":"kelvin","width":3})");
  ts::png::write_file(out / "bad_header.tgrm", b);

  b = small_bytes;
  put_float(b, first_float(b) + 4 * 4, std::numeric_limits<float>::quiet_NaN());
  ts::png::write_file(out / "nonfinite.tgrm", b);

  b = small_bytes;
  put_float(b, first_float(b) + 4 * 2, 250.0f);
  ts::png::write_file(out / "out_of_range.tgrm", b);

  b = small_bytes;
  b.push_back(0);
  ts::png::write_file(out / "trailing_bytes.tgrm", b);

  b = small_bytes;
  b.resize(b.size() - 9);
  ts::png::write_file(out / "truncated.tgrm", b);

  std::cout << "fixtures written to " << out << "\n";
  return 0;
}
