// Picks the default minimum defect-blob size. For noise-only modules the
// threshold mean+std sits about one sigma into the noise, so roughly 16% of
// pixels land in F whatever the noise level, in clusters whose size grows
// with module area. The largest such cluster per module sets the false
// positive rate; the smallest blob grown around a 10 C hot spot sets the miss
// rate. The tool prints both distributions for the detection scenarios.
#include <algorithm>
#include <cstdio>
#include <vector>

#include "scenarios.hpp"
#include "thermoscan/analysis.hpp"
#include "thermoscan/pipeline.hpp"

namespace ts = thermoscan;

namespace {

std::size_t quantile(std::vector<std::size_t> v, double q) {
  std::sort(v.begin(), v.end());
  const auto i = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
  return v[i];
}

// Truth module whose pixels overlap segmented module `label` most.
int truth_of(const ts::SyntheticThermogram& syn, const ts::SegmentationResult& seg, int label) {
  std::vector<std::size_t> votes(static_cast<std::size_t>(syn.truth_labels.label_count) + 1, 0);
  for (std::size_t i = 0; i < seg.labels.labels.size(); ++i) {
    if (seg.labels.labels[i] == label) ++votes[syn.truth_labels.labels[i]];
  }
  votes[0] = 0;
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace

int main(int argc, char** argv) {
  const int count = argc > 1 ? std::atoi(argv[1]) : 400;
  ts::AnalysisConfig cfg;
  cfg.min_blob_size = 1;

  std::vector<std::size_t> noise_max;
  std::vector<std::size_t> spot_blob;
  std::size_t truth_px = 0, hit_px = 0, flagged_px = 0;
  for (int i = 0; i < count; ++i) {
    for (double delta : {0.0, 10.0}) {
      const auto spec = ts::scenarios::detection(i, delta);
      const auto syn = ts::generate_synthetic(spec);
      const auto seg = ts::segment_modules(syn.thermogram);
      const auto rep = ts::analyze(syn.thermogram, seg, cfg);
      if (delta > 0) {
        for (auto v : syn.truth_defects.values()) truth_px += v;
      }
      for (const auto& m : rep.modules) {
        const int truth = truth_of(syn, seg, m.label) - 1;
        const bool has_spot = std::any_of(spec.hot_spots.begin(), spec.hot_spots.end(),
                                          [&](const ts::HotSpot& h) { return h.module == truth; });
        std::size_t biggest = 0;
        for (const auto& b : m.blobs) biggest = std::max(biggest, b.size);
        (has_spot ? spot_blob : noise_max).push_back(biggest);
        if (delta > 0 && has_spot) {
          flagged_px += m.defect_pixels.size();
          for (const auto& p : m.defect_pixels) hit_px += syn.truth_defects(p.row, p.col);
        }
      }
    }
  }
  std::printf("noise-only modules: %zu\n", noise_max.size());
  for (double q : {0.5, 0.9, 0.95, 0.99, 0.999, 1.0}) {
    std::printf("  q%.3f largest blob %zu\n", q, quantile(noise_max, q));
  }
  std::printf("hot-spot modules: %zu\n", spot_blob.size());
  for (double q : {0.0, 0.01, 0.05, 0.5}) {
    std::printf("  q%.3f largest blob %zu\n", q, quantile(spot_blob, q));
  }
  std::printf("hot-spot pixels: recall %.4f precision %.4f\n",
              static_cast<double>(hit_px) / static_cast<double>(truth_px),
              static_cast<double>(hit_px) / static_cast<double>(flagged_px));
  for (std::size_t k : {20u, 25u, 30u, 35u, 40u, 45u, 50u}) {
    const auto fp = std::count_if(noise_max.begin(), noise_max.end(),
                                  [&](std::size_t s) { return s >= k; });
    const auto miss = std::count_if(spot_blob.begin(), spot_blob.end(),
                                    [&](std::size_t s) { return s < k; });
    std::printf("min_blob_size %2zu: false positive %.4f  missed %.4f\n", k,
                static_cast<double>(fp) / static_cast<double>(noise_max.size()),
                static_cast<double>(miss) / static_cast<double>(spot_blob.size()));
  }
}
