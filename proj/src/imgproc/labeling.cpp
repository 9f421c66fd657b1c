#include "thermoscan/imgproc/labeling.hpp"

#include <numeric>
#include <vector>

namespace thermoscan::imgproc {
namespace {

class DisjointSets {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // The smaller provisional label is the older one; keep it as the root.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<int> parent_;
};

}  // namespace

LabelMap connected_components(const BinaryMask& b, Connectivity connectivity) {
  const int w = b.width();
  const int h = b.height();
  LabelRaster provisional(w, h, -1);
  DisjointSets sets;

  const bool eight = connectivity == Connectivity::Eight;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!b(r, c)) continue;
      int label = -1;
      const auto visit = [&](int nr, int nc) {
        if (nr < 0 || nc < 0 || nc >= w) return;
        const int n = provisional(nr, nc);
        if (n < 0) return;
        if (label < 0) {
          label = n;
        } else {
          sets.join(label, n);
        }
      };
      visit(r, c - 1);
      visit(r - 1, c);
      if (eight) {
        visit(r - 1, c - 1);
        visit(r - 1, c + 1);
      }
      provisional(r, c) = label < 0 ? sets.make() : label;
    }
  }

  std::vector<int> final_label(sets.size(), 0);
  int next = 0;
  LabelMap out(w, h);
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    const int p = provisional[i];
    if (p < 0) continue;
    const int root = sets.find(p);
    if (final_label[root] == 0) final_label[root] = ++next;
    out.labels[i] = final_label[root];
  }
  out.label_count = next;
  return out;
}

}  // namespace thermoscan::imgproc
