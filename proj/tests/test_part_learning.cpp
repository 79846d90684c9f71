#include <doctest.h>

#include <algorithm>
#include <vector>

#include "mam/part_learning.hpp"
#include "mam/pathfinder.hpp"
#include "mam/sparsifier.hpp"
#include "test_helpers.hpp"

using namespace mam;

namespace {

// Anchor-free view of a shape: offsets shifted so the minimum corner is 0.
std::vector<std::pair<int, int>> normalized(const PartShape& shape) {
  std::vector<std::pair<int, int>> offs = shape.offsets;
  if (offs.empty()) return offs;
  int min_r = offs[0].first, min_c = offs[0].second;
  for (auto [r, c] : offs) {
    min_r = std::min(min_r, r);
    min_c = std::min(min_c, c);
  }
  for (auto& [r, c] : offs) {
    r -= min_r;
    c -= min_c;
  }
  std::sort(offs.begin(), offs.end());
  return offs;
}

// Fraction of ON pixels covered by at least one activation, and whether any
// activation spills onto an OFF pixel.
struct Coverage {
  double explained = 0.0;
  bool leaks = false;
};

Coverage coverage(const BinaryImage& img, const SparsifyResult& r) {
  std::vector<std::uint8_t> covered(img.bits.size(), 0);
  for (std::size_t i = 0; i < r.graph.placements.size(); ++i) {
    if (!r.assignment[std::size_t(r.graph.placements[i].var.value)]) continue;
    for (std::int32_t p : r.graph.support[i]) covered[std::size_t(p)] = 1;
  }
  Coverage cov;
  std::size_t on = 0, hit = 0;
  for (std::size_t p = 0; p < img.bits.size(); ++p) {
    if (img.bits[p]) {
      ++on;
      hit += covered[p];
    } else if (covered[p]) {
      cov.leaks = true;
    }
  }
  cov.explained = on ? double(hit) / double(on) : 1.0;
  return cov;
}

}  // namespace

TEST_CASE("a single repeated bar is learned back as itself") {
  // Three training images, each two disjoint copies of a horizontal 3x1 bar.
  std::vector<BinaryImage> images;
  std::vector<std::pair<int, int>> starts = {{1, 1}, {4, 5}, {2, 3}, {5, 0}, {0, 2}, {3, 6}};
  for (int i = 0; i < 3; ++i) {
    BinaryImage img(7, 9);
    for (int b = 0; b < 2; ++b) {
      auto [r, c] = starts[std::size_t(2 * i + b)];
      for (int k = 0; k < 3; ++k) img.set(r, c + k, 1);
    }
    images.push_back(img);
  }
  LearnPartsParams params;
  params.num_parts = 1;
  params.patch_rows = 3;
  params.patch_cols = 3;
  LearnPartsResult result = learn_parts(images, params);
  REQUIRE(result.catalog.size() == 1);
  CHECK(normalized(result.catalog[0]) ==
        std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {0, 2}});
  CHECK(result.warning.empty());
  CHECK(!result.all_images_empty);

  // Reconstruction: the learned shape explains every training image with no
  // leak onto OFF pixels.
  for (const auto& img : images) {
    SparsifyResult r = sparsify(img, result.catalog, {});
    Coverage cov = coverage(img, r);
    CHECK(cov.explained == 1.0);
    CHECK(!cov.leaks);
  }
}

TEST_CASE("all-OFF images produce empty shapes and a warning") {
  std::vector<BinaryImage> images(2, BinaryImage(5, 5));
  LearnPartsParams params;
  params.num_parts = 1;
  LearnPartsResult result = learn_parts(images, params);
  CHECK(result.all_images_empty);
  CHECK(!result.warning.empty());
  for (const auto& shape : result.catalog) CHECK(shape.offsets.empty());
}

TEST_CASE("16 five-by-five slots explain generated contours") {
  // Reduced-size analog of contour part learning: short dashed contours on
  // small canvases, 16 part slots with 5x5 patches. The learned catalog must
  // be fully populated and explain at least 95% of the training ON pixels.
  PathfinderGenParams gen;
  gen.rows = 22;
  gen.cols = 22;
  gen.n_targets = 1;
  gen.target_len_min = 3;
  gen.target_len_max = 3;
  gen.n_distractors = 0;
  gen.max_retries = 4000;
  std::vector<BinaryImage> images;
  for (std::uint64_t s = 0; s < 3; ++s) {
    gen.seed = 900 + s;
    images.push_back(generate_pathfinder(gen).image);
  }
  LearnPartsParams params;
  params.num_parts = 16;
  params.patch_rows = 5;
  params.patch_cols = 5;
  LearnPartsResult result = learn_parts(images, params);
  for (const auto& shape : result.catalog) CHECK(!shape.offsets.empty());
  std::size_t on_total = 0, hit_total = 0;
  for (const auto& img : images) {
    SparsifyResult r = sparsify(img, result.catalog, {});
    CHECK(!r.activations.empty());
    Coverage cov = coverage(img, r);
    std::size_t on = img.count_on();
    on_total += on;
    hit_total += std::size_t(cov.explained * double(on) + 0.5);
  }
  CHECK(double(hit_total) / double(on_total) >= 0.95);
}
