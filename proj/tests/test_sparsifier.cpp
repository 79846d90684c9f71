#include <doctest.h>

#include <cstdio>
#include <set>
#include <vector>

#include "mam/oracle.hpp"
#include "mam/sparsifier.hpp"
#include "mam/util.hpp"
#include "test_helpers.hpp"

using namespace mam;

TEST_CASE("catalog JSON survives a save/load round trip") {
  std::vector<PartShape> catalog = {{0, {{0, -1}, {0, 0}, {0, 1}}},
                                    {3, {{-1, 0}, {0, 0}, {1, 0}, {1, 1}}}};
  std::string path = "catalog_roundtrip_test.json";
  save_catalog(path, catalog);
  CHECK(load_catalog(path) == catalog);
  std::remove(path.c_str());
  CHECK_THROWS_AS(catalog_from_json_string("{\"parts\": 3}"), ParseError);
  CHECK_THROWS_AS(catalog_from_json_string("not json"), ParseError);
}

TEST_CASE("line graph reproduces the K=2 grounding structure") {
  SparsifierGraph sg = build_sparsifier(1, 5, fixtures::line_catalog(), 1, -2.0, -4.0, -1.0);
  CHECK(sg.placements.size() == 5);
  CHECK(sg.graph.num_variables() == 10);
  CHECK(sg.graph.num_factors() == 10);  // 5 OR + 5 priors
  // Parent counts per pixel: clipped segments give 2,3,3,3,2.
  std::vector<std::size_t> parent_counts;
  for (int c = 0; c < 5; ++c) {
    const auto* spec = std::get_if<OrFactorSpec>(&sg.graph.factor(c));
    REQUIRE(spec != nullptr);
    CHECK(spec->pixel_var == sg.pixel_var(0, c));
    parent_counts.push_back(spec->parents.size());
  }
  CHECK(parent_counts == std::vector<std::size_t>{2, 3, 3, 3, 2});
}

TEST_CASE("a 1x1 part yields exactly one parent per pixel") {
  std::vector<PartShape> dot = {{0, {{0, 0}}}};
  SparsifierGraph sg = build_sparsifier(2, 3, dot, 1, -2.0, -4.0, -1.0);
  CHECK(sg.placements.size() == 6);
  for (int f = 0; f < 6; ++f) {
    const auto* spec = std::get_if<OrFactorSpec>(&sg.graph.factor(f));
    REQUIRE(spec != nullptr);
    CHECK(spec->parents.size() == 1);
  }
}

TEST_CASE("a 2x2 part on a 3x3 image: clipped anchors, 4 parents at center") {
  std::vector<PartShape> square = {{0, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}}};
  auto placements = enumerate_placements(3, 3, square, 1);
  // Boundary anchors keep their clipped support, so all 9 anchors survive;
  // the four fully-inside ones cover 4 pixels each.
  CHECK(placements.size() == 9);
  SparsifierGraph sg = build_placement_graph(3, 3, square, placements, -2.0, -4.0, -1.0);
  int full = 0;
  for (const auto& support : sg.support) {
    if (support.size() == 4) ++full;
  }
  CHECK(full == 4);
  const auto* center = std::get_if<OrFactorSpec>(&sg.graph.factor(4));
  REQUIRE(center != nullptr);
  CHECK(center->pixel_var == sg.pixel_var(1, 1));
  CHECK(center->parents.size() == 4);
}

TEST_CASE("pixels out of every support get the parentless unary") {
  std::vector<PartShape> dot = {{0, {{0, 0}}}};
  auto placements = enumerate_placements(1, 3, dot, 1);
  placements.erase(placements.begin() + 1);  // drop the middle placement
  SparsifierGraph sg = build_placement_graph(1, 3, dot, placements, -2.0, -4.0, -1.0);
  const auto* orphan = std::get_if<UnaryFactor>(&sg.graph.factor(1));
  REQUIRE(orphan != nullptr);
  CHECK(orphan->var == sg.pixel_var(0, 1));
  CHECK(orphan->log_pot_on == -4.0);
  CHECK(orphan->log_pot_off == 0.0);
}

TEST_CASE("empty catalog is rejected") {
  CHECK_THROWS_AS(build_sparsifier(3, 3, {}, 1, -2.0, -4.0, -1.0), ShapeError);
}

TEST_CASE("all-OFF image sparsifies to nothing") {
  BinaryImage blank(4, 6);
  SparsifyResult r = sparsify(blank, fixtures::line_catalog(), {});
  CHECK(r.activations.empty());
  CHECK(r.score == 0.0);
  CHECK(r.best_restart == -1);
}

TEST_CASE("K=2 line grounds as one of the three optimal pairs, bit-exact") {
  SparsifyParams params;  // log pi01 -2, log pi10 -4, prior -1
  SparsifyResult r = sparsify(fixtures::line_image(2), fixtures::line_catalog(), params);
  std::set<int> cols = fixtures::activation_cols(r.activations);
  bool known = false;
  for (const auto& optimum : fixtures::line_k2_optima()) known = known || cols == optimum;
  CHECK(known);
  CHECK(r.score == 2.0 * params.part_prior);
  CHECK(map_score(r.graph.graph, r.assignment) == r.score);
  // The all-OFF fallback prices every lit pixel as spurious.
  Assignment all_off = r.assignment;
  for (const auto& pl : r.graph.placements) all_off[std::size_t(pl.var.value)] = 0;
  CHECK(map_score(r.graph.graph, all_off) == 5.0 * params.log_pi10);
}

TEST_CASE("K=3 line matches the oracle optimum") {
  SparsifyParams params;
  BinaryImage img = fixtures::line_image(3);
  SparsifyResult r = sparsify(img, fixtures::line_catalog(), params);
  CHECK(r.activations.size() == 3);
  Evidence ev(r.graph.graph.num_variables(), 0.0);
  for (int c = 0; c < img.cols; ++c) {
    ev[std::size_t(r.graph.pixel_var(0, c).value)] = img.at(0, c) ? 1e4 : -1e4;
  }
  MapResult oracle = brute_force_map(r.graph.graph, ev);
  CHECK(map_score(r.graph.graph, r.assignment) == map_score(r.graph.graph, oracle.assignment));
}

TEST_CASE("sparsify never loses to the all-OFF assignment") {
  mam::Rng rng(61);
  for (int trial = 0; trial < 6; ++trial) {
    BinaryImage img(3, 8);
    for (auto& b : img.bits) b = std::uint8_t(rng.uniform() < 0.3);
    SparsifyResult r = sparsify(img, fixtures::line_catalog(), {});
    Assignment all_off = r.assignment;
    for (const auto& pl : r.graph.placements) all_off[std::size_t(pl.var.value)] = 0;
    CHECK(r.score >= map_score(r.graph.graph, all_off));
  }
}

TEST_CASE("relaxing the prior never removes parts from the oracle optimum") {
  for (int k : {2, 3}) {
    BinaryImage img = fixtures::line_image(k);
    std::size_t prev_on = 0;
    for (double prior : {-3.0, -2.0, -1.0, -0.5, -0.1}) {
      SparsifierGraph sg = build_sparsifier(1, img.cols, fixtures::line_catalog(), 1,
                                            -2.0, -4.0, prior);
      Evidence ev(sg.graph.num_variables(), 0.0);
      for (int c = 0; c < img.cols; ++c) ev[std::size_t(c)] = 1e4;
      MapResult oracle = brute_force_map(sg.graph, ev);
      std::size_t on = 0;
      for (const auto& pl : sg.placements) on += oracle.assignment[std::size_t(pl.var.value)];
      CHECK(on >= prev_on);
      prev_on = on;
    }
  }
}
