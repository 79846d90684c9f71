#include <doctest.h>

#include <set>

#include "mam/mam_hof.hpp"
#include "mam/toy_grid.hpp"
#include "mam/validate.hpp"
#include "test_helpers.hpp"

using namespace mam;

TEST_CASE("variable counts: 36 with laterals, 26 without") {
  CHECK(build_toy_grid({}).graph.num_variables() == 36);
  CHECK(build_toy_grid({false}).graph.num_variables() == 26);
}

TEST_CASE("id accessors span the layout without collisions") {
  ToyGrid grid = build_toy_grid({});
  CHECK(grid.segment(1, 1).value == 0);
  CHECK(grid.segment(4, 2).value == 7);
  CHECK(grid.line(1).value == 8);
  CHECK(grid.line(2).value == 9);
  CHECK(grid.topdown(1, 1, 1).value == 10);
  CHECK(grid.topdown(2, 4, 2).value == 25);
  std::set<std::int32_t> laterals;
  for (int i1 = 1; i1 <= 4; ++i1) {
    for (int i2 = std::max(1, i1 - 1); i2 <= std::min(4, i1 + 1); ++i2) {
      laterals.insert(grid.lateral(i1, i2).value);
    }
  }
  CHECK(laterals.size() == 10);
  CHECK(*laterals.begin() == 26);
  CHECK(*laterals.rbegin() == 35);
  for (std::int32_t v : laterals) {
    CHECK(grid.graph.variable(VariableId{v}).kind == VarKind::attention);
  }
}

TEST_CASE("line factors carry two groups of four and the all-or-nothing rule") {
  ToyGrid grid = build_toy_grid({});
  const auto* spec = std::get_if<MamHofSpec>(&grid.graph.factor(grid.line_factor(1)));
  REQUIRE(spec != nullptr);
  CHECK(spec->part_var == grid.line(1));
  REQUIRE(spec->groups.size() == 2);
  CHECK(spec->groups[0].size() == 4);
  CHECK(spec->groups[1].size() == 4);
  CHECK(enumerate_valid_configs(*spec).size() == 17);
}

TEST_CASE("segment factors: lateral group sizes follow row adjacency") {
  ToyGrid grid = build_toy_grid({});
  // Interior row, column 2: two claiming top-downs, three reachable laterals.
  const auto* mid = std::get_if<MamHofSpec>(&grid.graph.factor(grid.segment_factor(2, 2)));
  REQUIRE(mid != nullptr);
  REQUIRE(mid->groups.size() == 2);
  std::multiset<std::size_t> sizes = {mid->groups[0].size(), mid->groups[1].size()};
  CHECK(sizes == std::multiset<std::size_t>{2, 3});
  CHECK(enumerate_valid_configs(*mid).size() == 7);
  // Corner row 1 reaches only rows 1-2 of the other column.
  const auto* corner = std::get_if<MamHofSpec>(&grid.graph.factor(grid.segment_factor(1, 1)));
  REQUIRE(corner != nullptr);
  std::multiset<std::size_t> corner_sizes = {corner->groups[0].size(),
                                             corner->groups[1].size()};
  CHECK(corner_sizes == std::multiset<std::size_t>{2, 2});
}

TEST_CASE("without laterals each segment factor keeps only its claim group") {
  ToyGrid grid = build_toy_grid({false});
  const auto* spec = std::get_if<MamHofSpec>(&grid.graph.factor(grid.segment_factor(2, 2)));
  REQUIRE(spec != nullptr);
  REQUIRE(spec->groups.size() == 1);
  CHECK(spec->groups[0].size() == 2);
  CHECK(enumerate_valid_configs(*spec).size() == 3);  // off + either claimant
}

TEST_CASE("both variants validate as MAMs") {
  CHECK(validate_mam_constraints(build_toy_grid({}).graph).empty());
  CHECK(validate_mam_constraints(build_toy_grid({false}).graph).empty());
}

TEST_CASE("checker configurations are exactly the zero-score assignments") {
  ToyGrid grid = build_toy_grid({false});
  auto configs = fixtures::toy_grid_valid_configs(grid);
  CHECK(configs.size() == 177);  // 1 + 2*16 + 16*9
  std::set<Assignment> seen;
  for (const Assignment& x : configs) {
    CHECK(map_score(grid.graph, x) == 0.0);
    seen.insert(x);
  }
  CHECK(seen.size() == configs.size());
  // Single-bit corruptions of a valid config are forbidden by the model.
  Assignment base = configs[20];
  int flips_checked = 0;
  for (std::size_t v = 0; v < base.size(); ++v) {
    Assignment mutant = base;
    mutant[v] ^= 1;
    if (!seen.count(mutant)) {
      CHECK(is_neg_inf(map_score(grid.graph, mutant)));
      ++flips_checked;
    }
  }
  CHECK(flips_checked == 26);
}
