#include <doctest.h>

#include <json.hpp>
#include <vector>

#include "mam/gene_network.hpp"
#include "mam/graph.hpp"
#include "mam/graph_json.hpp"
#include "mam/toy_grid.hpp"
#include "mam/util.hpp"
#include "mam/validate.hpp"
#include "test_helpers.hpp"

using namespace mam;

namespace {

FactorGraph attention_pair_graph() {
  // Two parts coupled through one attention variable: the smallest
  // well-formed MAM.
  FactorGraph g;
  VariableId x0 = g.add_variable(VarKind::part, "x0");
  VariableId x1 = g.add_variable(VarKind::part, "x1");
  VariableId a = g.add_variable(VarKind::attention, "a{0,1}");
  MamHofSpec h0{x0, {{a}}, {{0}, {1}}, {0.0, 0.5}};
  MamHofSpec h1{x1, {{a}}, {{0}, {1}}, {0.0, 0.5}};
  g.add_factor(h0);
  g.add_factor(h1);
  return g;
}

}  // namespace

TEST_CASE("construction keeps adjacency consistent in both directions") {
  FactorGraph g = attention_pair_graph();
  CHECK(g.num_variables() == 3);
  CHECK(g.num_factors() == 2);
  for (std::int32_t f = 0; f < std::int32_t(g.num_factors()); ++f) {
    for (VariableId v : g.scope(f)) {
      const auto& back = g.factors_of(v);
      CHECK(std::count(back.begin(), back.end(), f) == 1);
    }
  }
  CHECK(g.variable(VariableId{2}).kind == VarKind::attention);
  CHECK(g.variable(VariableId{2}).label == "a{0,1}");
}

TEST_CASE("add_factor rejects malformed scopes") {
  FactorGraph g;
  VariableId v = g.add_variable(VarKind::part);
  CHECK_THROWS_AS(g.add_factor(UnaryFactor{VariableId{5}, 0.0, 0.0}), ShapeError);
  CHECK_THROWS_AS(g.add_factor(TableFactor{{v, v}, {0, 0, 0, 0}}), ShapeError);
  CHECK_THROWS_AS(g.add_factor(TableFactor{{v}, {0, 0, 0}}), ShapeError);
  // Missing all-zero pattern.
  VariableId a = g.add_variable(VarKind::attention);
  CHECK_THROWS_AS(g.add_factor(MamHofSpec{v, {{a}}, {{1}}, {0.0}}), ShapeError);
  CHECK_THROWS_AS(g.add_factor(OrFactorSpec{v, {}, -1.0, -1.0}), ShapeError);
}

TEST_CASE("table potentials index big-endian in declaration order") {
  FactorGraph g;
  VariableId a = g.add_variable(VarKind::part);
  VariableId b = g.add_variable(VarKind::part);
  TableFactor t{{a, b}, {0.0, 1.0, 2.0, 3.0}};
  g.add_factor(t);
  std::uint8_t s10[] = {1, 0};
  std::uint8_t s01[] = {0, 1};
  CHECK(factor_potential(g.factor(0), s10) == 2.0);
  CHECK(factor_potential(g.factor(0), s01) == 1.0);
}

TEST_CASE("map_score sums factors plus evidence and honors the sentinel") {
  FactorGraph g;
  VariableId a = g.add_variable(VarKind::part);
  VariableId b = g.add_variable(VarKind::part);
  g.add_factor(TableFactor{{a, b}, {0.0, kNegInf, 1.0, 3.0}});
  g.add_factor(UnaryFactor{a, 0.25, -0.5});
  Evidence ev = {2.0, -1.0};
  CHECK(map_score(g, {1, 1}, ev) == doctest::Approx(3.0 - 0.5 + 2.0 - 1.0));
  CHECK(map_score(g, {0, 0}, ev) == doctest::Approx(0.25));
  CHECK(is_neg_inf(map_score(g, {0, 1}, ev)));
  CHECK(map_score(g, {1, 0}) == doctest::Approx(1.0 - 0.5));
}

TEST_CASE("validate: gene network demo is a well-formed MAM") {
  GeneNetwork net = build_gene_network_demo();
  CHECK(validate_mam_constraints(net.graph).empty());
}

TEST_CASE("validate: graphs without attention variables are vacuously valid") {
  FactorGraph g;
  VariableId a = g.add_variable(VarKind::part);
  VariableId b = g.add_variable(VarKind::pixel);
  g.add_factor(OrFactorSpec{b, {a}, -2.0, -4.0});
  g.add_factor(UnaryFactor{a, 0.0, -1.0});
  CHECK(validate_mam_constraints(g).empty());
}

TEST_CASE("validate: attention-only factor violates the coupling constraint") {
  FactorGraph g = attention_pair_graph();
  VariableId a2 = g.add_variable(VarKind::attention, "a{0,1}b");
  // A factor touching only attention variables: constraint (3) breach, and
  // a2 now lacks two regular endpoints, breaching (2) as well.
  g.add_factor(TableFactor{{VariableId{2}, a2}, {0.0, 0.0, 0.0, 0.0}});
  auto report = validate_mam_constraints(g);
  REQUIRE(!report.empty());
  bool saw3 = false;
  for (const auto& v : report) saw3 = saw3 || v.constraint == 3;
  CHECK(saw3);
}

TEST_CASE("validate: every builder in the repo yields a valid MAM") {
  CHECK(validate_mam_constraints(build_gene_network_demo().graph).empty());
  CHECK(validate_mam_constraints(build_toy_grid({}).graph).empty());
  CHECK(validate_mam_constraints(build_toy_grid({false}).graph).empty());
  auto line = build_sparsifier(1, 5, fixtures::line_catalog(), 1, -2.0, -4.0, -1.0);
  CHECK(validate_mam_constraints(line.graph).empty());
}

TEST_CASE("gene network gate factor matches the four admissible joint states") {
  GeneNetwork net = build_gene_network_demo();
  std::int32_t gate_id = -1;
  for (std::int32_t f = 0; f < std::int32_t(net.graph.num_factors()); ++f) {
    if (net.graph.scope(f).size() == 4) gate_id = f;
  }
  REQUIRE(gate_id >= 0);
  const FactorSpec& gate = net.graph.factor(gate_id);
  auto scope = factor_scope(gate);
  REQUIRE(scope == std::vector<VariableId>{net.x_a, net.x_c, net.a_ab, net.a_ad});
  auto pot = [&](std::uint8_t xa, std::uint8_t xc, std::uint8_t ab, std::uint8_t ad) {
    std::uint8_t s[] = {xa, xc, ab, ad};
    return factor_potential(gate, s);
  };
  CHECK(pot(0, 0, 0, 0) == 0.0);
  CHECK(pot(0, 1, 0, 0) == 0.0);
  CHECK(pot(1, 0, 1, 0) == 0.0);
  CHECK(pot(1, 1, 0, 1) == 0.0);
  CHECK(is_neg_inf(pot(1, 0, 0, 1)));
  CHECK(is_neg_inf(pot(1, 1, 1, 0)));
  CHECK(is_neg_inf(pot(0, 0, 1, 0)));
  CHECK(is_neg_inf(pot(1, 0, 0, 0)));
}

TEST_CASE("JSON round-trip reproduces graphs structurally") {
  mam::Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    FactorGraph g = fixtures::random_tree(rng).graph;
    nlohmann::json j = graph_to_json(g);
    FactorGraph back = graph_from_json(j);
    CHECK(graph_to_json(back) == j);
    CHECK(back.num_variables() == g.num_variables());
    CHECK(back.num_factors() == g.num_factors());
  }
  // Builders with every factor family and sentinel entries.
  GeneNetwork net = build_gene_network_demo();
  ToyGrid grid = build_toy_grid({});
  for (const FactorGraph* g : {&net.graph, &grid.graph}) {
    nlohmann::json j = graph_to_json(*g);
    CHECK(graph_to_json(graph_from_json(j)) == j);
  }
}

TEST_CASE("sentinel potentials serialize as the string -inf") {
  FactorGraph g;
  VariableId a = g.add_variable(VarKind::part);
  g.add_factor(UnaryFactor{a, 0.0, kNegInf});
  nlohmann::json j = graph_to_json(g);
  CHECK(j["format_version"] == 1);
  CHECK(j["factors"][0]["log_pot"][1] == "-inf");
  FactorGraph back = graph_from_json(j);
  std::uint8_t on[] = {1};
  CHECK(is_neg_inf(factor_potential(back.factor(0), on)));
}

TEST_CASE("graph parsing rejects junk and version mismatches") {
  CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse("{\"variables\": []}")), ParseError);
  nlohmann::json j = graph_to_json(attention_pair_graph());
  j["format_version"] = 999;
  CHECK_THROWS_AS(graph_from_json(j), ParseError);
}

TEST_CASE("evidence round-trips and validates ids") {
  FactorGraph g = attention_pair_graph();
  Evidence ev = {0.5, -1.25, 0.0};
  nlohmann::json j = evidence_to_json(ev);
  Evidence back = evidence_from_json(j, g.num_variables());
  CHECK(back == ev);
  nlohmann::json bad = {{"7", 1.0}};
  CHECK_THROWS_AS(evidence_from_json(bad, g.num_variables()), ShapeError);
}
