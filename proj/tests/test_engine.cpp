#include <doctest.h>

#include <cmath>
#include <vector>

#include "mam/engine.hpp"
#include "mam/gene_network.hpp"
#include "mam/oracle.hpp"
#include "mam/toy_grid.hpp"
#include "mam/util.hpp"
#include "test_helpers.hpp"

using namespace mam;

TEST_CASE("single unary: exact message, immediate convergence") {
  FactorGraph g;
  VariableId v = g.add_variable(VarKind::part);
  g.add_factor(UnaryFactor{v, 0.0, 1.5});
  BpConfig cfg;
  cfg.damping = 0.0;
  BpResult r = run_mpbp(g, {0.0}, cfg);
  CHECK(r.converged);
  CHECK(r.iters_run <= 2);
  REQUIRE(r.messages.factor_to_var.size() == 1);
  CHECK(r.messages.factor_to_var[0] == 1.5);
  CHECK(decode(g, r.messages, {0.0}) == Assignment{1});
}

TEST_CASE("all-zero messages and evidence decode to all-OFF") {
  ToyGrid grid = build_toy_grid({});
  Evidence ev(grid.graph.num_variables(), 0.0);
  BpResult r = run_mpbp(grid.graph, ev);
  Assignment x = decode(grid.graph, r.messages, ev);
  for (std::uint8_t s : x) CHECK(s == 0);
}

TEST_CASE("EdgeIndex agrees with graph adjacency") {
  mam::Rng rng(5);
  auto fx = fixtures::random_tree(rng);
  EdgeIndex index(fx.graph);
  std::size_t total = 0;
  for (std::int32_t f = 0; f < std::int32_t(fx.graph.num_factors()); ++f) {
    CHECK(index.factor_end(f) - index.factor_begin(f) == fx.graph.scope(f).size());
    for (std::size_t e = index.factor_begin(f); e < index.factor_end(f); ++e) {
      CHECK(index.edge_var(e) == fx.graph.scope(f)[e - index.factor_begin(f)].value);
    }
    total += fx.graph.scope(f).size();
  }
  CHECK(index.num_edges() == total);
  for (std::int32_t v = 0; v < std::int32_t(fx.graph.num_variables()); ++v) {
    auto [begin, end] = index.var_edges(v);
    CHECK(std::size_t(end - begin) == fx.graph.factors_of(VariableId{v}).size());
  }
}

TEST_CASE("identical runs are bit-identical for any thread count") {
  ToyGrid grid = build_toy_grid({});
  mam::Rng rng(23);
  Evidence ev(grid.graph.num_variables());
  for (auto& e : ev) e = rng.uniform(-1.0, 1.0);
  BpConfig cfg;
  cfg.max_iters = 40;
  BpResult base = run_mpbp(grid.graph, ev, cfg);
  for (int threads : {2, 5, 16}) {
    BpConfig c2 = cfg;
    c2.threads = threads;
    BpResult r = run_mpbp(grid.graph, ev, c2);
    CHECK(r.iters_run == base.iters_run);
    REQUIRE(r.messages.factor_to_var.size() == base.messages.factor_to_var.size());
    for (std::size_t e = 0; e < base.messages.factor_to_var.size(); ++e) {
      CHECK(r.messages.factor_to_var[e] == base.messages.factor_to_var[e]);
      CHECK(r.messages.var_to_factor[e] == base.messages.var_to_factor[e]);
    }
  }
}

TEST_CASE("undamped decode attains the oracle optimum on random trees") {
  mam::Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    auto fx = fixtures::random_tree(rng);
    BpConfig cfg;
    cfg.damping = 0.0;
    BpResult r = run_mpbp(fx.graph, fx.evidence, cfg);
    Assignment x = decode(fx.graph, r.messages, fx.evidence);
    MapResult oracle = brute_force_map(fx.graph, fx.evidence);
    CHECK(map_score(fx.graph, x, fx.evidence) == oracle.score);
  }
}

TEST_CASE("messages stay finite when every factor keeps both states open") {
  mam::Rng rng(47);
  FactorGraph g;
  for (int i = 0; i < 8; ++i) g.add_variable(VarKind::part);
  for (int i = 0; i < 8; ++i) {  // a loopy ring plus chords, all-finite tables
    std::vector<double> pots(4);
    for (auto& p : pots) p = rng.uniform(-1.0, 1.0);
    g.add_factor(TableFactor{{VariableId{i}, VariableId{(i + 1) % 8}}, std::move(pots)});
  }
  g.add_factor(TableFactor{{VariableId{0}, VariableId{4}}, {0.1, -0.2, 0.3, 0.0}});
  BpResult r = run_mpbp(g, Evidence(8, 0.25));
  for (double m : r.messages.factor_to_var) CHECK(std::isfinite(m));
  for (double m : r.messages.var_to_factor) CHECK(std::isfinite(m));
}

TEST_CASE("gene network decodes the context-gated attention state") {
  GeneNetwork net = build_gene_network_demo();
  Evidence ev(net.graph.num_variables(), 0.0);
  ev[std::size_t(net.x_a.value)] = 6.0;
  ev[std::size_t(net.x_c.value)] = 6.0;
  BpResult r = run_mpbp(net.graph, ev);
  Assignment x = decode(net.graph, r.messages, ev);
  CHECK(x[std::size_t(net.x_a.value)] == 1);
  CHECK(x[std::size_t(net.x_c.value)] == 1);
  CHECK(x[std::size_t(net.a_ad.value)] == 1);
  CHECK(x[std::size_t(net.a_ab.value)] == 0);
  CHECK(x[std::size_t(net.x_d.value)] == 1);  // promoted in this context
  CHECK(!is_neg_inf(map_score(net.graph, x, ev)));
}

TEST_CASE("toy grid decodes two favored disjoint lines exactly") {
  ToyGrid grid = build_toy_grid({false});
  REQUIRE(grid.graph.num_variables() == 26);
  Evidence ev(26, 0.0);
  // Favor segments (1,1),(1,2),(3,1),(3,2); tip the line/claim symmetry so
  // line 1 takes row 1 and line 2 takes row 3.
  ev[std::size_t(grid.segment(1, 1).value)] = 2.0;
  ev[std::size_t(grid.segment(1, 2).value)] = 2.0;
  ev[std::size_t(grid.segment(3, 1).value)] = 2.0;
  ev[std::size_t(grid.segment(3, 2).value)] = 2.0;
  ev[std::size_t(grid.topdown(1, 1, 1).value)] = 0.5;
  ev[std::size_t(grid.topdown(1, 1, 2).value)] = 0.5;
  ev[std::size_t(grid.topdown(2, 3, 1).value)] = 0.5;
  ev[std::size_t(grid.topdown(2, 3, 2).value)] = 0.5;

  // Reference optimum from the independent checker enumeration.
  Assignment best;
  double best_score = kNegInf;
  for (const Assignment& x : fixtures::toy_grid_valid_configs(grid)) {
    double sc = map_score(grid.graph, x, ev);
    CHECK(!is_neg_inf(sc));  // every checker config is model-valid
    if (sc > best_score) {
      best_score = sc;
      best = x;
    }
  }
  Assignment expected(26, 0);
  expected[std::size_t(grid.segment(1, 1).value)] = 1;
  expected[std::size_t(grid.segment(1, 2).value)] = 1;
  expected[std::size_t(grid.segment(3, 1).value)] = 1;
  expected[std::size_t(grid.segment(3, 2).value)] = 1;
  expected[std::size_t(grid.line(1).value)] = 1;
  expected[std::size_t(grid.line(2).value)] = 1;
  expected[std::size_t(grid.topdown(1, 1, 1).value)] = 1;
  expected[std::size_t(grid.topdown(1, 1, 2).value)] = 1;
  expected[std::size_t(grid.topdown(2, 3, 1).value)] = 1;
  expected[std::size_t(grid.topdown(2, 3, 2).value)] = 1;
  CHECK(best == expected);

  BpResult r = run_mpbp(grid.graph, ev);
  CHECK(decode(grid.graph, r.messages, ev) == expected);
}

TEST_CASE("noisy_messages is seeded, bounded, and seed-sensitive") {
  ToyGrid grid = build_toy_grid({});
  MessageState a = noisy_messages(grid.graph, 11, 1e-3);
  MessageState b = noisy_messages(grid.graph, 11, 1e-3);
  MessageState c = noisy_messages(grid.graph, 12, 1e-3);
  CHECK(a.var_to_factor == b.var_to_factor);
  CHECK(a.factor_to_var == b.factor_to_var);
  CHECK(a.var_to_factor != c.var_to_factor);
  for (double m : a.var_to_factor) CHECK(std::abs(m) <= 1e-3);
  for (double m : a.factor_to_var) CHECK(std::abs(m) <= 1e-3);
}
