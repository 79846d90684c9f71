#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "mam/gene_network.hpp"
#include "mam/graph.hpp"
#include "mam/oracle.hpp"
#include "mam/sparsifier.hpp"
#include "mam/util.hpp"
#include "test_helpers.hpp"

using namespace mam;

TEST_CASE("brute_force_map on the empty graph") {
  FactorGraph g;
  MapResult r = brute_force_map(g, {});
  CHECK(r.assignment.empty());
  CHECK(r.score == 0.0);
  CHECK(r.is_unique);
  CHECK(r.num_optima == 1);
}

TEST_CASE("brute_force_map on a single unary follows the log-odds") {
  FactorGraph g;
  VariableId v = g.add_variable(VarKind::part);
  g.add_factor(UnaryFactor{v, 0.0, 2.0});
  MapResult r = brute_force_map(g, {0.0});
  CHECK(r.assignment == Assignment{1});
  CHECK(r.score == 2.0);
  CHECK(r.is_unique);
  // A tie returns the lexicographically smallest assignment, all-OFF here.
  g.add_factor(UnaryFactor{v, 0.0, -2.0});
  MapResult tie = brute_force_map(g, {0.0});
  CHECK(tie.assignment == Assignment{0});
  CHECK(!tie.is_unique);
  CHECK(tie.num_optima == 2);
}

TEST_CASE("brute_force_map finds the three line-grounding optima") {
  SparsifierGraph sg = build_sparsifier(1, 5, fixtures::line_catalog(), 1, -2.0, -4.0, -1.0);
  REQUIRE(sg.graph.num_variables() == 10);  // 5 pixels then 5 parts
  Evidence ev(10, 0.0);
  for (int c = 0; c < 5; ++c) ev[std::size_t(c)] = 1e4;  // clamp pixels ON
  MapResult r = brute_force_map(sg.graph, ev);
  CHECK(!r.is_unique);
  CHECK(r.num_optima == 3);
  // Pure model score of the optimum, without the clamp term: 2 part priors.
  CHECK(map_score(sg.graph, r.assignment) == -2.0);
  // Lexicographically smallest optimum activates anchors {1, 4}.
  Assignment expected = {1, 1, 1, 1, 1, 0, 1, 0, 0, 1};
  CHECK(r.assignment == expected);
}

TEST_CASE("brute_force_map rejects graphs beyond the budget") {
  FactorGraph g;
  for (int i = 0; i < 30; ++i) {
    VariableId v = g.add_variable(VarKind::part);
    g.add_factor(UnaryFactor{v, 0.0, 0.1});
  }
  CHECK_THROWS_AS(brute_force_map(g, Evidence(30, 0.0)), BudgetError);
  CHECK_THROWS_AS(joint_distribution(g, Evidence(30, 0.0)), BudgetError);
}

TEST_CASE("brute_force_map dominates explicitly constructed assignments") {
  mam::Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto fx = fixtures::random_tree(rng, 10);
    MapResult r = brute_force_map(fx.graph, fx.evidence);
    Assignment x(fx.graph.num_variables());
    for (int probe = 0; probe < 20; ++probe) {
      for (auto& s : x) s = std::uint8_t(rng.coin());
      double sc = map_score(fx.graph, x, fx.evidence);
      CHECK(sc <= r.score + 1e-12);
    }
  }
}

TEST_CASE("exact messages from a unary factor equal its log-odds") {
  UnaryFactor u{VariableId{0}, 0.3, -0.7};
  double zero[] = {0.0};
  auto out = exact_factor_messages(FactorSpec{u}, zero);
  REQUIRE(out.size() == 1);
  CHECK(out[0][0] == 0.3);
  CHECK(out[0][1] == -0.7);
  // The recipient's own incoming message must drop out.
  double loud[] = {5.0};
  out = exact_factor_messages(FactorSpec{u}, loud);
  CHECK(out[0][0] == doctest::Approx(0.3));
  CHECK(out[0][1] == doctest::Approx(-0.7));
  CHECK(normalize_message(out[0][0], out[0][1]) == doctest::Approx(-1.0));
}

TEST_CASE("exact messages match the hand-computed 2-parent OR table") {
  // pi01 = pi10 = 0.1; scope [pixel, p1, p2]. The eight potential rows:
  //   (I p1 p2): 000->0  001->lp  010->lp  011->lp   (lp = log 0.1, pixel OFF
  //   with a parent ON)
  //   100->lp   101->0   110->0   111->0             (pixel ON: leak row 100)
  const double lp = std::log(0.1);
  OrFactorSpec spec{VariableId{0}, {VariableId{1}, VariableId{2}}, lp, lp};

  // All incoming zero: every max lands on a 0-potential row.
  double zeros[] = {0.0, 0.0, 0.0};
  auto out = exact_factor_messages(FactorSpec{spec}, zeros);
  REQUIRE(out.size() == 3);
  for (const auto& pair : out) {
    CHECK(pair[0] == 0.0);
    CHECK(pair[1] == 0.0);
  }

  // Skewed incoming: pixel 0.5, p2 -0.25.
  //   to pixel: M_on = max(lp, -0.25, 0, -0.25) = 0; M_off = max(0, lp-0.25,
  //             lp, lp-0.25) = 0
  //   to p1:    M_on = max(lp, lp-0.25, 0.5, 0.25) = 0.5
  //             M_off = max(0, lp-0.25, lp+0.5, 0.25) = 0.25
  //   to p2:    M_on = max(lp, lp, 0.5, 0.5) = 0.5; M_off = max(0, lp,
  //             lp+0.5, 0.5) = 0.5
  double skew[] = {0.5, 0.0, -0.25};
  out = exact_factor_messages(FactorSpec{spec}, skew);
  CHECK(out[0][0] == doctest::Approx(0.0));
  CHECK(out[0][1] == doctest::Approx(0.0));
  CHECK(out[1][0] == doctest::Approx(0.25));
  CHECK(out[1][1] == doctest::Approx(0.5));
  CHECK(out[2][0] == doctest::Approx(0.5));
  CHECK(out[2][1] == doctest::Approx(0.5));
}

TEST_CASE("exact messages are permutation-equivariant in scope order") {
  mam::Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    TableFactor t{{VariableId{0}, VariableId{1}, VariableId{2}}, {}};
    t.log_pots.resize(8);
    for (auto& p : t.log_pots) p = rng.uniform(-2.0, 2.0);
    std::vector<double> incoming = fixtures::random_incoming(rng, 3);

    // Rotate the scope left by one and re-index the table to match.
    TableFactor rot{{VariableId{1}, VariableId{2}, VariableId{0}}, std::vector<double>(8)};
    for (int s = 0; s < 8; ++s) {
      int a = (s >> 2) & 1, b = (s >> 1) & 1, c = s & 1;
      rot.log_pots[std::size_t((b << 2) | (c << 1) | a)] = t.log_pots[std::size_t(s)];
    }
    std::vector<double> rot_in = {incoming[1], incoming[2], incoming[0]};

    auto base = exact_factor_messages(FactorSpec{t}, incoming);
    auto perm = exact_factor_messages(FactorSpec{rot}, rot_in);
    for (int i = 0; i < 3; ++i) {
      CHECK(perm[std::size_t((i + 2) % 3)][0] == doctest::Approx(base[std::size_t(i)][0]));
      CHECK(perm[std::size_t((i + 2) % 3)][1] == doctest::Approx(base[std::size_t(i)][1]));
    }
  }
}

TEST_CASE("normalization is invariant to constants on raw oracle outputs") {
  mam::Rng rng(29);
  auto spec = fixtures::random_or_spec(rng);
  auto incoming = fixtures::random_incoming(rng, spec.parents.size() + 1);
  auto out = exact_factor_messages(FactorSpec{spec}, incoming);
  for (const auto& pair : out) {
    double m = normalize_message(pair[0], pair[1]);
    for (double c : {-3.0, 0.25, 10.0}) {
      CHECK(normalize_message(pair[0] + c, pair[1] + c) == doctest::Approx(m));
    }
  }
}

TEST_CASE("joint_distribution of a flat unary is uniform") {
  FactorGraph g;
  VariableId v = g.add_variable(VarKind::part);
  g.add_factor(UnaryFactor{v, 0.0, 0.0});
  auto p = joint_distribution(g, {0.0});
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  FactorGraph g2;
  VariableId w = g2.add_variable(VarKind::part);
  g2.add_factor(UnaryFactor{w, 0.0, std::log(3.0)});
  auto q = joint_distribution(g2, {0.0});
  CHECK(q[0] == doctest::Approx(0.25));
  CHECK(q[1] == doctest::Approx(0.75));
}

TEST_CASE("marginal_distribution factorizes independent variables and clamps") {
  FactorGraph g;
  VariableId a = g.add_variable(VarKind::part);
  VariableId b = g.add_variable(VarKind::part);
  g.add_factor(UnaryFactor{a, 0.0, std::log(3.0)});   // p(a=1) = 0.75
  g.add_factor(UnaryFactor{b, 0.0, -std::log(4.0)});  // p(b=1) = 0.2
  VariableId targets[] = {a, b};
  auto p = marginal_distribution(g, {0.0, 0.0}, targets, {});
  REQUIRE(p.size() == 4);
  CHECK(p[0] == doctest::Approx(0.25 * 0.8));  // big-endian: (a, b)
  CHECK(p[1] == doctest::Approx(0.25 * 0.2));
  CHECK(p[2] == doctest::Approx(0.75 * 0.8));
  CHECK(p[3] == doctest::Approx(0.75 * 0.2));

  std::pair<VariableId, std::uint8_t> clamp[] = {{b, 1}};
  VariableId only_a[] = {a};
  auto pa = marginal_distribution(g, {0.0, 0.0}, only_a, clamp);
  CHECK(pa[1] == doctest::Approx(0.75));
}

TEST_CASE("mutual information helpers behave on known tables") {
  double indep[] = {0.25, 0.25, 0.25, 0.25};
  CHECK(mutual_information_2x2(indep) == doctest::Approx(0.0));
  double copy[] = {0.5, 0.0, 0.0, 0.5};
  CHECK(mutual_information_2x2(copy) == doctest::Approx(std::log(2.0)));
  double prod[] = {0.75 * 0.8, 0.75 * 0.2, 0.25 * 0.8, 0.25 * 0.2};
  CHECK(mutual_information_2x2(prod) == doctest::Approx(0.0));
}

TEST_CASE("conditional MI separates the gene network pairs in context") {
  GeneNetwork net = build_gene_network_demo();
  Evidence ev(net.graph.num_variables(), 0.0);
  for (std::uint8_t d = 0; d < 2; ++d) {
    std::pair<VariableId, std::uint8_t> cond[] = {{net.x_c, 1}, {net.x_d, d}};
    CHECK(conditional_mutual_information(net.graph, ev, net.x_a, net.x_b, cond) <= 1e-12);
  }
  for (std::uint8_t b = 0; b < 2; ++b) {
    std::pair<VariableId, std::uint8_t> cond[] = {{net.x_c, 0}, {net.x_b, b}};
    CHECK(conditional_mutual_information(net.graph, ev, net.x_a, net.x_d, cond) <= 1e-12);
  }
}
