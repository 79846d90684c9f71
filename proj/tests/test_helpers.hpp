#pragma once

// Fixture builders shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <array>
#include <set>
#include <vector>

#include "mam/graph.hpp"
#include "mam/image.hpp"
#include "mam/logdomain.hpp"
#include "mam/oracle.hpp"
#include "mam/sparsifier.hpp"
#include "mam/toy_grid.hpp"
#include "mam/util.hpp"

namespace fixtures {

// Centered 1x3 segment; on a 1x(3K-1) all-ON line this reproduces the
// K-segment grounding example (parent sets 2,3,3,3,2 when K=2).
inline std::vector<mam::PartShape> line_catalog() {
  return {mam::PartShape{0, {{0, -1}, {0, 0}, {0, 1}}}};
}

inline mam::BinaryImage line_image(int k) {
  mam::BinaryImage img(1, 3 * k - 1);
  for (int c = 0; c < img.cols; ++c) img.set(0, c, 1);
  return img;
}

// The three optimal part sets for K=2 as column anchors (0-based).
inline std::vector<std::set<int>> line_k2_optima() {
  return {{0, 3}, {1, 3}, {1, 4}};
}

inline std::set<int> activation_cols(const std::vector<mam::Placement>& acts) {
  std::set<int> cols;
  for (const auto& p : acts) cols.insert(p.col);
  return cols;
}

// Random HOF within the acceptance envelope: <=3 groups of <=3 variables,
// <=4 patterns including all-zero, finite potentials. Scope ids are
// 0 (part), 1.. (attention, group order).
inline mam::MamHofSpec random_hof_spec(mam::Rng& rng) {
  mam::MamHofSpec spec;
  spec.part_var = mam::VariableId{0};
  int n_groups = rng.uniform_int(1, 3);
  std::int32_t next = 1;
  for (int g = 0; g < n_groups; ++g) {
    std::vector<mam::VariableId> group;
    int size = rng.uniform_int(1, 3);
    for (int i = 0; i < size; ++i) group.push_back(mam::VariableId{next++});
    spec.groups.push_back(std::move(group));
  }
  std::set<std::vector<std::uint8_t>> patterns;
  patterns.insert(std::vector<std::uint8_t>(std::size_t(n_groups), 0));
  int extra = rng.uniform_int(1, 3);
  for (int i = 0; i < extra; ++i) {
    std::vector<std::uint8_t> b(std::size_t(n_groups), 0);
    for (auto& bit : b) bit = std::uint8_t(rng.coin());
    patterns.insert(b);
  }
  for (const auto& b : patterns) {
    spec.patterns.push_back(b);
    spec.potentials.push_back(rng.uniform(-2.0, 2.0));
  }
  return spec;
}

inline mam::OrFactorSpec random_or_spec(mam::Rng& rng) {
  mam::OrFactorSpec spec;
  spec.pixel_var = mam::VariableId{0};
  int n_parents = rng.uniform_int(1, 6);
  for (int i = 0; i < n_parents; ++i) spec.parents.push_back(mam::VariableId{i + 1});
  spec.log_pi01 = rng.uniform(-5.0, -0.8);
  spec.log_pi10 = rng.uniform(-5.0, -0.8);
  return spec;
}

inline std::vector<double> random_incoming(mam::Rng& rng, std::size_t n) {
  std::vector<double> m(n);
  for (auto& v : m) v = rng.uniform(-3.0, 3.0);
  return m;
}

// Worst absolute difference between a computed normalized message vector and
// the oracle's unnormalized per-position pairs (matching sentinels count as
// zero difference).
inline double max_message_deviation(std::span<const double> got,
                                    const std::vector<std::array<double, 2>>& exact) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    double ref = mam::normalize_message(exact[i][0], exact[i][1]);
    worst = std::max(worst, mam::message_delta(got[i], ref));
  }
  return worst;
}

// Random tree-structured graph with all four factor kinds. Every factor
// touches at most one pre-existing variable, so the bipartite
// variable/factor graph stays acyclic (and connected). Returns evidence in
// [-2, 2] alongside.
struct TreeFixture {
  mam::FactorGraph graph;
  mam::Evidence evidence;
};

inline TreeFixture random_tree(mam::Rng& rng, int max_vars = 16) {
  TreeFixture fx;
  auto& g = fx.graph;
  g.add_variable(mam::VarKind::part);
  int target = rng.uniform_int(4, max_vars);
  while (int(g.num_variables()) < target) {
    int budget = target - int(g.num_variables());
    mam::VariableId base{rng.uniform_int(0, int(g.num_variables()) - 1)};
    int kind = rng.uniform_int(0, 3);
    if (kind == 0) {
      g.add_factor(mam::UnaryFactor{base, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
      mam::VariableId v = g.add_variable(mam::VarKind::part);
      g.add_factor(mam::TableFactor{{base, v},
                                    {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                     rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}});
    } else if (kind == 1) {
      mam::VariableId v = g.add_variable(mam::VarKind::part);
      std::vector<double> pots(4);
      for (auto& p : pots) p = rng.uniform(-1.5, 1.5);
      g.add_factor(mam::TableFactor{{base, v}, std::move(pots)});
    } else if (kind == 2 && budget >= 2) {
      mam::MamHofSpec spec;
      spec.part_var = base;
      int cap = std::min(budget, 4);  // attention variables still affordable
      int n_groups = std::min(rng.uniform_int(1, 2), cap);
      for (int k = 0; k < n_groups; ++k) {
        int reserved = n_groups - 1 - k;
        int size = std::min(rng.uniform_int(1, 2), cap - reserved);
        cap -= size;
        std::vector<mam::VariableId> group;
        for (int i = 0; i < size; ++i) group.push_back(g.add_variable(mam::VarKind::attention));
        spec.groups.push_back(std::move(group));
      }
      std::set<std::vector<std::uint8_t>> pats;
      pats.insert(std::vector<std::uint8_t>(std::size_t(n_groups), 0));
      pats.insert(std::vector<std::uint8_t>(std::size_t(n_groups), 1));
      for (const auto& b : pats) {
        spec.patterns.push_back(b);
        spec.potentials.push_back(rng.uniform(-1.0, 1.0));
      }
      g.add_factor(std::move(spec));
    } else {
      mam::OrFactorSpec spec;
      spec.pixel_var = g.add_variable(mam::VarKind::pixel);
      spec.parents.push_back(base);
      if (budget >= 2 && rng.coin()) spec.parents.push_back(g.add_variable(mam::VarKind::part));
      spec.log_pi01 = rng.uniform(-4.0, -0.8);
      spec.log_pi10 = rng.uniform(-4.0, -0.8);
      g.add_factor(std::move(spec));
    }
  }
  fx.evidence.resize(g.num_variables());
  for (auto& e : fx.evidence) e = rng.uniform(-2.0, 2.0);
  return fx;
}

// Independent enumeration of the 26-variable toy grid's valid joint
// configurations. A line is either absent or claims one segment per column
// (choice encoded 0..15 as (row in column 1) * 4 + (row in column 2)); two
// present lines must claim disjoint segments because a segment admits at most
// one top-down attention. Segments are ON exactly when claimed. This checker
// shares only the variable id layout with the model builder, not its factors.
inline std::vector<mam::Assignment> toy_grid_valid_configs(const mam::ToyGrid& grid) {
  std::vector<mam::Assignment> out;
  auto apply = [&](mam::Assignment& x, int ell, int choice) {
    if (choice < 0) return;
    int i1 = choice / 4 + 1;
    int i2 = choice % 4 + 1;
    x[std::size_t(grid.line(ell).value)] = 1;
    x[std::size_t(grid.topdown(ell, i1, 1).value)] = 1;
    x[std::size_t(grid.topdown(ell, i2, 2).value)] = 1;
    x[std::size_t(grid.segment(i1, 1).value)] = 1;
    x[std::size_t(grid.segment(i2, 2).value)] = 1;
  };
  for (int s1 = -1; s1 < 16; ++s1) {
    for (int s2 = -1; s2 < 16; ++s2) {
      if (s1 >= 0 && s2 >= 0 && (s1 / 4 == s2 / 4 || s1 % 4 == s2 % 4)) continue;
      mam::Assignment x(26, 0);
      apply(x, 1, s1);
      apply(x, 2, s2);
      out.push_back(std::move(x));
    }
  }
  return out;
}

}  // namespace fixtures
