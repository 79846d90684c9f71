#include "mam/oracle.hpp"

#include <cmath>

#include "mam/util.hpp"

namespace mam {

namespace {

// Shared enumeration plumbing: positions of each factor's scope variables so a
// joint-state mask can be unpacked quickly. Variable v sits at bit (n-1-v),
// making the mask order the lexicographic order of assignments.
struct Enumerator {
  const FactorGraph& g;
  std::size_t n;
  std::vector<std::vector<std::int32_t>> scope_vars;

  explicit Enumerator(const FactorGraph& graph) : g(graph), n(graph.num_variables()) {
    scope_vars.reserve(g.num_factors());
    for (std::size_t f = 0; f < g.num_factors(); ++f) {
      std::vector<std::int32_t> vs;
      for (VariableId v : g.scope(std::int32_t(f))) vs.push_back(v.value);
      scope_vars.push_back(std::move(vs));
    }
  }

  bool bit(std::uint64_t mask, std::int32_t var) const {
    return (mask >> (n - 1 - std::size_t(var))) & 1u;
  }

  double score(std::uint64_t mask, const Evidence& evidence) const {
    double s = 0.0;
    std::uint8_t states[24];
    for (std::size_t f = 0; f < scope_vars.size(); ++f) {
      const auto& vs = scope_vars[f];
      for (std::size_t i = 0; i < vs.size(); ++i) states[i] = bit(mask, vs[i]) ? 1 : 0;
      s = log_add(s, factor_potential(g.factor(std::int32_t(f)),
                                      std::span<const std::uint8_t>(states, vs.size())));
      if (is_neg_inf(s)) return kNegInf;
    }
    if (!evidence.empty()) {
      for (std::size_t v = 0; v < n; ++v)
        if (bit(mask, std::int32_t(v))) s = log_add(s, evidence[v]);
    }
    return s;
  }
};

std::uint64_t checked_state_count(std::size_t n, std::uint64_t budget, const char* what) {
  if (n >= 63) throw BudgetError(std::string(what) + ": too many variables to enumerate");
  std::uint64_t total = std::uint64_t(1) << n;
  if (total > budget) throw BudgetError(std::string(what) + ": state space exceeds budget");
  return total;
}

void check_scopes(const FactorGraph& g) {
  for (std::size_t f = 0; f < g.num_factors(); ++f)
    if (g.scope(std::int32_t(f)).size() > 24)
      throw BudgetError("factor scope too large for enumeration");
}

}  // namespace

MapResult brute_force_map(const FactorGraph& g, const Evidence& evidence, std::uint64_t budget,
                          int n_threads) {
  if (!evidence.empty() && evidence.size() != g.num_variables())
    throw ShapeError("evidence size mismatch");
  check_scopes(g);
  const std::uint64_t total = checked_state_count(g.num_variables(), budget, "brute_force_map");
  Enumerator en(g);

  struct Block {
    double best = kNegInf;
    std::uint64_t best_mask = 0;
    std::uint64_t count = 0;
  };
  const std::uint64_t block_size = 1u << 14;
  const std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  std::vector<Block> blocks(n_blocks);
  parallel_for(std::size_t(n_blocks), n_threads, [&](std::size_t b) {
    Block blk;
    const std::uint64_t lo = b * block_size;
    const std::uint64_t hi = std::min(total, lo + block_size);
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      double s = en.score(mask, evidence);
      if (is_neg_inf(s)) continue;
      if (s > blk.best) {
        blk.best = s;
        blk.best_mask = mask;
        blk.count = 1;
      } else if (s == blk.best) {
        ++blk.count;
      }
    }
    blocks[b] = blk;
  });

  MapResult out;
  std::uint64_t best_mask = 0;
  for (const Block& blk : blocks) {
    if (blk.count == 0) continue;
    if (blk.best > out.score) {
      out.score = blk.best;
      best_mask = blk.best_mask;
      out.num_optima = blk.count;
    } else if (blk.best == out.score) {
      out.num_optima += blk.count;
    }
  }
  if (out.num_optima == 0) {
    // Every configuration forbidden; report the all-OFF assignment at -inf.
    out.assignment.assign(g.num_variables(), 0);
    return out;
  }
  out.is_unique = out.num_optima == 1;
  out.assignment.resize(g.num_variables());
  for (std::size_t v = 0; v < g.num_variables(); ++v)
    out.assignment[v] = en.bit(best_mask, std::int32_t(v)) ? 1 : 0;
  return out;
}

std::vector<std::array<double, 2>> exact_factor_messages(const FactorSpec& spec,
                                                         std::span<const double> incoming) {
  const auto scope = factor_scope(spec);
  const std::size_t k = scope.size();
  if (incoming.size() != k) throw ShapeError("incoming message count mismatch");
  if (k > 24) throw BudgetError("factor scope too large for enumeration");
  std::vector<std::array<double, 2>> out(k, {kNegInf, kNegInf});
  std::vector<std::uint8_t> states(k);
  const std::uint64_t total = std::uint64_t(1) << k;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < k; ++i) states[i] = (mask >> (k - 1 - i)) & 1u;
    const double pot = factor_potential(spec, states);
    if (is_neg_inf(pot)) continue;
    double finite_sum = pot;
    int sentinel_count = 0;
    std::size_t sentinel_pos = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!states[i]) continue;
      if (is_neg_inf(incoming[i])) {
        ++sentinel_count;
        sentinel_pos = i;
      } else {
        finite_sum += incoming[i];
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      double contribution;
      if (sentinel_count == 0) {
        contribution = states[i] ? finite_sum - incoming[i] : finite_sum;
      } else if (sentinel_count == 1 && states[i] && i == sentinel_pos) {
        contribution = finite_sum;  // the only sentinel is the recipient's own message
      } else {
        continue;
      }
      auto& slot = out[i][states[i]];
      slot = std::max(slot, contribution);
    }
  }
  return out;
}

std::vector<double> joint_distribution(const FactorGraph& g, const Evidence& evidence,
                                       std::uint64_t budget, int n_threads) {
  if (!evidence.empty() && evidence.size() != g.num_variables())
    throw ShapeError("evidence size mismatch");
  check_scopes(g);
  const std::uint64_t total = checked_state_count(g.num_variables(), budget, "joint_distribution");
  Enumerator en(g);
  std::vector<double> table(total);
  const std::uint64_t block_size = 1u << 14;
  const std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  std::vector<double> block_max(n_blocks, kNegInf);
  parallel_for(std::size_t(n_blocks), n_threads, [&](std::size_t b) {
    const std::uint64_t lo = b * block_size;
    const std::uint64_t hi = std::min(total, lo + block_size);
    double m = kNegInf;
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      table[mask] = en.score(mask, evidence);
      m = std::max(m, table[mask]);
    }
    block_max[b] = m;
  });
  double shift = kNegInf;
  for (double m : block_max) shift = std::max(shift, m);
  if (is_neg_inf(shift)) throw ShapeError("joint_distribution: every configuration forbidden");
  std::vector<double> block_sum(n_blocks, 0.0);
  parallel_for(std::size_t(n_blocks), n_threads, [&](std::size_t b) {
    const std::uint64_t lo = b * block_size;
    const std::uint64_t hi = std::min(total, lo + block_size);
    double s = 0.0;
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      table[mask] = is_neg_inf(table[mask]) ? 0.0 : std::exp(table[mask] - shift);
      s += table[mask];
    }
    block_sum[b] = s;
  });
  double z = 0.0;
  for (double s : block_sum) z += s;
  parallel_for(std::size_t(n_blocks), n_threads, [&](std::size_t b) {
    const std::uint64_t lo = b * block_size;
    const std::uint64_t hi = std::min(total, lo + block_size);
    for (std::uint64_t mask = lo; mask < hi; ++mask) table[mask] /= z;
  });
  return table;
}

std::vector<double> marginal_distribution(const FactorGraph& g, const Evidence& evidence,
                                          std::span<const VariableId> targets,
                                          std::span<const std::pair<VariableId, std::uint8_t>> clamps,
                                          std::uint64_t budget, int n_threads) {
  if (!evidence.empty() && evidence.size() != g.num_variables())
    throw ShapeError("evidence size mismatch");
  check_scopes(g);
  const std::size_t n = g.num_variables();
  std::vector<int> role(n, -1);  // -1 free/target, else clamped state
  for (const auto& [v, s] : clamps) {
    if (!v.valid() || std::size_t(v.value) >= n) throw ShapeError("clamp on unknown variable");
    role[std::size_t(v.value)] = s ? 1 : 0;
  }
  std::vector<std::size_t> free_vars;  // includes targets
  for (std::size_t v = 0; v < n; ++v)
    if (role[v] < 0) free_vars.push_back(v);
  for (VariableId t : targets) {
    if (!t.valid() || std::size_t(t.value) >= n) throw ShapeError("target unknown variable");
    if (role[std::size_t(t.value)] >= 0) throw ShapeError("target variable is clamped");
  }
  const std::uint64_t total = checked_state_count(free_vars.size(), budget, "marginal_distribution");

  Enumerator en(g);
  // Two passes: max shift, then accumulate per target cell.
  auto full_mask = [&](std::uint64_t free_mask) {
    std::uint64_t mask = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (role[v] == 1) mask |= std::uint64_t(1) << (n - 1 - v);
    for (std::size_t i = 0; i < free_vars.size(); ++i)
      if ((free_mask >> (free_vars.size() - 1 - i)) & 1u)
        mask |= std::uint64_t(1) << (n - 1 - free_vars[i]);
    return mask;
  };
  const std::uint64_t block_size = 1u << 14;
  const std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  std::vector<double> block_max(n_blocks, kNegInf);
  parallel_for(std::size_t(n_blocks), n_threads, [&](std::size_t b) {
    const std::uint64_t lo = b * block_size;
    const std::uint64_t hi = std::min(total, lo + block_size);
    double m = kNegInf;
    for (std::uint64_t fm = lo; fm < hi; ++fm) m = std::max(m, en.score(full_mask(fm), evidence));
    block_max[b] = m;
  });
  double shift = kNegInf;
  for (double m : block_max) shift = std::max(shift, m);
  if (is_neg_inf(shift))
    throw ShapeError("marginal_distribution: every configuration forbidden under clamps");

  const std::size_t cells = std::size_t(1) << targets.size();
  std::vector<std::vector<double>> block_cells(n_blocks, std::vector<double>(cells, 0.0));
  parallel_for(std::size_t(n_blocks), n_threads, [&](std::size_t b) {
    const std::uint64_t lo = b * block_size;
    const std::uint64_t hi = std::min(total, lo + block_size);
    auto& acc = block_cells[b];
    for (std::uint64_t fm = lo; fm < hi; ++fm) {
      const std::uint64_t mask = full_mask(fm);
      const double s = en.score(mask, evidence);
      if (is_neg_inf(s)) continue;
      std::size_t cell = 0;
      for (std::size_t i = 0; i < targets.size(); ++i)
        cell = (cell << 1) | (en.bit(mask, targets[i].value) ? 1u : 0u);
      acc[cell] += std::exp(s - shift);
    }
  });
  std::vector<double> out(cells, 0.0);
  for (const auto& acc : block_cells)
    for (std::size_t c = 0; c < cells; ++c) out[c] += acc[c];
  double z = 0.0;
  for (double p : out) z += p;
  if (z <= 0.0) throw ShapeError("marginal_distribution: zero mass");
  for (double& p : out) p /= z;
  return out;
}

double mutual_information_2x2(std::span<const double> joint) {
  if (joint.size() != 4) throw ShapeError("mutual_information_2x2 wants 4 entries");
  const double px1 = joint[2] + joint[3];
  const double py1 = joint[1] + joint[3];
  const double px[2] = {1.0 - px1, px1};
  const double py[2] = {1.0 - py1, py1};
  double mi = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double p = joint[std::size_t(a * 2 + b)];
      if (p > 0.0 && px[a] > 0.0 && py[b] > 0.0) mi += p * std::log(p / (px[a] * py[b]));
    }
  return mi;
}

double conditional_mutual_information(const FactorGraph& g, const Evidence& evidence,
                                      VariableId x, VariableId y,
                                      std::span<const std::pair<VariableId, std::uint8_t>> cond,
                                      std::uint64_t budget, int n_threads) {
  const VariableId targets[2] = {x, y};
  auto joint = marginal_distribution(g, evidence, targets, cond, budget, n_threads);
  return mutual_information_2x2(joint);
}

}  // namespace mam
