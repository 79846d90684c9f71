#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mam/graph.hpp"

namespace mam {

// Brute-force reference implementations. Everything here enumerates joint
// states directly off factor_potential; none of it shares code with the
// message-passing paths it is used to check. Budgets are in enumerated
// states; exceeding one throws BudgetError.

inline constexpr std::uint64_t kDefaultOracleBudget = std::uint64_t(1) << 24;

struct MapResult {
  Assignment assignment;  // lexicographically smallest optimum (variable 0 first)
  double score = kNegInf;
  bool is_unique = false;
  std::uint64_t num_optima = 0;
};

MapResult brute_force_map(const FactorGraph& g, const Evidence& evidence,
                          std::uint64_t budget = kDefaultOracleBudget, int n_threads = 1);

// Exact max-product messages out of one factor. incoming[i] is the normalized
// (ON minus OFF) message into the factor from scope position i; the result
// gives the unnormalized pair {M_off, M_on} per scope position, maximizing
// potential + sum of incoming for ON variables, excluding the recipient's own
// incoming message.
std::vector<std::array<double, 2>> exact_factor_messages(const FactorSpec& spec,
                                                         std::span<const double> incoming);

// Full joint table: probabilities indexed by the joint state (variable 0 is
// the most significant bit), normalized over exp(map_score).
std::vector<double> joint_distribution(const FactorGraph& g, const Evidence& evidence,
                                       std::uint64_t budget = kDefaultOracleBudget,
                                       int n_threads = 1);

// Marginal over `targets` with some variables clamped, all others summed out.
// Result is indexed big-endian in target order and normalized.
std::vector<double> marginal_distribution(const FactorGraph& g, const Evidence& evidence,
                                          std::span<const VariableId> targets,
                                          std::span<const std::pair<VariableId, std::uint8_t>> clamps,
                                          std::uint64_t budget = kDefaultOracleBudget,
                                          int n_threads = 1);

// Mutual information (nats) of a 2x2 joint table laid out [p00, p01, p10, p11].
double mutual_information_2x2(std::span<const double> joint);

// I(x; y | cond = state): marginalizes everything else out of the graph.
double conditional_mutual_information(const FactorGraph& g, const Evidence& evidence,
                                      VariableId x, VariableId y,
                                      std::span<const std::pair<VariableId, std::uint8_t>> cond,
                                      std::uint64_t budget = kDefaultOracleBudget,
                                      int n_threads = 1);

}  // namespace mam
