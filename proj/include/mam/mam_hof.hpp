#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mam/graph.hpp"

namespace mam {

// Operations on the higher-order MAM factor. Scope order everywhere is
// [part, group 0 members..., group 1 members..., ...].

// All configurations with finite potential, as ON-position bitmasks over the
// scope (bit i = scope position i ON) paired with their potential. Count is
// sum over patterns of the product of active group sizes; `guard` caps it.
struct HofConfig {
  std::uint64_t on_mask = 0;
  double potential = 0.0;
};
std::vector<HofConfig> enumerate_valid_configs(const MamHofSpec& spec,
                                               std::uint64_t guard = std::uint64_t(1) << 20);

struct MamHofOptions {
  // Verbatim published update equations: the message to the part variable
  // keeps the incoming self-term, and a singleton group's second-best is 0
  // instead of the sentinel. Default follows the oracle (see ledger).
  bool paper_verbatim = false;
};

// Max-product messages out of the factor, normalized ON minus OFF.
// m_part is the incoming normalized message from the part variable; m_att the
// incoming messages from attention variables in scope order. Cost is
// O(sum of group sizes + |patterns| * groups) plus an O(groups) fallback per
// pattern when sentinels force recomputation.
struct MamHofMessages {
  double to_part = 0.0;
  std::vector<double> to_attention;  // scope order (group 0 first)
};
MamHofMessages mam_hof_messages(const MamHofSpec& spec, double m_part,
                                std::span<const double> m_att, const MamHofOptions& opts = {});

}  // namespace mam
