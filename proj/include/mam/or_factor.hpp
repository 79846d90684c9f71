#pragma once

#include <span>
#include <vector>

#include "mam/graph.hpp"

namespace mam {

// Max-product messages out of a noisy-OR factor in O(parents) time, using the
// best and second-best parent message plus the sum of positive parts.
// m_pixel / m_parents are incoming normalized messages (scope order); the
// result is normalized ON minus OFF. With a single parent these expressions
// coincide with exact 2x2 enumeration.
struct OrMessages {
  double to_pixel = 0.0;
  std::vector<double> to_parents;
};
OrMessages or_factor_messages(const OrFactorSpec& spec, double m_pixel,
                              std::span<const double> m_parents);

}  // namespace mam
