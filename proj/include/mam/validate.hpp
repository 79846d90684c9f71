#pragma once

#include <string>
#include <vector>

#include "mam/graph.hpp"

namespace mam {

struct Violation {
  int constraint = 0;  // 1 kind taxonomy, 2 attention endpoints, 3 factor/attention coupling
  std::string message;
};

using ValidationReport = std::vector<Violation>;

// Structural MAM constraints:
//  (1) kind taxonomy: mam_hof part variables are part/weight kind and their
//      group members are attention kind; or-factor pixels are pixel kind and
//      parents are non-attention; attention variables never appear in
//      or factors.
//  (2) every attention variable shares a factor with at least two distinct
//      regular (non-attention) variables, so it mediates a pairwise
//      interaction.
//  (3) every factor touching an attention variable also touches at least one
//      regular variable.
// An empty report means the graph is a well-formed MAM.
ValidationReport validate_mam_constraints(const FactorGraph& g);

}  // namespace mam
