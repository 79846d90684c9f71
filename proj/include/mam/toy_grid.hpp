#pragma once

#include "mam/graph.hpp"

namespace mam {

// Toy model: a 4x2 grid of line-segment variables plus two "line" variables.
// A line, when present, claims exactly one segment per column through
// top-down attention; a segment is ON exactly when claimed. With laterals
// enabled (the full model), each ON segment additionally holds exactly one
// lateral attention to an adjacent-row segment of the other column, so lines
// are continuation-consistent. All potentials are 0: the model is uniform
// over its valid configurations. The no-lateral reduction (26 variables) is
// small enough for exhaustive oracle checks.
struct ToyGridOptions {
  bool with_laterals = true;
};

struct ToyGrid {
  FactorGraph graph;
  bool with_laterals = true;

  // rows i in 1..4, columns j in 1..2, lines ell in 1..2
  VariableId segment(int i, int j) const { return VariableId((i - 1) * 2 + (j - 1)); }
  VariableId line(int ell) const { return VariableId(8 + (ell - 1)); }
  VariableId topdown(int ell, int i, int j) const {
    return VariableId(10 + (ell - 1) * 8 + (i - 1) * 2 + (j - 1));
  }
  // Lateral between (i1, col 1) and (i2, col 2); requires |i1-i2| <= 1.
  VariableId lateral(int i1, int i2) const;

  std::int32_t line_factor(int ell) const { return ell - 1; }
  std::int32_t segment_factor(int i, int j) const { return 2 + (i - 1) * 2 + (j - 1); }
};

ToyGrid build_toy_grid(const ToyGridOptions& options = {});

}  // namespace mam
