#include "mam/toy_grid.hpp"

#include <cstdlib>

#include "mam/util.hpp"

namespace mam {

VariableId ToyGrid::lateral(int i1, int i2) const {
  if (!with_laterals || std::abs(i1 - i2) > 1) throw ShapeError("no such lateral variable");
  int idx = 0;
  for (int a = 1; a <= 4; ++a)
    for (int b = std::max(1, a - 1); b <= std::min(4, a + 1); ++b) {
      if (a == i1 && b == i2) return VariableId(26 + idx);
      ++idx;
    }
  throw ShapeError("no such lateral variable");
}

ToyGrid build_toy_grid(const ToyGridOptions& options) {
  ToyGrid t;
  t.with_laterals = options.with_laterals;
  auto& g = t.graph;

  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 2; ++j)
      g.add_variable(VarKind::part, "x_{v_{" + std::to_string(i) + "," + std::to_string(j) + "}}");
  for (int ell = 1; ell <= 2; ++ell)
    g.add_variable(VarKind::part, "x_{v^P_" + std::to_string(ell) + "}");
  for (int ell = 1; ell <= 2; ++ell)
    for (int i = 1; i <= 4; ++i)
      for (int j = 1; j <= 2; ++j)
        g.add_variable(VarKind::attention, "a{v^P_" + std::to_string(ell) + ",v_{" +
                                               std::to_string(i) + "," + std::to_string(j) + "}}");
  if (options.with_laterals) {
    for (int i1 = 1; i1 <= 4; ++i1)
      for (int i2 = std::max(1, i1 - 1); i2 <= std::min(4, i1 + 1); ++i2)
        g.add_variable(VarKind::attention, "a{v_{" + std::to_string(i1) + ",1},v_{" +
                                               std::to_string(i2) + ",2}}");
  }

  // Line HOFs: one group per column, patterns require claiming a segment in
  // both columns or neither.
  for (int ell = 1; ell <= 2; ++ell) {
    MamHofSpec h;
    h.part_var = t.line(ell);
    for (int j = 1; j <= 2; ++j) {
      std::vector<VariableId> col;
      for (int i = 1; i <= 4; ++i) col.push_back(t.topdown(ell, i, j));
      h.groups.push_back(std::move(col));
    }
    h.patterns = {{0, 0}, {1, 1}};
    h.potentials = {0.0, 0.0};
    g.add_factor(std::move(h));
  }
  // Segment HOFs: a top-down group, plus (full model) a lateral-continuation
  // group toward the other column's adjacent rows.
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 2; ++j) {
      MamHofSpec h;
      h.part_var = t.segment(i, j);
      h.groups.push_back({t.topdown(1, i, j), t.topdown(2, i, j)});
      if (options.with_laterals) {
        std::vector<VariableId> continuations;
        for (int o = std::max(1, i - 1); o <= std::min(4, i + 1); ++o)
          continuations.push_back(j == 1 ? t.lateral(i, o) : t.lateral(o, i));
        h.groups.push_back(std::move(continuations));
        h.patterns = {{0, 0}, {1, 1}};
        h.potentials = {0.0, 0.0};
      } else {
        h.patterns = {{0}, {1}};
        h.potentials = {0.0, 0.0};
      }
      g.add_factor(std::move(h));
    }
  return t;
}

}  // namespace mam
