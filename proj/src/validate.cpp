#include "mam/validate.hpp"

#include <set>

namespace mam {

namespace {

bool is_attention(const FactorGraph& g, VariableId v) {
  return g.variable(v).kind == VarKind::attention;
}

std::string var_name(const FactorGraph& g, VariableId v) {
  const auto& var = g.variable(v);
  if (!var.label.empty()) return var.label;
  return "#" + std::to_string(v.value);
}

}  // namespace

ValidationReport validate_mam_constraints(const FactorGraph& g) {
  ValidationReport report;

  // (1) kind taxonomy per factor family.
  for (std::size_t f = 0; f < g.num_factors(); ++f) {
    const auto& spec = g.factor(std::int32_t(f));
    if (const auto* h = std::get_if<MamHofSpec>(&spec)) {
      if (is_attention(g, h->part_var))
        report.push_back({1, "factor " + std::to_string(f) + ": mam_hof part variable " +
                                 var_name(g, h->part_var) + " has attention kind"});
      for (const auto& group : h->groups)
        for (VariableId a : group)
          if (!is_attention(g, a))
            report.push_back({1, "factor " + std::to_string(f) + ": mam_hof group member " +
                                     var_name(g, a) + " is not an attention variable"});
    } else if (const auto* o = std::get_if<OrFactorSpec>(&spec)) {
      if (g.variable(o->pixel_var).kind != VarKind::pixel)
        report.push_back({1, "factor " + std::to_string(f) + ": or-factor pixel variable " +
                                 var_name(g, o->pixel_var) + " is not pixel kind"});
      for (VariableId p : o->parents)
        if (is_attention(g, p))
          report.push_back({1, "factor " + std::to_string(f) + ": or-factor parent " +
                                   var_name(g, p) + " is an attention variable"});
    }
  }

  // (3) every non-unary factor touching an attention variable also touches a
  //     regular variable. Checked before (2) so a dangling factor reports once.
  std::vector<bool> factor_ok(g.num_factors(), true);
  for (std::size_t f = 0; f < g.num_factors(); ++f) {
    const auto& scope = g.scope(std::int32_t(f));
    bool has_attention = false;
    bool has_regular = false;
    for (VariableId v : scope) (is_attention(g, v) ? has_attention : has_regular) = true;
    if (has_attention && !has_regular) {
      factor_ok[f] = false;
      report.push_back({3, "factor " + std::to_string(f) +
                               " touches attention variables but no regular variable"});
    }
  }

  // (2) each attention variable is psi-connected (shares a factor) with at
  //     least two distinct regular variables. Factors already flagged under
  //     (3) are skipped so one defect yields one violation.
  for (const auto& var : g.variables()) {
    if (var.kind != VarKind::attention) continue;
    std::set<std::int32_t> regulars;
    for (std::int32_t f : g.factors_of(var.id)) {
      if (!factor_ok[std::size_t(f)]) continue;
      for (VariableId w : g.scope(f))
        if (!is_attention(g, w)) regulars.insert(w.value);
    }
    bool touches_bad_factor = false;
    for (std::int32_t f : g.factors_of(var.id))
      if (!factor_ok[std::size_t(f)]) touches_bad_factor = true;
    if (regulars.size() < 2 && !touches_bad_factor)
      report.push_back({2, "attention variable " + var_name(g, var.id) +
                               " is psi-connected to fewer than two regular variables"});
  }

  return report;
}

}  // namespace mam
