#include "mam/graph.hpp"

#include <set>

#include "mam/util.hpp"

namespace mam {

const char* to_string(VarKind kind) {
  switch (kind) {
    case VarKind::part: return "part";
    case VarKind::attention: return "attention";
    case VarKind::pixel: return "pixel";
    case VarKind::weight: return "weight";
  }
  return "?";
}

VarKind var_kind_from_string(const std::string& s) {
  if (s == "part") return VarKind::part;
  if (s == "attention") return VarKind::attention;
  if (s == "pixel") return VarKind::pixel;
  if (s == "weight") return VarKind::weight;
  throw ParseError("unknown variable kind: " + s);
}

std::vector<VariableId> factor_scope(const FactorSpec& spec) {
  std::vector<VariableId> out;
  if (const auto* u = std::get_if<UnaryFactor>(&spec)) {
    out.push_back(u->var);
  } else if (const auto* t = std::get_if<TableFactor>(&spec)) {
    out = t->vars;
  } else if (const auto* h = std::get_if<MamHofSpec>(&spec)) {
    out.reserve(1 + h->num_attention());
    out.push_back(h->part_var);
    for (const auto& g : h->groups) out.insert(out.end(), g.begin(), g.end());
  } else if (const auto* o = std::get_if<OrFactorSpec>(&spec)) {
    out.reserve(1 + o->parents.size());
    out.push_back(o->pixel_var);
    out.insert(out.end(), o->parents.begin(), o->parents.end());
  }
  return out;
}

double factor_potential(const FactorSpec& spec, std::span<const std::uint8_t> states) {
  if (const auto* u = std::get_if<UnaryFactor>(&spec)) {
    return states[0] ? u->log_pot_on : u->log_pot_off;
  }
  if (const auto* t = std::get_if<TableFactor>(&spec)) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < t->vars.size(); ++i) idx = (idx << 1) | (states[i] ? 1u : 0u);
    return t->log_pots[idx];
  }
  if (const auto* h = std::get_if<MamHofSpec>(&spec)) {
    // Per-group ON counts must match a pattern exactly and the part state
    // must match the pattern's emptiness.
    const std::size_t m = h->groups.size();
    std::size_t pos = 1;
    // counts capped at 2: anything >1 can't match a 0/1 pattern.
    std::vector<std::uint8_t> counts(m, 0);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = 0; j < h->groups[k].size(); ++j, ++pos) {
        if (states[pos] && counts[k] < 2) ++counts[k];
      }
    }
    for (std::size_t p = 0; p < h->patterns.size(); ++p) {
      const auto& b = h->patterns[p];
      bool match = true;
      bool nonzero = false;
      for (std::size_t k = 0; k < m; ++k) {
        if (counts[k] != b[k]) {
          match = false;
          break;
        }
        if (b[k]) nonzero = true;
      }
      if (match && (states[0] != 0) == nonzero) return h->potentials[p];
    }
    return kNegInf;
  }
  const auto& o = std::get<OrFactorSpec>(spec);
  bool any_parent = false;
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (states[i]) {
      any_parent = true;
      break;
    }
  }
  const bool pixel_on = states[0] != 0;
  if (any_parent) return pixel_on ? 0.0 : o.log_pi01;
  return pixel_on ? o.log_pi10 : 0.0;
}

VariableId FactorGraph::add_variable(VarKind kind, std::string label) {
  VariableId id(std::int32_t(vars_.size()));
  vars_.push_back(Variable{id, kind, std::move(label)});
  var_factors_.emplace_back();
  return id;
}

std::int32_t FactorGraph::add_factor(FactorSpec spec) {
  auto scope = factor_scope(spec);
  if (scope.empty()) throw ShapeError("factor with empty scope");
  std::set<std::int32_t> seen;
  for (VariableId v : scope) {
    if (!v.valid() || std::size_t(v.value) >= vars_.size())
      throw ShapeError("factor references unknown variable id " + std::to_string(v.value));
    if (!seen.insert(v.value).second)
      throw ShapeError("factor scope repeats variable id " + std::to_string(v.value));
  }
  if (const auto* t = std::get_if<TableFactor>(&spec)) {
    if (t->vars.size() > 20) throw ShapeError("table factor arity > 20");
    if (t->log_pots.size() != (std::size_t(1) << t->vars.size()))
      throw ShapeError("table factor size mismatch");
  }
  if (const auto* h = std::get_if<MamHofSpec>(&spec)) {
    if (h->groups.empty()) throw ShapeError("mam_hof with no groups");
    for (const auto& g : h->groups)
      if (g.empty()) throw ShapeError("mam_hof with an empty group");
    if (h->patterns.size() != h->potentials.size() || h->patterns.empty())
      throw ShapeError("mam_hof patterns/potentials mismatch");
    bool has_zero = false;
    for (const auto& b : h->patterns) {
      if (b.size() != h->groups.size()) throw ShapeError("mam_hof pattern length mismatch");
      bool zero = true;
      for (auto bit : b) {
        if (bit > 1) throw ShapeError("mam_hof pattern entries must be 0/1");
        if (bit) zero = false;
      }
      if (zero) has_zero = true;
    }
    if (!has_zero) throw ShapeError("mam_hof pattern set must contain the all-zero pattern");
    for (double u : h->potentials)
      if (!std::isfinite(u)) throw ShapeError("mam_hof potentials must be finite");
  }
  if (const auto* o = std::get_if<OrFactorSpec>(&spec)) {
    if (o->parents.empty()) throw ShapeError("or factor with no parents");
    const double log_half = std::log(0.5);
    if (!(o->log_pi01 < log_half) || !(o->log_pi10 < log_half))
      throw ShapeError("or factor requires pi01, pi10 < 0.5");
  }
  std::int32_t f = std::int32_t(factors_.size());
  for (VariableId v : scope) var_factors_[std::size_t(v.value)].push_back(f);
  factors_.push_back(std::move(spec));
  scopes_.push_back(std::move(scope));
  return f;
}

double map_score(const FactorGraph& g, const Assignment& x, const Evidence& evidence) {
  if (x.size() != g.num_variables()) throw ShapeError("assignment size mismatch");
  if (!evidence.empty() && evidence.size() != g.num_variables())
    throw ShapeError("evidence size mismatch");
  double score = 0.0;
  std::vector<std::uint8_t> states;
  for (std::size_t f = 0; f < g.num_factors(); ++f) {
    const auto& scope = g.scope(std::int32_t(f));
    states.resize(scope.size());
    for (std::size_t i = 0; i < scope.size(); ++i) states[i] = x[std::size_t(scope[i].value)];
    score = log_add(score, factor_potential(g.factor(std::int32_t(f)), states));
  }
  if (!evidence.empty()) {
    for (std::size_t v = 0; v < x.size(); ++v)
      if (x[v]) score = log_add(score, evidence[v]);
  }
  return score;
}

double map_score(const FactorGraph& g, const Assignment& x) { return map_score(g, x, {}); }

}  // namespace mam
