#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mam/logdomain.hpp"

namespace mam {

// Dense non-negative variable index. A strong type so factor specs can't be
// built from raw loop counters by accident.
struct VariableId {
  std::int32_t value = -1;
  constexpr VariableId() = default;
  constexpr explicit VariableId(std::int32_t v) : value(v) {}
  constexpr bool valid() const { return value >= 0; }
  friend constexpr auto operator<=>(VariableId, VariableId) = default;
};

enum class VarKind : std::uint8_t { part, attention, pixel, weight };

const char* to_string(VarKind kind);
VarKind var_kind_from_string(const std::string& s);

struct Variable {
  VariableId id;
  VarKind kind = VarKind::part;
  // Human-readable; for attention variables the label records the two
  // endpoint variables (e.g. "a{3,7}").
  std::string label;
};

// ---------------------------------------------------------------------------
// Factor families. All variables are binary; potentials are log-domain with
// the -inf sentinel for forbidden configurations.

struct UnaryFactor {
  VariableId var;
  double log_pot_off = 0.0;
  double log_pot_on = 0.0;
};

// Dense table over the scope's joint states. Index convention: big-endian in
// declaration order (vars[0] is the most significant bit).
struct TableFactor {
  std::vector<VariableId> vars;
  std::vector<double> log_pots;  // size 2^vars.size()
};

// Higher-order factor over one part variable and M disjoint groups of
// attention variables. A configuration is valid iff the per-group ON counts
// equal some pattern b (so at most one ON per group) and the part variable is
// ON exactly when b is nonzero; its potential is then potentials[b].
struct MamHofSpec {
  VariableId part_var;
  std::vector<std::vector<VariableId>> groups;       // non-empty, disjoint
  std::vector<std::vector<std::uint8_t>> patterns;   // each of length groups.size()
  std::vector<double> potentials;                    // parallel to patterns, finite

  std::size_t num_attention() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return n;
  }
};

// Noisy OR between one pixel variable and its parent part variables:
//   some parent ON, pixel ON  -> 0
//   some parent ON, pixel OFF -> log_pi01
//   all parents OFF, pixel ON -> log_pi10
//   all parents OFF, pixel OFF-> 0
struct OrFactorSpec {
  VariableId pixel_var;
  std::vector<VariableId> parents;  // non-empty
  double log_pi01 = kNegInf;
  double log_pi10 = kNegInf;
};

using FactorSpec = std::variant<UnaryFactor, TableFactor, MamHofSpec, OrFactorSpec>;

// Scope in canonical order: Unary [var]; Table as declared; MamHof
// [part, group 0 ..., group 1 ...]; Or [pixel, parents...].
std::vector<VariableId> factor_scope(const FactorSpec& spec);

// Log potential of the factor under the given states (scope order).
double factor_potential(const FactorSpec& spec, std::span<const std::uint8_t> states);

// ---------------------------------------------------------------------------

using Assignment = std::vector<std::uint8_t>;   // per-variable state, indexed by id
using Evidence = std::vector<double>;           // per-variable log-odds (ON minus OFF)

class FactorGraph {
 public:
  VariableId add_variable(VarKind kind, std::string label = {});
  // Validates that scope ids exist and are duplicate-free, checks family
  // invariants (throws ShapeError), and keeps adjacency consistent.
  std::int32_t add_factor(FactorSpec spec);

  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_factors() const { return factors_.size(); }
  const Variable& variable(VariableId id) const { return vars_.at(std::size_t(id.value)); }
  const std::vector<Variable>& variables() const { return vars_; }
  const FactorSpec& factor(std::int32_t f) const { return factors_.at(std::size_t(f)); }
  const std::vector<VariableId>& scope(std::int32_t f) const {
    return scopes_.at(std::size_t(f));
  }
  const std::vector<std::int32_t>& factors_of(VariableId v) const {
    return var_factors_.at(std::size_t(v.value));
  }

 private:
  std::vector<Variable> vars_;
  std::vector<FactorSpec> factors_;
  std::vector<std::vector<VariableId>> scopes_;
  std::vector<std::vector<std::int32_t>> var_factors_;
};

// Total log score: sum of factor potentials at the assignment plus, for each
// ON variable, its evidence log-odds.
double map_score(const FactorGraph& g, const Assignment& x, const Evidence& evidence);
double map_score(const FactorGraph& g, const Assignment& x);  // zero evidence

}  // namespace mam
