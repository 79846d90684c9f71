#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace mam {

// Log-domain potentials live in R plus a "forbidden" sentinel. IEEE -inf is
// the sentinel; these helpers keep its algebra NaN-free:
//   sentinel + anything = sentinel,  max(sentinel, x) = x.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double x) { return x == kNegInf; }

inline double log_add(double a, double b) {
  if (is_neg_inf(a) || is_neg_inf(b)) return kNegInf;
  return a + b;
}

inline double log_max(double a, double b) { return std::max(a, b); }

// Adds a message contribution for a variable in state s (messages are
// normalized ON-minus-OFF, so OFF contributes 0 even when m is the sentinel).
inline double log_add_if(double acc, double m, bool on) {
  return on ? log_add(acc, m) : acc;
}

// Normalized message from a state pair: M_on - M_off. Both states forbidden is
// a degenerate factor; 0 keeps downstream arithmetic finite and is documented
// as such.
inline double normalize_message(double m_off, double m_on) {
  if (is_neg_inf(m_on) && is_neg_inf(m_off)) return 0.0;
  if (is_neg_inf(m_on)) return kNegInf;
  if (is_neg_inf(m_off)) return std::numeric_limits<double>::infinity();
  return m_on - m_off;
}

// damping*old + (1-damping)*fresh with sentinel absorption (see ledger note:
// either operand at the sentinel pins the damped value there).
inline double damp(double old_value, double fresh, double damping) {
  if (damping == 0.0) return fresh;
  if (is_neg_inf(fresh) || is_neg_inf(old_value)) return kNegInf;
  return damping * old_value + (1.0 - damping) * fresh;
}

// |a - b| for the convergence test; equal sentinels count as no change.
inline double message_delta(double a, double b) {
  if (a == b) return 0.0;  // covers -inf == -inf
  if (is_neg_inf(a) || is_neg_inf(b)) return std::numeric_limits<double>::infinity();
  return std::abs(a - b);
}

}  // namespace mam
