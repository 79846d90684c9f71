#include "mam/or_factor.hpp"

#include "mam/util.hpp"

namespace mam {

OrMessages or_factor_messages(const OrFactorSpec& spec, double m_pixel,
                              std::span<const double> m_parents) {
  const std::size_t n = m_parents.size();
  if (n != spec.parents.size() || n == 0) throw ShapeError("or factor incoming size mismatch");

  // Best and second-best parent message (ties to the lowest index) and the
  // sum of positive parts; max(0, -inf) = 0 keeps the sum finite.
  std::size_t arg1 = 0;
  double best = kNegInf, second = kNegInf, pos_sum = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    const double v = m_parents[q];
    if (v > best) {
      second = best;
      best = v;
      arg1 = q;
    } else if (v > second) {
      second = v;
    }
    if (v > 0.0) pos_sum += v;
  }

  auto pos = [](double v) { return v > 0.0 ? v : 0.0; };

  // Best sum over non-empty parent subsets: force the best parent ON, add the
  // other positive messages.
  const double b1 = is_neg_inf(best) ? kNegInf : best + (pos_sum - pos(best));

  OrMessages out;
  {
    const double on = std::max(b1, spec.log_pi10);
    const double off = std::max(log_add(spec.log_pi01, b1), 0.0);
    out.to_pixel = normalize_message(off, on);
  }

  const double pixel_or_pi01 = std::max(m_pixel, spec.log_pi01);
  const double all_off = std::max(log_add(m_pixel, spec.log_pi10), 0.0);
  out.to_parents.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double others_pos = pos_sum - pos(m_parents[q]);
    const double on = log_add(pixel_or_pi01, others_pos);
    const double m_alt = (q == arg1) ? second : best;  // best among the other parents
    const double off_via_other =
        is_neg_inf(m_alt) ? kNegInf
                          : log_add(pixel_or_pi01, m_alt + (others_pos - pos(m_alt)));
    out.to_parents[q] = normalize_message(std::max(all_off, off_via_other), on);
  }
  return out;
}

}  // namespace mam
