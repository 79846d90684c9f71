#include "mam/mam_hof.hpp"

#include "mam/util.hpp"

namespace mam {

std::vector<HofConfig> enumerate_valid_configs(const MamHofSpec& spec, std::uint64_t guard) {
  // Scope-position offset of each group's first member (position 0 = part).
  std::vector<std::size_t> offset(spec.groups.size());
  std::size_t pos = 1;
  for (std::size_t k = 0; k < spec.groups.size(); ++k) {
    offset[k] = pos;
    pos += spec.groups[k].size();
  }

  std::vector<HofConfig> out;
  for (std::size_t p = 0; p < spec.patterns.size(); ++p) {
    const auto& b = spec.patterns[p];
    std::vector<std::size_t> active;
    std::uint64_t count = 1;
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!b[k]) continue;
      active.push_back(k);
      count *= spec.groups[k].size();
      if (count > guard) throw BudgetError("enumerate_valid_configs: too many configurations");
    }
    if (out.size() + count > guard)
      throw BudgetError("enumerate_valid_configs: too many configurations");
    if (active.empty()) {
      out.push_back({0, spec.potentials[p]});
      continue;
    }
    // Odometer over one chosen member per active group.
    std::vector<std::size_t> pick(active.size(), 0);
    while (true) {
      std::uint64_t mask = 1;  // part ON
      for (std::size_t i = 0; i < active.size(); ++i)
        mask |= std::uint64_t(1) << (offset[active[i]] + pick[i]);
      out.push_back({mask, spec.potentials[p]});
      std::size_t i = active.size();
      while (i > 0) {
        --i;
        if (++pick[i] < spec.groups[active[i]].size()) break;
        pick[i] = 0;
        if (i == 0) goto next_pattern;
      }
    }
  next_pattern:;
  }
  return out;
}

MamHofMessages mam_hof_messages(const MamHofSpec& spec, double m_part,
                                std::span<const double> m_att, const MamHofOptions& opts) {
  const std::size_t m = spec.groups.size();
  if (m_att.size() != spec.num_attention()) throw ShapeError("mam_hof incoming size mismatch");
  const double t = m_part;

  // Per-group best and second-best incoming message; argmax ties go to the
  // lowest scope position. A singleton group has no second-best: being forced
  // active with its only member OFF is impossible, hence the sentinel
  // (paper-verbatim mode substitutes 0, see ledger).
  std::vector<double> m1(m, kNegInf), m2(m, kNegInf);
  std::vector<std::size_t> arg1(m, 0);
  std::vector<std::size_t> offset(m);
  {
    std::size_t pos = 0;
    for (std::size_t k = 0; k < m; ++k) {
      offset[k] = pos;
      for (std::size_t j = 0; j < spec.groups[k].size(); ++j, ++pos) {
        const double v = m_att[pos];
        if (v > m1[k]) {
          m2[k] = m1[k];
          m1[k] = v;
          arg1[k] = j;
        } else if (v > m2[k]) {
          m2[k] = v;
        }
      }
      if (spec.groups[k].size() == 1) m2[k] = opts.paper_verbatim ? 0.0 : kNegInf;
    }
  }

  // Per-pattern sums. finite_sum omits active groups whose best is the
  // sentinel; sentinel_ks lists them so per-group exclusions stay exact.
  const std::size_t np = spec.patterns.size();
  std::vector<double> finite_sum(np);
  std::vector<std::vector<std::size_t>> sentinel_ks(np);
  std::vector<bool> nonzero(np, false);

  double u_zero = kNegInf;        // potential of the all-zero pattern
  double best_on_part = kNegInf;  // max over nonzero b of S(b)
  double c_all = kNegInf;         // max over b of S(b) (+ t when nonzero)
  std::vector<double> on_excl(m, kNegInf);  // max over b_k=1 of S(b) without group k
  std::vector<double> c_zero(m, kNegInf);   // max over b_k=0 of S(b) (+ t when nonzero)

  for (std::size_t p = 0; p < np; ++p) {
    const auto& b = spec.patterns[p];
    double fs = spec.potentials[p];
    auto& sks = sentinel_ks[p];
    bool nz = false;
    for (std::size_t k = 0; k < m; ++k) {
      if (!b[k]) continue;
      nz = true;
      if (is_neg_inf(m1[k]))
        sks.push_back(k);
      else
        fs += m1[k];
    }
    finite_sum[p] = fs;
    nonzero[p] = nz;

    const double s = sks.empty() ? fs : kNegInf;
    if (!nz) u_zero = std::max(u_zero, spec.potentials[p]);
    if (nz) best_on_part = std::max(best_on_part, s);
    const double s_with_t = nz ? log_add(s, t) : s;
    c_all = std::max(c_all, s_with_t);
    for (std::size_t k = 0; k < m; ++k) {
      if (b[k]) {
        // S(b) with group k's contribution removed.
        double excl;
        if (sks.empty())
          excl = is_neg_inf(m1[k]) ? fs : fs - m1[k];
        else if (sks.size() == 1 && sks[0] == k)
          excl = fs;
        else
          excl = kNegInf;
        on_excl[k] = std::max(on_excl[k], excl);
      } else {
        c_zero[k] = std::max(c_zero[k], s_with_t);
      }
    }
  }

  MamHofMessages out;
  const double part_on = opts.paper_verbatim ? log_add(best_on_part, t) : best_on_part;
  out.to_part = normalize_message(u_zero, part_on);

  out.to_attention.resize(m_att.size());
  for (std::size_t k = 0; k < m; ++k) {
    const double on_msg = log_add(t, on_excl[k]);  // same for every member
    const double off_non_argmax = c_all;
    const double off_argmax = std::max(c_zero[k], log_add(log_add(t, on_excl[k]), m2[k]));
    for (std::size_t j = 0; j < spec.groups[k].size(); ++j) {
      const double off = (j == arg1[k]) ? off_argmax : off_non_argmax;
      out.to_attention[offset[k] + j] = normalize_message(off, on_msg);
    }
  }
  return out;
}

}  // namespace mam
