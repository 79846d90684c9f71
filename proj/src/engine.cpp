#include "mam/engine.hpp"

#include <cmath>

#include "mam/or_factor.hpp"
#include "mam/util.hpp"

namespace mam {

EdgeIndex::EdgeIndex(const FactorGraph& g) {
  const std::size_t nf = g.num_factors();
  factor_offset_.resize(nf + 1, 0);
  for (std::size_t f = 0; f < nf; ++f)
    factor_offset_[f + 1] = factor_offset_[f] + g.scope(std::int32_t(f)).size();
  edge_var_.resize(factor_offset_[nf]);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& scope = g.scope(std::int32_t(f));
    for (std::size_t i = 0; i < scope.size(); ++i)
      edge_var_[factor_offset_[f] + i] = scope[i].value;
  }
  const std::size_t nv = g.num_variables();
  var_offset_.assign(nv + 1, 0);
  for (std::int32_t v : edge_var_) ++var_offset_[std::size_t(v) + 1];
  for (std::size_t v = 0; v < nv; ++v) var_offset_[v + 1] += var_offset_[v];
  var_edge_list_.resize(edge_var_.size());
  std::vector<std::size_t> cursor(var_offset_.begin(), var_offset_.end() - 1);
  for (std::size_t e = 0; e < edge_var_.size(); ++e)
    var_edge_list_[cursor[std::size_t(edge_var_[e])]++] = e;
}

namespace {

// Fresh factor->variable messages for one factor, written to out[0..k).
// incoming are the variable->factor messages in scope order.
void factor_messages(const FactorSpec& spec, const double* incoming, double* out,
                     const MamHofOptions& hof_opts) {
  if (const auto* u = std::get_if<UnaryFactor>(&spec)) {
    out[0] = normalize_message(u->log_pot_off, u->log_pot_on);
    return;
  }
  if (const auto* t = std::get_if<TableFactor>(&spec)) {
    const std::size_t k = t->vars.size();
    const std::uint64_t total = std::uint64_t(1) << k;
    // M[i][s], flattened.
    thread_local std::vector<double> acc;
    acc.assign(2 * k, kNegInf);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double pot = t->log_pots[mask];
      if (is_neg_inf(pot)) continue;
      double finite_sum = pot;
      int sentinels = 0;
      std::size_t sentinel_pos = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (!((mask >> (k - 1 - i)) & 1u)) continue;
        if (is_neg_inf(incoming[i])) {
          ++sentinels;
          sentinel_pos = i;
        } else {
          finite_sum += incoming[i];
        }
      }
      for (std::size_t i = 0; i < k; ++i) {
        const bool on = (mask >> (k - 1 - i)) & 1u;
        double contribution;
        if (sentinels == 0)
          contribution = on ? finite_sum - incoming[i] : finite_sum;
        else if (sentinels == 1 && on && i == sentinel_pos)
          contribution = finite_sum;
        else
          continue;
        double& slot = acc[2 * i + (on ? 1 : 0)];
        slot = std::max(slot, contribution);
      }
    }
    for (std::size_t i = 0; i < k; ++i) out[i] = normalize_message(acc[2 * i], acc[2 * i + 1]);
    return;
  }
  if (const auto* h = std::get_if<MamHofSpec>(&spec)) {
    const std::size_t na = h->num_attention();
    auto msgs = mam_hof_messages(*h, incoming[0],
                                 std::span<const double>(incoming + 1, na), hof_opts);
    out[0] = msgs.to_part;
    for (std::size_t i = 0; i < na; ++i) out[1 + i] = msgs.to_attention[i];
    return;
  }
  const auto& o = std::get<OrFactorSpec>(spec);
  auto msgs = or_factor_messages(o, incoming[0],
                                 std::span<const double>(incoming + 1, o.parents.size()));
  out[0] = msgs.to_pixel;
  for (std::size_t i = 0; i < o.parents.size(); ++i) out[1 + i] = msgs.to_parents[i];
}

}  // namespace

BpResult run_mpbp(const FactorGraph& g, const Evidence& evidence, const BpConfig& config,
                  const MessageState* init) {
  if (!evidence.empty() && evidence.size() != g.num_variables())
    throw ShapeError("evidence size mismatch");
  EdgeIndex index(g);
  const std::size_t ne = index.num_edges();
  const std::size_t nf = g.num_factors();
  const std::size_t nv = g.num_variables();

  MessageState cur;
  cur.var_to_factor.assign(ne, 0.0);
  cur.factor_to_var.assign(ne, 0.0);
  if (init) {
    if (init->var_to_factor.size() != ne || init->factor_to_var.size() != ne)
      throw ShapeError("initial message state size mismatch");
    cur = *init;
  }
  MessageState next = cur;

  std::vector<double> factor_delta(nf, 0.0), var_delta(nv, 0.0);

  BpResult result;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    // Factor -> variable, from the previous iteration's variable -> factor.
    parallel_for(nf, config.threads, [&](std::size_t f) {
      const std::size_t lo = index.factor_begin(std::int32_t(f));
      const std::size_t hi = index.factor_end(std::int32_t(f));
      thread_local std::vector<double> fresh;
      fresh.resize(hi - lo);
      factor_messages(g.factor(std::int32_t(f)), cur.var_to_factor.data() + lo, fresh.data(),
                      config.hof);
      double d = 0.0;
      for (std::size_t e = lo; e < hi; ++e) {
        const double damped = damp(cur.factor_to_var[e], fresh[e - lo], config.damping);
        d = std::max(d, message_delta(damped, cur.factor_to_var[e]));
        next.factor_to_var[e] = damped;
      }
      factor_delta[f] = d;
    });
    // Variable -> factor, from the messages just computed. Exclusive sums via
    // a forward prefix pass then a backward suffix pass.
    parallel_for(nv, config.threads, [&](std::size_t v) {
      auto [begin, end] = index.var_edges(std::int32_t(v));
      const double ev = evidence.empty() ? 0.0 : evidence[v];
      double run = 0.0;
      for (const std::size_t* p = begin; p != end; ++p) {
        next.var_to_factor[*p] = run;
        run = log_add(run, next.factor_to_var[*p]);
      }
      double suffix = 0.0;
      double d = 0.0;
      for (const std::size_t* p = end; p != begin;) {
        --p;
        const std::size_t e = *p;
        const double computed = log_add(log_add(next.var_to_factor[e], suffix), ev);
        suffix = log_add(suffix, next.factor_to_var[e]);
        const double damped = damp(cur.var_to_factor[e], computed, config.damping);
        d = std::max(d, message_delta(damped, cur.var_to_factor[e]));
        next.var_to_factor[e] = damped;
      }
      var_delta[v] = d;
    });

    double delta = 0.0;
    for (double d : factor_delta) delta = std::max(delta, d);
    for (double d : var_delta) delta = std::max(delta, d);
    std::swap(cur, next);
    result.iters_run = iter + 1;
    result.final_delta = delta;
    if (delta <= config.tol) {
      result.converged = true;
      break;
    }
  }
  result.messages = std::move(cur);
  return result;
}

std::vector<double> beliefs(const FactorGraph& g, const EdgeIndex& index,
                            const MessageState& messages, const Evidence& evidence) {
  const std::size_t nv = g.num_variables();
  std::vector<double> out(nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    double b = evidence.empty() ? 0.0 : evidence[v];
    auto [begin, end] = index.var_edges(std::int32_t(v));
    for (const std::size_t* p = begin; p != end; ++p)
      b = log_add(b, messages.factor_to_var[*p]);
    out[v] = b;
  }
  return out;
}

std::vector<double> beliefs(const FactorGraph& g, const MessageState& messages,
                            const Evidence& evidence) {
  EdgeIndex index(g);
  return beliefs(g, index, messages, evidence);
}

Assignment decode(const FactorGraph& g, const MessageState& messages, const Evidence& evidence) {
  auto b = beliefs(g, messages, evidence);
  Assignment x(b.size());
  for (std::size_t v = 0; v < b.size(); ++v) x[v] = b[v] > 0.0 ? 1 : 0;
  return x;
}

MessageState noisy_messages(const FactorGraph& g, std::uint64_t seed, double magnitude) {
  EdgeIndex index(g);
  MessageState s;
  s.var_to_factor.resize(index.num_edges());
  s.factor_to_var.resize(index.num_edges());
  Rng rng(seed);
  for (double& m : s.var_to_factor) m = rng.uniform(-magnitude, magnitude);
  for (double& m : s.factor_to_var) m = rng.uniform(-magnitude, magnitude);
  return s;
}

}  // namespace mam
