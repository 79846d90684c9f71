#pragma once

#include <cstdint>
#include <vector>

#include "mam/graph.hpp"
#include "mam/mam_hof.hpp"

namespace mam {

struct BpConfig {
  double damping = 0.5;
  int max_iters = 200;
  double tol = 1e-6;
  // Worker hint only: results are identical for any value.
  int threads = 1;
  MamHofOptions hof;
};

// One scalar per directed edge, flat over (factor, scope position) pairs.
// Entries are finite or the -inf sentinel.
struct MessageState {
  std::vector<double> var_to_factor;
  std::vector<double> factor_to_var;
};

// Edge bookkeeping shared by the engine and its callers.
class EdgeIndex {
 public:
  explicit EdgeIndex(const FactorGraph& g);
  std::size_t num_edges() const { return edge_var_.size(); }
  std::size_t factor_begin(std::int32_t f) const { return factor_offset_[std::size_t(f)]; }
  std::size_t factor_end(std::int32_t f) const { return factor_offset_[std::size_t(f) + 1]; }
  std::int32_t edge_var(std::size_t e) const { return edge_var_[e]; }
  // Edges incident to a variable, ascending by edge id.
  std::pair<const std::size_t*, const std::size_t*> var_edges(std::int32_t v) const {
    return {var_edge_list_.data() + var_offset_[std::size_t(v)],
            var_edge_list_.data() + var_offset_[std::size_t(v) + 1]};
  }

 private:
  std::vector<std::size_t> factor_offset_;
  std::vector<std::int32_t> edge_var_;
  std::vector<std::size_t> var_offset_;
  std::vector<std::size_t> var_edge_list_;
};

struct BpResult {
  MessageState messages;
  bool converged = false;
  int iters_run = 0;
  double final_delta = 0.0;
};

// Damped flood-schedule max-product in the log domain. Each iteration
// computes every factor->variable message from the previous iteration's
// variable->factor messages (Table/Unary by enumeration, MamHof/OrFactor by
// their O(scope) operations), then refreshes every variable->factor message;
// both updates are damped. Messages start at zero unless `init` is given.
BpResult run_mpbp(const FactorGraph& g, const Evidence& evidence, const BpConfig& config = {},
                  const MessageState* init = nullptr);

// Per-variable belief: evidence plus all incoming factor->variable messages.
std::vector<double> beliefs(const FactorGraph& g, const EdgeIndex& index,
                            const MessageState& messages, const Evidence& evidence);
std::vector<double> beliefs(const FactorGraph& g, const MessageState& messages,
                            const Evidence& evidence);

// ON iff belief > 0 (ties decode OFF).
Assignment decode(const FactorGraph& g, const MessageState& messages, const Evidence& evidence);

// Uniform noise in [-magnitude, magnitude] on every message slot; used for
// inference restarts.
MessageState noisy_messages(const FactorGraph& g, std::uint64_t seed, double magnitude);

}  // namespace mam
