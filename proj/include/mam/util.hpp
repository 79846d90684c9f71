#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mam {

// Error taxonomy: the CLI maps these to exit codes 2 / 3 / 4.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64. Deliberately not std::mt19937 + std distributions: those are
// implementation-defined, and generated fixtures must be byte-reproducible.
struct Rng {
  std::uint64_t state = 0x9e3779b97f4a7c15ull;

  explicit Rng(std::uint64_t seed = 0) : state(seed + 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // [0, n)
  std::uint64_t uniform_int(std::uint64_t n) { return n ? next_u64() % n : 0; }
  int uniform_int(int lo, int hi) {  // inclusive range
    return lo + int(uniform_int(std::uint64_t(hi - lo + 1)));
  }
  bool coin() { return (next_u64() & 1) != 0; }
};

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t salt) {
  Rng r(root ^ (salt * 0xd1342543de82ef95ull));
  return r.next_u64();
}

std::uint64_t fnv1a64(std::string_view bytes);

// Deterministic chunked parallel loop: fn(i) for i in [0, n). Each index must
// write only its own outputs; results are then identical for any n_threads.
void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn);

}  // namespace mam
