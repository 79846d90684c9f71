#include <doctest.h>

#include <cmath>
#include <vector>

#include "mam/or_factor.hpp"
#include "mam/oracle.hpp"
#include "mam/util.hpp"
#include "test_helpers.hpp"

using namespace mam;

namespace {

double or_pot(const OrFactorSpec& spec, std::uint8_t pixel,
              std::initializer_list<std::uint8_t> parents) {
  std::vector<std::uint8_t> states;
  states.push_back(pixel);
  states.insert(states.end(), parents);
  return factor_potential(FactorSpec{spec}, states);
}

}  // namespace

TEST_CASE("potential follows the four-row noisy-OR table") {
  OrFactorSpec spec{VariableId{0},
                    {VariableId{1}, VariableId{2}, VariableId{3}},
                    std::log(0.07),
                    std::log(0.0019)};
  CHECK(or_pot(spec, 1, {0, 1, 0}) == 0.0);             // supported pixel
  CHECK(or_pot(spec, 1, {1, 1, 1}) == 0.0);
  CHECK(or_pot(spec, 0, {1, 0, 0}) == spec.log_pi01);   // missed prediction
  CHECK(or_pot(spec, 1, {0, 0, 0}) == spec.log_pi10);   // spurious pixel
  CHECK(or_pot(spec, 0, {0, 0, 0}) == 0.0);             // empty config
}

TEST_CASE("pi10 = 0 maps the spurious row to the sentinel") {
  OrFactorSpec spec{VariableId{0}, {VariableId{1}}, std::log(0.07), kNegInf};
  CHECK(is_neg_inf(or_pot(spec, 1, {0})));
  CHECK(or_pot(spec, 0, {0}) == 0.0);
  // Messages stay well-defined: the pixel's ON state is still reachable.
  OrMessages out = or_factor_messages(spec, 0.0, std::vector<double>{0.0});
  CHECK(std::isfinite(out.to_pixel));
}

TEST_CASE("single parent equals 2x2 enumeration") {
  mam::Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    OrFactorSpec spec{VariableId{0}, {VariableId{1}},
                      rng.uniform(-5.0, -0.8), rng.uniform(-5.0, -0.8)};
    auto incoming = fixtures::random_incoming(rng, 2);
    OrMessages out = or_factor_messages(spec, incoming[0],
                                        std::span(incoming).subspan(1));
    auto exact = exact_factor_messages(FactorSpec{spec}, incoming);
    std::vector<double> flat = {out.to_pixel, out.to_parents[0]};
    CHECK(fixtures::max_message_deviation(flat, exact) <= 1e-9);
  }
}

TEST_CASE("strongly negative parents push the pixel message to log pi10") {
  OrFactorSpec spec{VariableId{0},
                    {VariableId{1}, VariableId{2}, VariableId{3}},
                    std::log(0.07), std::log(0.0019)};
  std::vector<double> parents(3, -50.0);
  OrMessages out = or_factor_messages(spec, 0.0, parents);
  CHECK(out.to_pixel == doctest::Approx(spec.log_pi10).epsilon(1e-9));
}

TEST_CASE("random specs match the enumeration oracle") {
  mam::Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    OrFactorSpec spec = fixtures::random_or_spec(rng);
    auto incoming = fixtures::random_incoming(rng, spec.parents.size() + 1);
    OrMessages out = or_factor_messages(spec, incoming[0],
                                        std::span(incoming).subspan(1));
    std::vector<double> flat;
    flat.push_back(out.to_pixel);
    flat.insert(flat.end(), out.to_parents.begin(), out.to_parents.end());
    auto exact = exact_factor_messages(FactorSpec{spec}, incoming);
    worst = std::max(worst, fixtures::max_message_deviation(flat, exact));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("explaining away: near-zero leaks make the OR exact") {
  OrFactorSpec spec{VariableId{0},
                    {VariableId{1}, VariableId{2}, VariableId{3}},
                    -1e3, -1e3};
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    std::vector<std::uint8_t> states = {std::uint8_t(mask & 1), std::uint8_t((mask >> 1) & 1),
                                        std::uint8_t((mask >> 2) & 1), std::uint8_t((mask >> 3) & 1)};
    bool some_parent = states[1] || states[2] || states[3];
    double pot = factor_potential(FactorSpec{spec}, states);
    bool consistent = (states[0] == std::uint8_t(some_parent));
    if (consistent) {
      CHECK(pot == 0.0);
    } else {
      CHECK(pot <= -1e3);
    }
  }
}
