#include <doctest.h>

#include <cmath>
#include <limits>

#include "mam/logdomain.hpp"

using namespace mam;

TEST_CASE("sentinel absorbs under log_add and yields under log_max") {
  CHECK(is_neg_inf(kNegInf));
  CHECK(!is_neg_inf(0.0));
  CHECK(!is_neg_inf(-1e308));

  CHECK(is_neg_inf(log_add(kNegInf, 3.0)));
  CHECK(is_neg_inf(log_add(3.0, kNegInf)));
  CHECK(is_neg_inf(log_add(kNegInf, kNegInf)));
  CHECK(log_add(1.5, 2.0) == doctest::Approx(3.5));

  CHECK(log_max(kNegInf, -7.0) == -7.0);
  CHECK(log_max(-7.0, kNegInf) == -7.0);
  CHECK(log_max(2.0, 3.0) == 3.0);
  CHECK(is_neg_inf(log_max(kNegInf, kNegInf)));
}

TEST_CASE("log_add_if applies a message only at ON") {
  CHECK(log_add_if(1.0, 5.0, false) == 1.0);
  CHECK(log_add_if(1.0, 5.0, true) == 6.0);
  CHECK(log_add_if(1.0, kNegInf, false) == 1.0);
  CHECK(is_neg_inf(log_add_if(1.0, kNegInf, true)));
}

TEST_CASE("normalize_message is ON minus OFF with sentinel rules") {
  CHECK(normalize_message(1.0, 4.0) == doctest::Approx(3.0));
  CHECK(normalize_message(4.0, 1.0) == doctest::Approx(-3.0));
  CHECK(is_neg_inf(normalize_message(0.0, kNegInf)));
  CHECK(normalize_message(kNegInf, 0.0) == std::numeric_limits<double>::infinity());
  // Degenerate factor: both states forbidden collapses to the neutral 0.
  CHECK(normalize_message(kNegInf, kNegInf) == 0.0);
}

TEST_CASE("normalization kills any common additive constant") {
  for (double c : {-10.0, -0.5, 0.0, 2.25, 1e6}) {
    CHECK(normalize_message(1.0 + c, 4.0 + c) == doctest::Approx(3.0));
  }
}

TEST_CASE("damp blends and pins sentinels") {
  CHECK(damp(2.0, 4.0, 0.0) == 4.0);
  CHECK(damp(2.0, 4.0, 0.5) == doctest::Approx(3.0));
  CHECK(damp(2.0, 4.0, 0.9) == doctest::Approx(2.2));
  CHECK(is_neg_inf(damp(kNegInf, 4.0, 0.5)));
  CHECK(is_neg_inf(damp(4.0, kNegInf, 0.5)));
  // damping == 0 always adopts the fresh value, sentinel or not.
  CHECK(damp(kNegInf, 4.0, 0.0) == 4.0);
}

TEST_CASE("message_delta treats equal sentinels as converged") {
  CHECK(message_delta(kNegInf, kNegInf) == 0.0);
  CHECK(message_delta(1.0, 1.0) == 0.0);
  CHECK(message_delta(1.0, -2.0) == doctest::Approx(3.0));
  CHECK(message_delta(kNegInf, 0.0) == std::numeric_limits<double>::infinity());
  CHECK(message_delta(0.0, kNegInf) == std::numeric_limits<double>::infinity());
}
