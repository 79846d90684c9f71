#include <doctest.h>

#include <cmath>

#include "mam/gene_network.hpp"
#include "mam/oracle.hpp"
#include "mam/validate.hpp"

using namespace mam;

TEST_CASE("demo structure: four genes, two attention gates, valid MAM") {
  GeneNetwork net = build_gene_network_demo();
  CHECK(net.graph.num_variables() == 6);
  CHECK(net.graph.variable(net.a_ab).kind == VarKind::attention);
  CHECK(net.graph.variable(net.a_ad).kind == VarKind::attention);
  CHECK(validate_mam_constraints(net.graph).empty());
}

TEST_CASE("strength configuration lands in the factor tables") {
  GeneNetworkConfig cfg;
  cfg.promote_b = std::log(0.3);
  cfg.corepress = std::log(0.05);
  GeneNetwork net = build_gene_network_demo(cfg);
  bool saw_promote = false, saw_corepress = false;
  for (std::int32_t f = 0; f < std::int32_t(net.graph.num_factors()); ++f) {
    const auto* t = std::get_if<TableFactor>(&net.graph.factor(f));
    if (!t) continue;
    for (double p : t->log_pots) {
      if (p == cfg.promote_b) saw_promote = true;
      if (p == cfg.corepress) saw_corepress = true;
    }
  }
  CHECK(saw_promote);
  CHECK(saw_corepress);
}

TEST_CASE("context-specific independences hold exactly at the defaults") {
  GeneCsiReport r = gene_network_csi();
  CHECK(r.i_ab_given_c1 <= 1e-12);
  CHECK(r.i_ad_given_c0 <= 1e-12);
}

TEST_CASE("independences hold for any strictly positive strengths") {
  for (double a : {0.05, 0.4, 0.9}) {
    for (double b : {0.1, 0.7}) {
      GeneNetworkConfig cfg;
      cfg.promote_b = std::log(a);
      cfg.promote_d = std::log(b);
      cfg.corepress = std::log(0.5 * (a + b));
      GeneCsiReport r = gene_network_csi(cfg);
      CHECK(r.i_ab_given_c1 <= 1e-12);
      CHECK(r.i_ad_given_c0 <= 1e-12);
    }
  }
}

TEST_CASE("the un-gated pair is dependent outside its context") {
  // Conditioning on the compound alone leaves X_A and X_B coupled through
  // the corepression of X_D; the independence is context-specific, not
  // marginal.
  GeneNetwork net = build_gene_network_demo();
  Evidence ev(net.graph.num_variables(), 0.0);
  std::pair<VariableId, std::uint8_t> c1[] = {{net.x_c, 1}};
  CHECK(conditional_mutual_information(net.graph, ev, net.x_a, net.x_b, c1) > 1e-6);
}
