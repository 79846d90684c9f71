#pragma once

#include <cmath>

#include "mam/graph.hpp"

namespace mam {

// Four-gene regulation demo: A promotes B when compound C is absent and D
// when C is present. Two attention variables gate the promotions; the
// context-specific independences X_A _||_ X_B | X_C=1 and X_A _||_ X_D | X_C=0
// hold exactly for any strength settings.
struct GeneNetworkConfig {
  // Log potential at the anti-promoted state (promoter ON, target OFF) and at
  // the corepressed state (B and D both ON). Consistent states sit at 0.
  double promote_b = std::log(0.1);
  double promote_d = std::log(0.1);
  double corepress = std::log(0.1);
};

struct GeneNetwork {
  FactorGraph graph;
  VariableId x_a, x_b, x_c, x_d;
  VariableId a_ab, a_ad;
};

GeneNetwork build_gene_network_demo(const GeneNetworkConfig& config = {});

// Exact context-specific independence check via the enumeration oracle.
// Independence is relative to the rest of the network: the reported values are
// I(X_A;X_B | X_C=1, X_D) and I(X_A;X_D | X_C=0, X_B), each averaged over the
// states of the trailing conditioning gene with its conditional weight. Both
// are exactly zero for any strength settings; conditioning on X_C alone would
// not be, because summing out the third gene re-couples the pair through the
// corepression factor.
struct GeneCsiReport {
  double i_ab_given_c1 = 0.0;
  double i_ad_given_c0 = 0.0;
};

GeneCsiReport gene_network_csi(const GeneNetworkConfig& config = {});

}  // namespace mam
