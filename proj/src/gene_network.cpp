#include "mam/gene_network.hpp"

#include "mam/oracle.hpp"

namespace mam {

GeneNetwork build_gene_network_demo(const GeneNetworkConfig& config) {
  GeneNetwork n;
  auto& g = n.graph;
  n.x_a = g.add_variable(VarKind::part, "X_A");
  n.x_b = g.add_variable(VarKind::part, "X_B");
  n.x_c = g.add_variable(VarKind::part, "X_C");
  n.x_d = g.add_variable(VarKind::part, "X_D");
  n.a_ab = g.add_variable(VarKind::attention, "a{X_A,X_B}");
  n.a_ad = g.add_variable(VarKind::attention, "a{X_A,X_D}");

  // Gate: exactly four joint states of (X_A, X_C, a_AB, a_AD) are allowed.
  // A off -> both attentions off; A on with C absent -> attend to B; A on
  // with C present -> attend to D.
  {
    TableFactor gate;
    gate.vars = {n.x_a, n.x_c, n.a_ab, n.a_ad};
    gate.log_pots.assign(16, kNegInf);
    auto idx = [](int a, int c, int ab, int ad) {
      return std::size_t(a << 3 | c << 2 | ab << 1 | ad);
    };
    gate.log_pots[idx(0, 0, 0, 0)] = 0.0;
    gate.log_pots[idx(0, 1, 0, 0)] = 0.0;
    gate.log_pots[idx(1, 0, 1, 0)] = 0.0;
    gate.log_pots[idx(1, 1, 0, 1)] = 0.0;
    g.add_factor(std::move(gate));
  }
  // Promotions: penalize target OFF while its attention is ON.
  auto promotion = [&](VariableId a, VariableId x, double anti) {
    TableFactor t;
    t.vars = {a, x};
    t.log_pots = {0.0, 0.0, anti, 0.0};  // states (a,x): 00 01 10 11
    g.add_factor(std::move(t));
  };
  promotion(n.a_ab, n.x_b, config.promote_b);
  promotion(n.a_ad, n.x_d, config.promote_d);
  // Corepression between B and D.
  {
    TableFactor t;
    t.vars = {n.x_b, n.x_d};
    t.log_pots = {0.0, 0.0, 0.0, config.corepress};
    g.add_factor(std::move(t));
  }
  return n;
}

namespace {

// I(x; y | context, rest) = sum_w p(rest=w | context) I(x; y | context, rest=w).
double context_mi(const FactorGraph& g, VariableId x, VariableId y,
                  std::pair<VariableId, std::uint8_t> context, VariableId rest) {
  Evidence ev(g.num_variables(), 0.0);
  VariableId targets[] = {rest};
  std::pair<VariableId, std::uint8_t> ctx[] = {context};
  std::vector<double> p_rest = marginal_distribution(g, ev, targets, ctx);
  double mi = 0.0;
  for (std::uint8_t w = 0; w < 2; ++w) {
    if (!(p_rest[w] > 0.0)) continue;
    std::pair<VariableId, std::uint8_t> cond[] = {context, {rest, w}};
    mi += p_rest[w] * conditional_mutual_information(g, ev, x, y, cond);
  }
  return mi;
}

}  // namespace

GeneCsiReport gene_network_csi(const GeneNetworkConfig& config) {
  GeneNetwork net = build_gene_network_demo(config);
  GeneCsiReport r;
  r.i_ab_given_c1 = context_mi(net.graph, net.x_a, net.x_b, {net.x_c, 1}, net.x_d);
  r.i_ad_given_c0 = context_mi(net.graph, net.x_a, net.x_d, {net.x_c, 0}, net.x_b);
  return r;
}

}  // namespace mam
