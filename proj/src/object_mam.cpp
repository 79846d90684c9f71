#include "mam/object_mam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <string>

#include "mam/util.hpp"

namespace mam {

namespace {

struct ShapeBox {
  int min_dr = 0, max_dr = 0, min_dc = 0, max_dc = 0;
};

ShapeBox shape_box(const PartShape& shape) {
  if (shape.offsets.empty()) throw ShapeError("part shape has no offsets");
  ShapeBox b{shape.offsets[0].first, shape.offsets[0].first,
             shape.offsets[0].second, shape.offsets[0].second};
  for (const auto& [dr, dc] : shape.offsets) {
    b.min_dr = std::min(b.min_dr, dr);
    b.max_dr = std::max(b.max_dr, dr);
    b.min_dc = std::min(b.min_dc, dc);
    b.max_dc = std::max(b.max_dc, dc);
  }
  return b;
}

bool anchor_in_bounds(const ShapeBox& b, int r, int c, int rows, int cols) {
  return r + b.min_dr >= 0 && r + b.max_dr < rows && c + b.min_dc >= 0 &&
         c + b.max_dc < cols;
}

}  // namespace

PixelEvidence image_evidence(const BinaryImage& img, double on_value, double off_value) {
  PixelEvidence ev;
  ev.rows = img.rows;
  ev.cols = img.cols;
  ev.m.resize(std::size_t(img.rows) * std::size_t(img.cols));
  for (int r = 0; r < img.rows; ++r)
    for (int c = 0; c < img.cols; ++c)
      ev.m[std::size_t(r) * std::size_t(img.cols) + std::size_t(c)] =
          img.at(r, c) ? on_value : off_value;
  return ev;
}

double part_sum(const PixelEvidence& ev, const PartShape& shape, int r, int c) {
  if (shape.offsets.empty()) throw ShapeError("part shape has no offsets");
  double total = 0.0;
  for (const auto& [dr, dc] : shape.offsets) {
    int pr = r + dr, pc = c + dc;
    if (pr < 0 || pr >= ev.rows || pc < 0 || pc >= ev.cols)
      throw ShapeError("part_sum: covered pixel out of bounds");
    total += ev.m[std::size_t(pr) * std::size_t(ev.cols) + std::size_t(pc)];
  }
  return total;
}

std::vector<double> part_sum_table(const PixelEvidence& ev, const PartShape& shape) {
  const ShapeBox box = shape_box(shape);
  std::vector<double> table(std::size_t(ev.rows) * std::size_t(ev.cols), kNegInf);
  for (int r = 0; r < ev.rows; ++r) {
    for (int c = 0; c < ev.cols; ++c) {
      if (!anchor_in_bounds(box, r, c, ev.rows, ev.cols)) continue;
      double total = 0.0;
      for (const auto& [dr, dc] : shape.offsets)
        total += ev.m[std::size_t(r + dr) * std::size_t(ev.cols) + std::size_t(c + dc)];
      table[std::size_t(r) * std::size_t(ev.cols) + std::size_t(c)] = total;
    }
  }
  return table;
}

double score_elastic_graph(const ElasticGraph& g, const PixelEvidence& ev, int eta) {
  if (g.vertices.empty()) throw ShapeError("score_elastic_graph: empty graph");
  if (eta < 1) throw ShapeError("score_elastic_graph: eta must be >= 1");
  const ShapeBox box = shape_box(g.part_shape);
  double total = 0.0;
  for (const auto& [vr, vc] : g.vertices) {
    double best = kNegInf;
    for (int dr = 0; dr < eta; ++dr) {
      for (int dc = 0; dc < eta; ++dc) {
        int r = vr + dr, c = vc + dc;
        if (!anchor_in_bounds(box, r, c, ev.rows, ev.cols)) continue;
        best = std::max(best, part_sum(ev, g.part_shape, r, c));
      }
    }
    if (is_neg_inf(best))
      throw ShapeError("score_elastic_graph: vertex has no in-bounds location");
    total += best;
  }
  return total / std::pow(double(g.vertices.size()), 0.76);
}

namespace {

// Allowed locations per vertex after the one-sided eta window, bounds clipping
// and exact arc-consistency pruning. A location whose neighbor group would be
// empty can never be ON (the only nonzero pattern needs one ON per group), so
// removal preserves the model restricted to finite configurations.
std::vector<std::vector<std::pair<int, int>>> allowed_locations(const ElasticGraph& eg,
                                                                int eta, int rows,
                                                                int cols) {
  const ShapeBox box = shape_box(eg.part_shape);
  const std::size_t n = eg.vertices.size();
  std::vector<std::vector<std::pair<int, int>>> locs(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto [vr, vc] = eg.vertices[v];
    for (int dr = 0; dr < eta; ++dr)
      for (int dc = 0; dc < eta; ++dc)
        if (anchor_in_bounds(box, vr + dr, vc + dc, rows, cols))
          locs[v].push_back({vr + dr, vc + dc});
    if (locs[v].empty())
      throw ShapeError("object mam: vertex " + std::to_string(v) +
                       " has no in-bounds location");
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : eg.edges) {
      const auto& ru = eg.vertices[std::size_t(e.u)];
      const auto& rv = eg.vertices[std::size_t(e.v)];
      const int ref_dr = rv.first - ru.first, ref_dc = rv.second - ru.second;
      auto ok = [&](std::pair<int, int> lu, std::pair<int, int> lv) {
        return std::abs(lv.first - lu.first - ref_dr) <= e.gamma &&
               std::abs(lv.second - lu.second - ref_dc) <= e.gamma;
      };
      auto& lu = locs[std::size_t(e.u)];
      auto& lv = locs[std::size_t(e.v)];
      auto prune = [&](auto& keep_side, auto& other_side, bool u_side) {
        auto it = std::remove_if(keep_side.begin(), keep_side.end(), [&](auto a) {
          for (const auto& b : other_side)
            if (u_side ? ok(a, b) : ok(b, a)) return false;
          return true;
        });
        if (it != keep_side.end()) {
          keep_side.erase(it, keep_side.end());
          changed = true;
        }
      };
      prune(lu, lv, true);
      prune(lv, lu, false);
      if (lu.empty() || lv.empty())
        throw ShapeError("object mam: edge constraints leave a vertex with no location");
    }
  }
  return locs;
}

std::string loc_label(const std::string& prefix, std::size_t v, std::pair<int, int> rc) {
  return "x[" + prefix + "v" + std::to_string(v) + "]@(" + std::to_string(rc.first) +
         "," + std::to_string(rc.second) + ")";
}

std::string att_label(VariableId a, VariableId b) {
  return "a{" + std::to_string(a.value) + "," + std::to_string(b.value) + "}";
}

ObjectMamLayout append_letter(FactorGraph& g, VariableId top, const ElasticGraph& eg,
                              int eta, int rows, int cols, const std::string& prefix) {
  if (eg.vertices.empty()) throw ShapeError("object mam: empty elastic graph");
  if (eta < 1) throw ShapeError("object mam: eta must be >= 1");
  auto locs = allowed_locations(eg, eta, rows, cols);
  const std::size_t n = eg.vertices.size();

  ObjectMamLayout layout;
  layout.part_shape = eg.part_shape;
  layout.vertices.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    layout.vertices[v].locs = locs[v];
    for (const auto& rc : locs[v])
      layout.vertices[v].location_vars.push_back(
          g.add_variable(VarKind::part, loc_label(prefix, v, rc)));
    for (VariableId x : layout.vertices[v].location_vars)
      layout.vertices[v].topdown_vars.push_back(
          g.add_variable(VarKind::attention, att_label(top, x)));
  }

  // Lateral attention variables, bucketed per (vertex, location, neighbor).
  // Edges are sorted by (u, v), so scanning them yields each vertex's
  // neighbors in ascending order.
  std::vector<std::vector<std::vector<std::vector<VariableId>>>> lat(n);
  std::vector<std::vector<int>> neighbor_of(n);  // parallel group slots
  for (std::size_t v = 0; v < n; ++v)
    lat[v].resize(locs[v].size());
  auto new_slot = [&](std::size_t v, int nb) {
    neighbor_of[v].push_back(nb);
    for (auto& per_loc : lat[v]) per_loc.emplace_back();
    return int(neighbor_of[v].size()) - 1;
  };
  for (const auto& e : eg.edges) {
    const auto u = std::size_t(e.u), v = std::size_t(e.v);
    const auto& ru = eg.vertices[u];
    const auto& rv = eg.vertices[v];
    const int ref_dr = rv.first - ru.first, ref_dc = rv.second - ru.second;
    const int su = new_slot(u, e.v), sv = new_slot(v, e.u);
    for (std::size_t i = 0; i < locs[u].size(); ++i) {
      for (std::size_t j = 0; j < locs[v].size(); ++j) {
        if (std::abs(locs[v][j].first - locs[u][i].first - ref_dr) > e.gamma ||
            std::abs(locs[v][j].second - locs[u][i].second - ref_dc) > e.gamma)
          continue;
        VariableId a = g.add_variable(
            VarKind::attention, att_label(layout.vertices[u].location_vars[i],
                                          layout.vertices[v].location_vars[j]));
        lat[u][i][std::size_t(su)].push_back(a);
        lat[v][j][std::size_t(sv)].push_back(a);
      }
    }
  }

  // Location factors: ON iff exactly one lateral per neighbor group and the
  // top-down attention are ON; staying OFF costs the absence penalty.
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < locs[v].size(); ++i) {
      MamHofSpec spec;
      spec.part_var = layout.vertices[v].location_vars[i];
      for (const auto& group : lat[v][i]) {
        if (group.empty())
          throw ShapeError("object mam: empty neighbor group after pruning");
        spec.groups.push_back(group);
      }
      spec.groups.push_back({layout.vertices[v].topdown_vars[i]});
      const std::size_t m = spec.groups.size();
      spec.patterns.push_back(std::vector<std::uint8_t>(m, 0));
      spec.potentials.push_back(-1000.0);
      spec.patterns.push_back(std::vector<std::uint8_t>(m, 1));
      spec.potentials.push_back(0.0);
      g.add_factor(std::move(spec));
    }
  }
  return layout;
}

}  // namespace

ObjectMam build_object_mam(const ElasticGraph& g, int eta, int rows, int cols) {
  ObjectMam om;
  om.top = om.graph.add_variable(VarKind::part, "top");
  om.layout = append_letter(om.graph, om.top, g, eta, rows, cols, "");

  MamHofSpec top;
  top.part_var = om.top;
  for (const auto& vl : om.layout.vertices) top.groups.push_back(vl.topdown_vars);
  const std::size_t m = top.groups.size();
  top.patterns.push_back(std::vector<std::uint8_t>(m, 0));
  top.potentials.push_back(0.0);
  top.patterns.push_back(std::vector<std::uint8_t>(m, 1));
  top.potentials.push_back(0.0);
  om.graph.add_factor(std::move(top));
  return om;
}

MergedMam merge_mams(const std::vector<ElasticGraph>& graphs, int eta, int rows,
                     int cols) {
  if (graphs.empty()) throw ShapeError("merge_mams: no graphs");
  MergedMam mm;
  mm.top = mm.graph.add_variable(VarKind::part, "top");

  MamHofSpec top;
  top.part_var = mm.top;
  std::vector<std::size_t> block_sizes;
  for (std::size_t n = 0; n < graphs.size(); ++n) {
    auto layout = append_letter(mm.graph, mm.top, graphs[n], eta, rows, cols,
                                "n" + std::to_string(n) + ":");
    for (const auto& vl : layout.vertices) top.groups.push_back(vl.topdown_vars);
    block_sizes.push_back(layout.vertices.size());
    mm.letters.push_back(std::move(layout));
  }
  const std::size_t m = top.groups.size();
  top.patterns.push_back(std::vector<std::uint8_t>(m, 0));
  top.potentials.push_back(-1000.0);
  std::size_t offset = 0;
  for (std::size_t bs : block_sizes) {
    std::vector<std::uint8_t> pat(m, 0);
    for (std::size_t k = 0; k < bs; ++k) pat[offset + k] = 1;
    top.patterns.push_back(std::move(pat));
    top.potentials.push_back(0.0);
    offset += bs;
  }
  mm.graph.add_factor(std::move(top));
  return mm;
}

Evidence location_evidence(const ObjectMam& om, const PixelEvidence& ev) {
  Evidence evid(om.graph.num_variables(), 0.0);
  // Every registered location is in bounds by construction.
  for (const auto& vl : om.layout.vertices)
    for (std::size_t i = 0; i < vl.locs.size(); ++i)
      evid[std::size_t(vl.location_vars[i].value)] =
          part_sum(ev, om.layout.part_shape, vl.locs[i].first, vl.locs[i].second);
  return evid;
}

namespace {

// Distinct part-sum tables, one per unique shape among the graphs.
struct ShapeTables {
  std::vector<PartShape> shapes;
  std::vector<std::vector<double>> tables;
  std::vector<std::size_t> graph_to_table;

  ShapeTables(const std::vector<ElasticGraph>& graphs, const PixelEvidence& ev) {
    for (const auto& g : graphs) {
      std::size_t idx = shapes.size();
      for (std::size_t s = 0; s < shapes.size(); ++s) {
        if (shapes[s].offsets == g.part_shape.offsets) {
          idx = s;
          break;
        }
      }
      if (idx == shapes.size()) {
        shapes.push_back(g.part_shape);
        tables.push_back(part_sum_table(ev, g.part_shape));
      }
      graph_to_table.push_back(idx);
    }
  }
};

double window_best(const std::vector<double>& table, int rows, int cols, int r0,
                   int c0, int eta) {
  double best = kNegInf;
  for (int r = std::max(0, r0); r < std::min(rows, r0 + eta); ++r)
    for (int c = std::max(0, c0); c < std::min(cols, c0 + eta); ++c)
      best = std::max(best, table[std::size_t(r) * std::size_t(cols) + std::size_t(c)]);
  return best;
}

}  // namespace

std::vector<CandidateMatch> candidate_search(const std::vector<ElasticGraph>& graphs,
                                             const PixelEvidence& ev,
                                             const CandidateSearchParams& params,
                                             int threads) {
  if (graphs.empty() || params.top_overall <= 0 || params.top_per_anchor <= 0)
    return {};
  if (params.anchor_stride < 1 || params.eta_search < 1)
    throw ShapeError("candidate_search: stride and eta must be >= 1");
  ShapeTables st(graphs, ev);
  std::vector<double> norm(graphs.size());
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    if (graphs[gi].vertices.empty())
      throw ShapeError("candidate_search: empty elastic graph");
    norm[gi] = std::pow(double(graphs[gi].vertices.size()), 0.76);
  }

  std::vector<std::pair<int, int>> anchors;
  for (int r = 0; r < ev.rows; r += params.anchor_stride)
    for (int c = 0; c < ev.cols; c += params.anchor_stride)
      anchors.push_back({r, c});

  std::vector<std::vector<CandidateMatch>> per_anchor(anchors.size());
  parallel_for(anchors.size(), threads, [&](std::size_t ai) {
    const auto [ar, ac] = anchors[ai];
    std::vector<CandidateMatch>& kept = per_anchor[ai];
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const auto& table = st.tables[st.graph_to_table[gi]];
      double total = 0.0;
      bool feasible = true;
      for (const auto& [vr, vc] : graphs[gi].vertices) {
        double best = window_best(table, ev.rows, ev.cols, ar + vr, ac + vc,
                                  params.eta_search);
        if (is_neg_inf(best)) {
          feasible = false;
          break;
        }
        total += best;
      }
      if (!feasible) continue;
      kept.push_back({int(gi), ar, ac, total / norm[gi]});
    }
    std::sort(kept.begin(), kept.end(), [](const CandidateMatch& a, const CandidateMatch& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.graph_index < b.graph_index;
    });
    if (int(kept.size()) > params.top_per_anchor) kept.resize(std::size_t(params.top_per_anchor));
  });

  std::vector<CandidateMatch> all;
  for (const auto& kept : per_anchor) all.insert(all.end(), kept.begin(), kept.end());
  std::sort(all.begin(), all.end(), [](const CandidateMatch& a, const CandidateMatch& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.graph_index != b.graph_index) return a.graph_index < b.graph_index;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  if (int(all.size()) > params.top_overall) all.resize(std::size_t(params.top_overall));
  return all;
}

PairResult refine_and_pair(const std::vector<CandidateMatch>& candidates,
                           const std::vector<ElasticGraph>& graphs,
                           const PixelEvidence& ev, const RefineParams& params,
                           int threads) {
  PairResult out;
  out.refined.resize(candidates.size());
  if (candidates.empty()) return out;
  ShapeTables st(graphs, ev);

  parallel_for(candidates.size(), threads, [&](std::size_t ci) {
    RefinedCandidate& rc = out.refined[ci];
    rc.match = candidates[ci];
    const std::size_t gi = std::size_t(rc.match.graph_index);
    ElasticGraph g = graphs.at(gi).translated(rc.match.row, rc.match.col);
    ObjectMam om;
    try {
      om = build_object_mam(g, params.eta_refine, ev.rows, ev.cols);
    } catch (const ShapeError&) {
      rc.feasible = false;
      return;
    }
    const auto& table = st.tables[st.graph_to_table[gi]];
    Evidence evid(om.graph.num_variables(), 0.0);
    for (const auto& vl : om.layout.vertices)
      for (std::size_t i = 0; i < vl.locs.size(); ++i)
        evid[std::size_t(vl.location_vars[i].value)] =
            table[std::size_t(vl.locs[i].first) * std::size_t(ev.cols) +
                  std::size_t(vl.locs[i].second)];

    BpConfig bp = params.bp;
    bp.threads = 1;  // candidates are already parallel
    BpResult res = run_mpbp(om.graph, evid, bp);
    std::vector<double> b = beliefs(om.graph, res.messages, evid);

    std::map<std::int32_t, std::int32_t> counts;
    for (const auto& vl : om.layout.vertices) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < vl.locs.size(); ++i)
        if (b[std::size_t(vl.location_vars[i].value)] >
            b[std::size_t(vl.location_vars[best].value)])
          best = i;
      rc.decoded.push_back(vl.locs[best]);
      for (const auto& [dr, dc] : g.part_shape.offsets) {
        int pr = vl.locs[best].first + dr, pc = vl.locs[best].second + dc;
        counts[std::int32_t(pr) * std::int32_t(ev.cols) + std::int32_t(pc)] += 1;
      }
    }
    for (const auto& [px, n] : counts) {
      rc.covered.push_back(px);
      rc.cover_count.push_back(n);
    }
    rc.feasible = true;
  });

  const std::size_t n = candidates.size();
  out.pairs_considered = (long long)(n) * (long long)(n - 1) / 2;
  double best_score = kNegInf;
  for (std::size_t a = 0; a < n; ++a) {
    if (!out.refined[a].feasible) continue;
    for (std::size_t bpos = a + 1; bpos < n; ++bpos) {
      if (!out.refined[bpos].feasible) continue;
      const auto& ra = out.refined[a];
      const auto& rb = out.refined[bpos];
      double score = 0.0;
      std::size_t i = 0, j = 0;
      while (i < ra.covered.size() || j < rb.covered.size()) {
        std::int32_t px;
        std::int32_t cnt = 0;
        if (j >= rb.covered.size() || (i < ra.covered.size() && ra.covered[i] < rb.covered[j])) {
          px = ra.covered[i];
          cnt = ra.cover_count[i];
          ++i;
        } else if (i >= ra.covered.size() || rb.covered[j] < ra.covered[i]) {
          px = rb.covered[j];
          cnt = rb.cover_count[j];
          ++j;
        } else {
          px = ra.covered[i];
          cnt = ra.cover_count[i] + rb.cover_count[j];
          ++i;
          ++j;
        }
        score += ev.m[std::size_t(px)] - double(cnt - 1) * params.overlap_penalty;
      }
      if (score > best_score) {
        best_score = score;
        out.first = int(a);
        out.second = int(bpos);
        out.score = score;
      }
    }
  }
  return out;
}

CabcDecision classify_cabc_decision(const BinaryImage& image,
                                    std::pair<int, int> marker_a,
                                    std::pair<int, int> marker_b,
                                    const std::vector<ElasticGraph>& graphs,
                                    const CandidateSearchParams& search_params,
                                    const RefineParams& refine_params, int threads) {
  CabcDecision decision;
  PixelEvidence ev = image_evidence(image);
  std::vector<CandidateMatch> cands = candidate_search(graphs, ev, search_params, threads);
  if (cands.size() < 2) return decision;
  decision.pair = refine_and_pair(cands, graphs, ev, refine_params, threads);
  const PairResult& pr = decision.pair;
  if (pr.first < 0) return decision;

  const RefinedCandidate& first = pr.refined[std::size_t(pr.first)];
  const RefinedCandidate& second = pr.refined[std::size_t(pr.second)];
  auto nearest_d2 = [&](const RefinedCandidate& rc, std::pair<int, int> marker) {
    long long best = std::numeric_limits<long long>::max();
    for (std::int32_t px : rc.covered) {
      long long dr = marker.first - px / ev.cols;
      long long dc = marker.second - px % ev.cols;
      best = std::min(best, dr * dr + dc * dc);
    }
    return best;
  };
  auto assign = [&](std::pair<int, int> marker) {
    long long da = nearest_d2(first, marker);
    long long db = nearest_d2(second, marker);
    if (da < db) return 0;
    if (db < da) return 1;
    return first.match.score >= second.match.score ? 0 : 1;
  };
  decision.same = assign(marker_a) == assign(marker_b);
  return decision;
}

bool classify_cabc_same(const BinaryImage& image, std::pair<int, int> marker_a,
                        std::pair<int, int> marker_b,
                        const std::vector<ElasticGraph>& graphs,
                        const CandidateSearchParams& search_params,
                        const RefineParams& refine_params, int threads) {
  return classify_cabc_decision(image, marker_a, marker_b, graphs, search_params,
                                refine_params, threads)
      .same;
}

}  // namespace mam
