#include "mam/pathfinder.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "mam/util.hpp"

namespace mam {

using nlohmann::json;

namespace {

constexpr int kNumTypes = 16;
constexpr int kDashRadius = 4;  // dash endpoint radius in pixels
constexpr int kGapRadius = 2;   // gap between consecutive dashes

std::pair<int, int> polar(int t, double radius) {
  double phi = double(t) * std::numbers::pi / 8.0;
  return {int(std::lround(radius * std::sin(phi))),
          int(std::lround(radius * std::cos(phi)))};
}

}  // namespace

std::vector<PartShape> pathfinder_catalog() {
  std::vector<PartShape> catalog;
  for (int t = 0; t < kNumTypes; ++t) {
    auto [er, ec] = polar(t, kDashRadius);
    PartShape shape;
    shape.part_type = t;
    for (int j = 0; j <= kDashRadius; ++j) {
      std::pair<int, int> p{int(std::lround(double(j) * er / kDashRadius)),
                            int(std::lround(double(j) * ec / kDashRadius))};
      if (std::find(shape.offsets.begin(), shape.offsets.end(), p) ==
          shape.offsets.end()) {
        shape.offsets.push_back(p);
      }
    }
    catalog.push_back(std::move(shape));
  }
  return catalog;
}

std::pair<int, int> dash_advance(int part_type) {
  auto [er, ec] = polar(part_type, kDashRadius);
  auto [gr, gc] = polar(part_type, double(kGapRadius));
  return {er + gr, ec + gc};
}

Cooccurrence canonical_cooccurrence(int t1, int t2, int dr, int dc) {
  Cooccurrence a{t1, t2, dr, dc};
  Cooccurrence b{t2, t1, -dr, -dc};
  return std::min(a, b);
}

void PathfinderModel::finalize() {
  std::size_t n_types = catalog.size();
  std::vector<double> sxx(n_types, 0.0), sxy(n_types, 0.0), syy(n_types, 0.0);
  auto add = [&](int t, double dr, double dc) {
    if (t < 0 || std::size_t(t) >= n_types) throw ShapeError("co-occurrence references unknown part type");
    sxx[std::size_t(t)] += dr * dr;
    sxy[std::size_t(t)] += dr * dc;
    syy[std::size_t(t)] += dc * dc;
  };
  for (const auto& co : cooccurrences) {
    add(co.t1, co.dr, co.dc);
    add(co.t2, -co.dr, -co.dc);
  }
  side_axis.assign(n_types, {0.0, 0.0});
  for (std::size_t t = 0; t < n_types; ++t) {
    if (sxx[t] + syy[t] == 0.0) continue;  // no incident displacements
    double disc = std::sqrt((sxx[t] - syy[t]) * (sxx[t] - syy[t]) + 4.0 * sxy[t] * sxy[t]);
    double lambda = 0.5 * (sxx[t] + syy[t] + disc);
    double vr, vc;
    if (sxy[t] != 0.0) {
      vr = sxy[t];
      vc = lambda - sxx[t];
    } else if (sxx[t] >= syy[t]) {
      vr = 1.0;
      vc = 0.0;
    } else {
      vr = 0.0;
      vc = 1.0;
    }
    if (vr < 0.0 || (vr == 0.0 && vc < 0.0)) {
      vr = -vr;
      vc = -vc;
    }
    side_axis[t] = {vr, vc};
  }
}

int PathfinderModel::side(int part_type, int dr, int dc) const {
  if (part_type < 0 || std::size_t(part_type) >= side_axis.size()) {
    throw ShapeError("side(): unknown part type");
  }
  auto [ar, ac] = side_axis[std::size_t(part_type)];
  return double(dr) * ar + double(dc) * ac >= 0.0 ? 1 : 2;
}

bool PathfinderModel::has_cooccurrence(const Cooccurrence& c) const {
  return std::binary_search(cooccurrences.begin(), cooccurrences.end(), c);
}

int PathfinderModel::max_displacement() const {
  int m = 0;
  for (const auto& co : cooccurrences) {
    m = std::max({m, std::abs(co.dr), std::abs(co.dc)});
  }
  return m;
}

namespace {

json catalog_to_json(const std::vector<PartShape>& catalog) {
  json parts = json::array();
  for (const auto& shape : catalog) {
    json offs = json::array();
    for (auto [dr, dc] : shape.offsets) offs.push_back(json::array({dr, dc}));
    parts.push_back({{"part_type", shape.part_type}, {"offsets", std::move(offs)}});
  }
  return parts;
}

std::vector<PartShape> catalog_from_json(const json& parts) {
  std::vector<PartShape> catalog;
  for (const auto& p : parts) {
    PartShape shape;
    shape.part_type = p.at("part_type").get<int>();
    for (const auto& off : p.at("offsets")) {
      shape.offsets.emplace_back(off.at(0).get<int>(), off.at(1).get<int>());
    }
    catalog.push_back(std::move(shape));
  }
  return catalog;
}

}  // namespace

std::string pathfinder_model_to_json_string(const PathfinderModel& model) {
  json cos = json::array();
  for (const auto& co : model.cooccurrences) {
    cos.push_back(json::array({co.t1, co.t2, co.dr, co.dc}));
  }
  json doc{{"format_version", 1},
           {"rows", model.rows},
           {"cols", model.cols},
           {"termination_penalty", model.termination_penalty},
           {"catalog", catalog_to_json(model.catalog)},
           {"cooccurrences", std::move(cos)}};
  return doc.dump(2) + "\n";
}

PathfinderModel pathfinder_model_from_json_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("pathfinder model: ") + e.what());
  }
  PathfinderModel model;
  try {
    model.rows = doc.at("rows").get<int>();
    model.cols = doc.at("cols").get<int>();
    model.termination_penalty = doc.at("termination_penalty").get<double>();
    model.catalog = catalog_from_json(doc.at("catalog"));
    for (const auto& co : doc.at("cooccurrences")) {
      model.cooccurrences.push_back({co.at(0).get<int>(), co.at(1).get<int>(),
                                     co.at(2).get<int>(), co.at(3).get<int>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("pathfinder model: ") + e.what());
  }
  std::sort(model.cooccurrences.begin(), model.cooccurrences.end());
  model.cooccurrences.erase(
      std::unique(model.cooccurrences.begin(), model.cooccurrences.end()),
      model.cooccurrences.end());
  model.finalize();  // also validates part type references
  return model;
}

void save_pathfinder_model(const std::string& path, const PathfinderModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << pathfinder_model_to_json_string(model);
}

PathfinderModel load_pathfinder_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return pathfinder_model_from_json_string(buf.str());
}

BinaryImage rasterize_contour(const std::vector<std::pair<int, int>>& pixels,
                              int rows, int cols) {
  BinaryImage img(rows, cols);
  for (auto [r, c] : pixels) {
    if (!img.in_bounds(r, c)) throw ShapeError("contour pixel out of bounds");
    img.set(r, c, 1);
  }
  return img;
}

PathfinderInstance generate_pathfinder(const PathfinderGenParams& params) {
  if (params.rows < 4 * params.margin || params.cols < 4 * params.margin) {
    throw ShapeError("generate_pathfinder: image too small");
  }
  if (params.n_targets < 1) throw ShapeError("generate_pathfinder: need at least one target");
  Rng rng(params.seed);
  bool same = params.n_targets < 2 ? true : rng.coin();

  const auto catalog = pathfinder_catalog();
  const int rows = params.rows, cols = params.cols, margin = params.margin;
  std::vector<std::uint8_t> blocked(std::size_t(rows) * std::size_t(cols), 0);

  auto attempt = [&](int len) -> std::optional<std::vector<std::pair<int, int>>> {
    int t = int(rng.uniform_int(std::uint64_t(kNumTypes)));
    int r = rng.uniform_int(margin, rows - 1 - margin);
    int c = rng.uniform_int(margin, cols - 1 - margin);
    std::vector<std::pair<int, int>> pixels;
    std::vector<std::vector<std::pair<int, int>>> dashes;
    for (int d = 0; d < len; ++d) {
      std::vector<std::pair<int, int>> cur;
      for (auto [dr, dc] : catalog[std::size_t(t)].offsets) {
        int pr = r + dr, pc = c + dc;
        if (pr < margin || pr > rows - 1 - margin || pc < margin || pc > cols - 1 - margin) {
          return std::nullopt;
        }
        if (blocked[std::size_t(pr) * std::size_t(cols) + std::size_t(pc)]) {
          return std::nullopt;
        }
        // keep the walk from grazing itself; the previous dash is exempt
        for (std::size_t k = 0; k + 1 < dashes.size(); ++k) {
          for (auto [qr, qc] : dashes[k]) {
            if (std::max(std::abs(pr - qr), std::abs(pc - qc)) < 3) return std::nullopt;
          }
        }
        cur.emplace_back(pr, pc);
      }
      pixels.insert(pixels.end(), cur.begin(), cur.end());
      dashes.push_back(std::move(cur));
      auto [ar, ac] = dash_advance(t);
      r += ar;
      c += ac;
      int turn = int(rng.uniform_int(std::uint64_t(4)));
      if (turn == 2) t = (t + 1) % kNumTypes;
      if (turn == 3) t = (t + kNumTypes - 1) % kNumTypes;
    }
    return pixels;
  };

  PathfinderInstance inst;
  inst.same = same;
  std::vector<int> lengths;
  for (int i = 0; i < params.n_targets; ++i) {
    lengths.push_back(rng.uniform_int(params.target_len_min, params.target_len_max));
  }
  for (int i = 0; i < params.n_distractors; ++i) {
    lengths.push_back(rng.uniform_int(params.distractor_len_min, params.distractor_len_max));
  }
  for (int len : lengths) {
    bool placed = false;
    for (int retry = 0; retry < params.max_retries && !placed; ++retry) {
      auto pixels = attempt(len);
      if (!pixels) continue;
      for (auto [pr, pc] : *pixels) {
        for (int br = std::max(0, pr - params.separation);
             br <= std::min(rows - 1, pr + params.separation); ++br) {
          for (int bc = std::max(0, pc - params.separation);
               bc <= std::min(cols - 1, pc + params.separation); ++bc) {
            blocked[std::size_t(br) * std::size_t(cols) + std::size_t(bc)] = 1;
          }
        }
      }
      inst.contours.push_back(std::move(*pixels));
      placed = true;
    }
    if (!placed) {
      throw BudgetError("generate_pathfinder: contour placement failed after " +
                        std::to_string(params.max_retries) + " retries");
    }
  }

  auto endpoint = [&](int contour, bool front) {
    const auto& px = inst.contours[std::size_t(contour)];
    return front ? px.front() : px.back();
  };
  if (same) {
    inst.marker_a = endpoint(0, true);
    inst.marker_b = endpoint(0, false);
  } else {
    inst.marker_a = endpoint(0, rng.coin());
    inst.marker_b = endpoint(1, rng.coin());
  }

  std::vector<std::pair<int, int>> all;
  for (const auto& px : inst.contours) all.insert(all.end(), px.begin(), px.end());
  inst.image = rasterize_contour(all, rows, cols);
  return inst;
}

std::string pathfinder_instance_to_json_string(const PathfinderInstance& inst) {
  json contours = json::array();
  for (const auto& px : inst.contours) {
    json one = json::array();
    for (auto [r, c] : px) one.push_back(json::array({r, c}));
    contours.push_back(std::move(one));
  }
  json doc{{"format_version", 1},
           {"label", inst.same ? "same" : "different"},
           {"markers", json::array({json::array({inst.marker_a.first, inst.marker_a.second}),
                                    json::array({inst.marker_b.first, inst.marker_b.second})})},
           {"contours", std::move(contours)}};
  return doc.dump(2) + "\n";
}

PathfinderInstance pathfinder_instance_from_json_string(const std::string& text,
                                                        const BinaryImage& image) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("pathfinder instance: ") + e.what());
  }
  PathfinderInstance inst;
  inst.image = image;
  try {
    std::string label = doc.at("label").get<std::string>();
    if (label != "same" && label != "different") {
      throw ParseError("pathfinder instance: bad label " + label);
    }
    inst.same = label == "same";
    const auto& markers = doc.at("markers");
    inst.marker_a = {markers.at(0).at(0).get<int>(), markers.at(0).at(1).get<int>()};
    inst.marker_b = {markers.at(1).at(0).get<int>(), markers.at(1).at(1).get<int>()};
    for (const auto& contour : doc.at("contours")) {
      std::vector<std::pair<int, int>> px;
      for (const auto& p : contour) px.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
      inst.contours.push_back(std::move(px));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("pathfinder instance: ") + e.what());
  }
  return inst;
}

SparsifyParams pathfinder_sparsify_defaults() {
  SparsifyParams sp;
  sp.log_pi01 = std::log(0.07);
  sp.log_pi10 = std::log(0.0019);
  sp.part_prior = -20.0;
  sp.stride = 1;
  sp.restarts = 10;
  return sp;
}

std::vector<Cooccurrence> extract_cooccurrences(
    const std::vector<std::vector<std::pair<int, int>>>& contours, int rows,
    int cols, const std::vector<PartShape>& catalog, double min_rel_freq,
    const SparsifyParams& sparsify_params) {
  if (contours.empty()) throw ShapeError("extract_cooccurrences: empty contour set");
  std::map<Cooccurrence, std::int64_t> counts;
  std::int64_t total = 0;
  for (const auto& contour : contours) {
    BinaryImage img = rasterize_contour(contour, rows, cols);
    SparsifyResult res = sparsify(img, catalog, sparsify_params);

    std::vector<int> order(std::size_t(rows) * std::size_t(cols), INT_MAX);
    for (std::size_t i = 0; i < contour.size(); ++i) {
      auto [r, c] = contour[i];
      std::size_t p = std::size_t(r) * std::size_t(cols) + std::size_t(c);
      order[p] = std::min(order[p], int(i));
    }

    struct Act {
      int key;
      std::size_t idx;
    };
    std::vector<Act> acts;
    for (std::size_t i = 0; i < res.graph.placements.size(); ++i) {
      const auto& pl = res.graph.placements[i];
      if (!res.assignment[std::size_t(pl.var.value)]) continue;
      int key = INT_MAX;
      for (auto p : res.graph.support[i]) key = std::min(key, order[std::size_t(p)]);
      acts.push_back({key, i});
    }
    std::sort(acts.begin(), acts.end(), [](const Act& a, const Act& b) {
      return a.key != b.key ? a.key < b.key : a.idx < b.idx;
    });
    for (std::size_t i = 0; i + 1 < acts.size(); ++i) {
      const auto& a = res.graph.placements[acts[i].idx];
      const auto& b = res.graph.placements[acts[i + 1].idx];
      counts[canonical_cooccurrence(a.part_type, b.part_type, b.row - a.row,
                                    b.col - a.col)] += 1;
      total += 1;
    }
  }
  std::vector<Cooccurrence> result;
  for (const auto& [co, n] : counts) {
    if (total > 0 && double(n) / double(total) >= min_rel_freq) result.push_back(co);
  }
  return result;
}

PathfinderModel learn_pathfinder_model(
    const std::vector<std::vector<std::pair<int, int>>>& contours, int rows,
    int cols, const std::vector<PartShape>& catalog, double min_rel_freq,
    double termination_penalty, const SparsifyParams& sparsify_params) {
  PathfinderModel model;
  model.catalog = catalog;
  model.rows = rows;
  model.cols = cols;
  model.termination_penalty = termination_penalty;
  model.cooccurrences =
      extract_cooccurrences(contours, rows, cols, catalog, min_rel_freq, sparsify_params);
  model.finalize();
  return model;
}

PathfinderDecoding prune_and_infer(const BinaryImage& image,
                                   const PathfinderModel& model,
                                   const PathfinderInferParams& params) {
  SparsifyResult sres = sparsify(image, model.catalog, params.sparsify);

  PathfinderDecoding dec;
  std::vector<std::vector<std::int32_t>> supports;
  for (std::size_t i = 0; i < sres.graph.placements.size(); ++i) {
    const auto& pl = sres.graph.placements[i];
    if (sres.assignment[std::size_t(pl.var.value)]) {
      dec.parts.push_back(pl);
      supports.push_back(sres.graph.support[i]);
    }
  }

  FactorGraph g;
  const int rows = image.rows, cols = image.cols;
  const int num_pixels = rows * cols;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      g.add_variable(VarKind::pixel, "p(" + std::to_string(r) + "," + std::to_string(c) + ")");
    }
  }
  for (auto& pl : dec.parts) {
    pl.var = g.add_variable(VarKind::part,
                            "x[" + std::to_string(pl.part_type) + "]@(" +
                                std::to_string(pl.row) + "," + std::to_string(pl.col) + ")");
  }

  struct Att {
    int u, v;
    int side_u, side_v;
    VariableId var;
  };
  std::vector<Att> atts;
  const int n = int(dec.parts.size());
  const int reach = model.max_displacement();
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      int dr = dec.parts[std::size_t(v)].row - dec.parts[std::size_t(u)].row;
      int dc = dec.parts[std::size_t(v)].col - dec.parts[std::size_t(u)].col;
      if (std::abs(dr) > reach || std::abs(dc) > reach) continue;
      auto co = canonical_cooccurrence(dec.parts[std::size_t(u)].part_type,
                                       dec.parts[std::size_t(v)].part_type, dr, dc);
      if (!model.has_cooccurrence(co)) continue;
      Att att;
      att.u = u;
      att.v = v;
      att.side_u = model.side(dec.parts[std::size_t(u)].part_type, dr, dc);
      att.side_v = model.side(dec.parts[std::size_t(v)].part_type, -dr, -dc);
      att.var = g.add_variable(
          VarKind::attention, "a{" + std::to_string(dec.parts[std::size_t(u)].var.value) +
                                  "," + std::to_string(dec.parts[std::size_t(v)].var.value) + "}");
      atts.push_back(att);
    }
  }

  std::vector<std::vector<VariableId>> parents(static_cast<std::size_t>(num_pixels));
  for (std::size_t i = 0; i < dec.parts.size(); ++i) {
    for (auto p : supports[i]) parents[std::size_t(p)].push_back(dec.parts[i].var);
  }
  for (int p = 0; p < num_pixels; ++p) {
    if (parents[std::size_t(p)].empty()) {
      g.add_factor(UnaryFactor{VariableId{p}, 0.0, params.sparsify.log_pi10});
    } else {
      g.add_factor(OrFactorSpec{VariableId{p}, parents[std::size_t(p)],
                                params.sparsify.log_pi01, params.sparsify.log_pi10});
    }
  }
  for (const auto& pl : dec.parts) {
    g.add_factor(UnaryFactor{pl.var, 0.0, params.sparsify.part_prior});
  }

  const double pen = model.termination_penalty;
  for (int u = 0; u < n; ++u) {
    std::vector<VariableId> g1, g2;
    for (const auto& att : atts) {
      int side = att.u == u ? att.side_u : (att.v == u ? att.side_v : 0);
      if (side == 1) g1.push_back(att.var);
      if (side == 2) g2.push_back(att.var);
    }
    MamHofSpec hof;
    hof.part_var = dec.parts[std::size_t(u)].var;
    if (!g1.empty() && !g2.empty()) {
      hof.groups = {g1, g2};
      hof.patterns = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
      hof.potentials = {0.0, -pen, -pen, 0.0};
    } else if (!g1.empty() || !g2.empty()) {
      hof.groups = {g1.empty() ? g2 : g1};
      hof.patterns = {{0}, {1}};
      hof.potentials = {0.0, -pen};
    } else {
      continue;  // isolated placement, prior only
    }
    g.add_factor(std::move(hof));
  }

  Evidence evidence(g.num_variables(), 0.0);
  for (int p = 0; p < num_pixels; ++p) {
    evidence[std::size_t(p)] = image.bits[std::size_t(p)] ? params.sparsify.pixel_clamp
                                                          : -params.sparsify.pixel_clamp;
  }
  BpResult run = run_mpbp(g, evidence, params.bp);
  Assignment x = decode(g, run.messages, evidence);

  dec.part_on.resize(dec.parts.size());
  for (std::size_t i = 0; i < dec.parts.size(); ++i) {
    dec.part_on[i] = x[std::size_t(dec.parts[i].var.value)];
  }
  for (const auto& att : atts) {
    AttentionEdge e;
    e.u = att.u;
    e.v = att.v;
    e.on = x[std::size_t(att.var.value)] && dec.part_on[std::size_t(att.u)] &&
           dec.part_on[std::size_t(att.v)];
    dec.edges.push_back(e);
  }
  return dec;
}

bool classify_same(const PathfinderDecoding& decoding, std::pair<int, int> marker_a,
                   std::pair<int, int> marker_b, double radius) {
  const std::size_t n = decoding.parts.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (const auto& e : decoding.edges) {
    if (!e.on) continue;
    parent[find(std::size_t(e.u))] = find(std::size_t(e.v));
  }

  auto map_marker = [&](std::pair<int, int> m) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    double best_d2 = radius * radius;
    for (std::size_t i = 0; i < n; ++i) {
      if (!decoding.part_on[i]) continue;
      double dr = double(m.first - decoding.parts[i].row);
      double dc = double(m.second - decoding.parts[i].col);
      double d2 = dr * dr + dc * dc;
      if (d2 < best_d2 || (d2 == best_d2 && !best)) {
        best = i;
        best_d2 = d2;
      }
    }
    return best;
  };

  auto a = map_marker(marker_a);
  auto b = map_marker(marker_b);
  if (!a || !b) return false;
  return find(*a) == find(*b);
}

PathfinderEval evaluate_pathfinder(const std::vector<PathfinderInstance>& instances,
                                   const PathfinderModel& model,
                                   const PathfinderInferParams& params, int threads) {
  PathfinderEval eval;
  eval.n = int(instances.size());
  eval.decisions.assign(instances.size(), 0);
  parallel_for(instances.size(), threads, [&](std::size_t i) {
    PathfinderDecoding dec = prune_and_infer(instances[i].image, model, params);
    eval.decisions[i] = classify_same(dec, instances[i].marker_a, instances[i].marker_b,
                                      params.marker_radius)
                            ? 1
                            : 0;
  });
  for (std::size_t i = 0; i < instances.size(); ++i) {
    int actual = instances[i].same ? 1 : 0;
    int predicted = eval.decisions[i];
    eval.confusion[actual][predicted] += 1;
    if (actual == predicted) eval.correct += 1;
  }
  eval.accuracy = instances.empty() ? 0.0 : double(eval.correct) / double(eval.n);
  return eval;
}

}  // namespace mam
