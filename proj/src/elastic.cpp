#include "mam/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "mam/util.hpp"

namespace mam {

using nlohmann::json;

std::pair<int, int> ElasticGraph::anchor() const {
  if (vertices.empty()) throw ShapeError("elastic graph has no vertices");
  int r = vertices[0].first, c = vertices[0].second;
  for (auto [vr, vc] : vertices) {
    r = std::min(r, vr);
    c = std::min(c, vc);
  }
  return {r, c};
}

void ElasticGraph::normalize_anchor(int r, int c) {
  auto [ar, ac] = anchor();
  for (auto& [vr, vc] : vertices) {
    vr += r - ar;
    vc += c - ac;
  }
}

ElasticGraph ElasticGraph::translated(int dr, int dc) const {
  ElasticGraph g = *this;
  for (auto& [vr, vc] : g.vertices) {
    vr += dr;
    vc += dc;
  }
  return g;
}

namespace {

double pair_distance(const std::vector<std::pair<int, int>>& loc, int u, int v) {
  double dr = double(loc[std::size_t(v)].first - loc[std::size_t(u)].first);
  double dc = double(loc[std::size_t(v)].second - loc[std::size_t(u)].second);
  return std::sqrt(dr * dr + dc * dc);
}

// Shortest u-to-v path length under the current integer edge weights,
// infinity when disconnected.
double shortest_path(int n, const std::map<std::pair<int, int>, int>& gamma, int u, int v) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(std::size_t(n), kInf);
  dist[std::size_t(u)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  queue.push({0.0, u});
  while (!queue.empty()) {
    auto [d, a] = queue.top();
    queue.pop();
    if (d > dist[std::size_t(a)]) continue;
    if (a == v) return d;
    for (const auto& [edge, g] : gamma) {
      int b = -1;
      if (edge.first == a) b = edge.second;
      if (edge.second == a) b = edge.first;
      if (b < 0) continue;
      double nd = d + double(g);
      if (nd < dist[std::size_t(b)]) {
        dist[std::size_t(b)] = nd;
        queue.push({nd, b});
      }
    }
  }
  return dist[std::size_t(v)];
}

}  // namespace

std::vector<ElasticEdge> get_edges(const std::vector<std::pair<int, int>>& locations,
                                   const Alg1Params& params, EdgeBuildTrace* trace) {
  if (locations.empty()) throw ShapeError("get_edges: no vertices");
  if (params.perturb_factor <= 0.0 || params.tolerance <= 0.0 || params.max_length <= 0.0) {
    throw ShapeError("get_edges: parameters must be positive");
  }
  const int n = int(locations.size());

  struct Candidate {
    double d;
    int u, v;
  };
  std::vector<Candidate> candidates;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      double d = pair_distance(locations, u, v);
      if (d < params.max_length) candidates.push_back({d, u, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.d != b.d) return a.d < b.d;
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });

  std::map<std::pair<int, int>, int> gamma;
  std::map<std::pair<int, int>, double> dist;
  for (const auto& c : candidates) {
    double ideal = std::max(1.0, c.d / params.perturb_factor);
    double path = shortest_path(n, gamma, c.u, c.v);
    if (path > ideal * params.tolerance) {
      gamma[{c.u, c.v}] = int(std::ceil(ideal));
    }
    dist[{c.u, c.v}] = c.d;
  }

  // Depth-first edge ordering; restarted from the lowest unvisited vertex so
  // every component is refined.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [edge, g] : gamma) {
    adj[std::size_t(edge.first)].push_back(edge.second);
    adj[std::size_t(edge.second)].push_back(edge.first);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<std::pair<int, int>> order;
  std::map<std::pair<int, int>, bool> seen;
  std::function<void(int)> dfs = [&](int u) {
    for (int v : adj[std::size_t(u)]) {
      auto key = std::minmax(u, v);
      std::pair<int, int> edge{key.first, key.second};
      if (seen[edge]) continue;
      seen[edge] = true;
      order.push_back(edge);
      dfs(v);
    }
  };
  for (int u = 0; u < n; ++u) dfs(u);

  double eta = 0.0;
  std::vector<RefineStep> refine;
  for (auto edge : order) {
    double ideal = std::max(1.0, dist.at(edge) / params.perturb_factor);
    double up = std::ceil(ideal), down = std::floor(ideal);
    int g;
    if (std::abs(up - ideal + eta) < std::abs(down - ideal + eta)) {
      g = int(up);
      eta = up - ideal + eta;
    } else {
      g = int(down);
      eta = down - ideal + eta;
    }
    gamma[edge] = g;
    refine.push_back({edge.first, edge.second, ideal, g, eta});
  }

  if (trace) {
    trace->dfs_order = order;
    trace->refine = refine;
  }
  std::vector<ElasticEdge> edges;
  for (const auto& [edge, g] : gamma) edges.push_back({edge.first, edge.second, g});
  return edges;
}

bool refine_accumulator_property(const std::vector<RefineStep>& trace) {
  constexpr double kTol = 1e-9;
  for (const auto& step : trace) {
    if (std::abs(step.eta_after) > 0.5 + kTol) return false;
  }
  return true;
}

PartShape disk_part_shape(int radius, int part_type) {
  if (radius < 0) throw ShapeError("disk radius must be non-negative");
  PartShape shape;
  shape.part_type = part_type;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      if (dr * dr + dc * dc <= radius * radius) shape.offsets.emplace_back(dr, dc);
    }
  }
  return shape;
}

SparsifyParams cabc_sparsify_defaults() {
  SparsifyParams sp;
  sp.log_pi01 = std::log(0.45);
  sp.log_pi10 = std::log(0.05);
  sp.part_prior = -20.0;
  sp.stride = 1;
  sp.restarts = 10;
  return sp;
}

ElasticGraph extract_elastic_graph(const BinaryImage& letter,
                                   const PartShape& part_shape,
                                   const SparsifyParams& sparsify_params,
                                   const Alg1Params& alg1_params, int eta) {
  if (eta < 1) throw ShapeError("extract_elastic_graph: eta must be >= 1");
  SparsifyResult res = sparsify(letter, {part_shape}, sparsify_params);
  if (res.activations.empty()) {
    throw ShapeError("extract_elastic_graph: empty sparsification");
  }
  ElasticGraph g;
  g.eta = eta;
  g.part_shape = part_shape;
  for (const auto& pl : res.activations) g.vertices.emplace_back(pl.row, pl.col);
  g.edges = get_edges(g.vertices, alg1_params);
  return g;
}

std::string elastic_graph_to_json_string(const ElasticGraph& g) {
  json vertices = json::array();
  for (auto [r, c] : g.vertices) vertices.push_back(json::array({r, c}));
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back(json::array({e.u, e.v, e.gamma}));
  json offs = json::array();
  for (auto [dr, dc] : g.part_shape.offsets) offs.push_back(json::array({dr, dc}));
  json doc{{"format_version", 1},
           {"vertices", std::move(vertices)},
           {"edges", std::move(edges)},
           {"eta", g.eta},
           {"part_shape", {{"part_type", g.part_shape.part_type}, {"offsets", std::move(offs)}}}};
  return doc.dump(2) + "\n";
}

ElasticGraph elastic_graph_from_json_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("elastic graph: ") + e.what());
  }
  ElasticGraph g;
  try {
    for (const auto& v : doc.at("vertices")) {
      g.vertices.emplace_back(v.at(0).get<int>(), v.at(1).get<int>());
    }
    for (const auto& e : doc.at("edges")) {
      ElasticEdge edge{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()};
      if (edge.u >= edge.v || edge.u < 0 || std::size_t(edge.v) >= g.vertices.size() ||
          edge.gamma < 1) {
        throw ParseError("elastic graph: bad edge record");
      }
      g.edges.push_back(edge);
    }
    g.eta = doc.at("eta").get<int>();
    if (g.eta < 1) throw ParseError("elastic graph: eta must be >= 1");
    const auto& shape = doc.at("part_shape");
    g.part_shape.part_type = shape.at("part_type").get<int>();
    for (const auto& off : shape.at("offsets")) {
      g.part_shape.offsets.emplace_back(off.at(0).get<int>(), off.at(1).get<int>());
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("elastic graph: ") + e.what());
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const ElasticEdge& a, const ElasticEdge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  return g;
}

void save_elastic_graph(const std::string& path, const ElasticGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << elastic_graph_to_json_string(g);
}

ElasticGraph load_elastic_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return elastic_graph_from_json_string(buf.str());
}

}  // namespace mam
