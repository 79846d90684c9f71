#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mam/image.hpp"
#include "mam/sparsifier.hpp"

namespace mam {

// Elastic constraint between two vertices: their actual relative displacement
// may differ from the reference displacement by at most gamma in L-inf norm.
struct ElasticEdge {
  int u = 0;
  int v = 0;  // u < v
  int gamma = 1;

  bool operator==(const ElasticEdge&) const = default;
};

struct ElasticGraph {
  std::vector<std::pair<int, int>> vertices;  // reference locations (r, c)
  std::vector<ElasticEdge> edges;             // sorted by (u, v)
  int eta = 1;                                // per-vertex slack, window [0, eta)
  PartShape part_shape;                       // shared by all vertices

  std::pair<int, int> anchor() const;  // (min r, min c)
  // Translates reference locations so anchor() becomes (r, c).
  void normalize_anchor(int r = 0, int c = 0);
  ElasticGraph translated(int dr, int dc) const;

  bool operator==(const ElasticGraph&) const = default;
};

struct Alg1Params {
  double perturb_factor = 7.0;
  double tolerance = 2.0;
  double max_length = 200.0;
};

// One rounding step of the refinement pass; `eta_after` is the running
// rounding-error accumulator after committing this edge.
struct RefineStep {
  int u = 0;
  int v = 0;
  double ideal = 1.0;  // max(1, d / perturb_factor)
  int gamma = 1;
  double eta_after = 0.0;
};

struct EdgeBuildTrace {
  std::vector<std::pair<int, int>> dfs_order;  // edges in depth-first order
  std::vector<RefineStep> refine;
};

// Greedy elastic-constraint construction: candidate pairs closer than
// max_length sorted by distance ascending (ties by (u, v)); an edge is added
// with gamma = ceil(i), i = max(1, d/p), iff the current shortest-path length
// under weights gamma exceeds i * tolerance; a depth-first edge ordering from
// the lowest-index vertex (restarted per component) then drives a rounding
// refinement whose accumulator keeps |rounded - ideal| drift within [-.5, .5].
std::vector<ElasticEdge> get_edges(const std::vector<std::pair<int, int>>& locations,
                                   const Alg1Params& params,
                                   EdgeBuildTrace* trace = nullptr);

bool refine_accumulator_property(const std::vector<RefineStep>& trace);

PartShape disk_part_shape(int radius, int part_type = 0);

SparsifyParams cabc_sparsify_defaults();

// Vertices from sparsifying the letter with a single-shape catalog, edges
// from get_edges. Throws ShapeError when the sparsification is empty.
ElasticGraph extract_elastic_graph(const BinaryImage& letter,
                                   const PartShape& part_shape,
                                   const SparsifyParams& sparsify_params,
                                   const Alg1Params& alg1_params, int eta);

std::string elastic_graph_to_json_string(const ElasticGraph& g);
ElasticGraph elastic_graph_from_json_string(const std::string& text);
void save_elastic_graph(const std::string& path, const ElasticGraph& g);
ElasticGraph load_elastic_graph(const std::string& path);

}  // namespace mam
