#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mam/elastic.hpp"
#include "mam/engine.hpp"
#include "mam/graph.hpp"
#include "mam/image.hpp"

namespace mam {

// Per-pixel real evidence m_ij feeding the matching cascade.
struct PixelEvidence {
  int rows = 0;
  int cols = 0;
  std::vector<double> m;  // row-major
};

PixelEvidence image_evidence(const BinaryImage& img, double on_value = 1.0,
                             double off_value = -0.89);

// Sum of pixel evidence under the part anchored at (r, c); ShapeError when any
// covered pixel is out of bounds.
double part_sum(const PixelEvidence& ev, const PartShape& shape, int r, int c);

// part_sum for every anchor; out-of-bounds anchors get the -inf sentinel.
std::vector<double> part_sum_table(const PixelEvidence& ev, const PartShape& shape);

// (1/|V|^0.76) * sum over vertices of the best part_sum across the one-sided
// slack window [0, eta) x [0, eta); ShapeError when some vertex has no
// in-bounds location.
double score_elastic_graph(const ElasticGraph& g, const PixelEvidence& ev, int eta);

struct VertexLocations {
  std::vector<std::pair<int, int>> locs;  // allowed locations, sorted
  std::vector<VariableId> location_vars;  // parallel to locs
  std::vector<VariableId> topdown_vars;   // parallel to locs
};

struct ObjectMamLayout {
  std::vector<VertexLocations> vertices;
  PartShape part_shape;
};

// MAM fragment for one elastic graph: a part variable per allowed location, a
// lateral attention variable per location pair satisfying an edge's perturb
// constraint, a top variable, and top-down attention variables. Location
// factors force "on at this location iff one compatible neighbor location per
// edge and top-down selected"; the top factor forces all-or-none across
// vertices. Locations that cannot satisfy some edge are pruned exactly (they
// can never be on in a finite configuration).
struct ObjectMam {
  FactorGraph graph;
  VariableId top;
  ObjectMamLayout layout;
};

ObjectMam build_object_mam(const ElasticGraph& g, int eta, int rows, int cols);

// Single top variable over all letters; top factor patterns are the all-zero
// vector (potential -1000) plus one block indicator per letter (potential 0),
// encoding "exactly one letter at some location".
struct MergedMam {
  FactorGraph graph;
  VariableId top;
  std::vector<ObjectMamLayout> letters;
};

MergedMam merge_mams(const std::vector<ElasticGraph>& graphs, int eta, int rows,
                     int cols);

// Evidence vector for an object MAM: each location variable gets the summed
// pixel evidence under its part; everything else 0.
Evidence location_evidence(const ObjectMam& om, const PixelEvidence& ev);

struct CandidateMatch {
  int graph_index = 0;
  int row = 0;  // anchor point
  int col = 0;
  double score = 0.0;
};

// Paper-scale constants; the desk pipeline overrides them proportionally.
struct CandidateSearchParams {
  int eta_search = 15;
  int anchor_stride = 13;
  int top_per_anchor = 3;
  int top_overall = 140;
};

// Scores every (graph, anchor) on the stride grid, keeps top_per_anchor per
// anchor and top_overall across anchors, sorted by score descending with ties
// by (graph index, anchor) ascending. Graphs must be anchor-normalized to
// (0, 0).
std::vector<CandidateMatch> candidate_search(const std::vector<ElasticGraph>& graphs,
                                             const PixelEvidence& ev,
                                             const CandidateSearchParams& params,
                                             int threads = 1);

struct RefineParams {
  int eta_refine = 25;
  double overlap_penalty = 0.33;
  BpConfig bp;
};

struct RefinedCandidate {
  CandidateMatch match;
  bool feasible = false;
  std::vector<std::pair<int, int>> decoded;  // one location per vertex
  std::vector<std::int32_t> covered;         // union of covered pixels, sorted
  std::vector<std::int32_t> cover_count;     // parallel: parts covering the pixel
};

struct PairResult {
  int first = -1;  // indices into refined; -1 when fewer than two feasible
  int second = -1;
  double score = 0.0;
  long long pairs_considered = 0;
  std::vector<RefinedCandidate> refined;
};

// MPBP refinement per candidate (part-variable evidence, per-vertex belief
// argmax decode), then exhaustive pair scoring: sum over covered pixels of
// evidence minus (coverage count - 1) * overlap_penalty.
PairResult refine_and_pair(const std::vector<CandidateMatch>& candidates,
                           const std::vector<ElasticGraph>& graphs,
                           const PixelEvidence& ev, const RefineParams& params,
                           int threads = 1);

struct CabcDecision {
  bool same = false;
  PairResult pair;  // refined candidates; pair.first/second are the two letters
};

// Full cascade; each marker maps to the chosen letter with the nearest covered
// pixel (ties to the higher-scoring letter), same iff both map to one letter.
CabcDecision classify_cabc_decision(const BinaryImage& image,
                                    std::pair<int, int> marker_a,
                                    std::pair<int, int> marker_b,
                                    const std::vector<ElasticGraph>& graphs,
                                    const CandidateSearchParams& search_params,
                                    const RefineParams& refine_params,
                                    int threads = 1);

bool classify_cabc_same(const BinaryImage& image, std::pair<int, int> marker_a,
                        std::pair<int, int> marker_b,
                        const std::vector<ElasticGraph>& graphs,
                        const CandidateSearchParams& search_params,
                        const RefineParams& refine_params, int threads = 1);

}  // namespace mam
