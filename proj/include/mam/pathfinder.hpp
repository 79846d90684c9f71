#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mam/engine.hpp"
#include "mam/image.hpp"
#include "mam/sparsifier.hpp"

namespace mam {

// Unordered pair of part appearances at a relative displacement, stored so
// that (t1,t2,dr,dc) and (t2,t1,-dr,-dc) are one record.
struct Cooccurrence {
  int t1 = 0;
  int t2 = 0;
  int dr = 0;
  int dc = 0;

  auto operator<=>(const Cooccurrence&) const = default;
};

Cooccurrence canonical_cooccurrence(int t1, int t2, int dr, int dc);

// Fixed catalog of 16 directed dash shapes (radius-4 bars at 22.5 degree
// steps); the contour generator stamps exactly these shapes.
std::vector<PartShape> pathfinder_catalog();

// Anchor-to-anchor displacement when a contour continues from a dash of the
// given type (dash extent plus gap).
std::pair<int, int> dash_advance(int part_type);

struct PathfinderModel {
  std::vector<PartShape> catalog;
  std::vector<Cooccurrence> cooccurrences;  // canonical, sorted, deduped
  int rows = 64;
  int cols = 64;
  double termination_penalty = 1.6;

  // Derived: per part type, the principal axis of incident co-occurrence
  // displacements; splits each part's attention variables into two sides.
  std::vector<std::pair<double, double>> side_axis;

  void finalize();  // recomputes side_axis from cooccurrences
  int side(int part_type, int dr, int dc) const;  // 1 or 2
  bool has_cooccurrence(const Cooccurrence& c) const;
  int max_displacement() const;  // max Chebyshev displacement magnitude
};

std::string pathfinder_model_to_json_string(const PathfinderModel& model);
PathfinderModel pathfinder_model_from_json_string(const std::string& text);
void save_pathfinder_model(const std::string& path, const PathfinderModel& model);
PathfinderModel load_pathfinder_model(const std::string& path);

struct PathfinderGenParams {
  int rows = 64;
  int cols = 64;
  int n_targets = 2;
  int target_len_min = 6;  // dashes per target contour
  int target_len_max = 6;
  int n_distractors = 5;
  int distractor_len_min = 2;
  int distractor_len_max = 2;
  int separation = 7;  // min Chebyshev distance between distinct contours
  int margin = 2;
  int max_retries = 400;
  std::uint64_t seed = 0;
};

struct PathfinderInstance {
  BinaryImage image;
  std::pair<int, int> marker_a{0, 0};
  std::pair<int, int> marker_b{0, 0};
  bool same = true;
  // Stamped pixels in draw order, one list per contour; targets first.
  std::vector<std::vector<std::pair<int, int>>> contours;
};

// Draws non-crossing dashed contours by a bounded-curvature walk over the
// dash catalog, placing markers on target endpoints. Deterministic in seed.
PathfinderInstance generate_pathfinder(const PathfinderGenParams& params);

std::string pathfinder_instance_to_json_string(const PathfinderInstance& inst);
// Rebuilds the instance from the sidecar plus the raster written separately.
PathfinderInstance pathfinder_instance_from_json_string(const std::string& text,
                                                        const BinaryImage& image);

BinaryImage rasterize_contour(const std::vector<std::pair<int, int>>& pixels,
                              int rows, int cols);

SparsifyParams pathfinder_sparsify_defaults();

// Sparsifies each training contour, orders the activations along the stamped
// pixel order, and counts displacement records between consecutive
// activations; records below min_rel_freq relative frequency are dropped.
std::vector<Cooccurrence> extract_cooccurrences(
    const std::vector<std::vector<std::pair<int, int>>>& contours, int rows,
    int cols, const std::vector<PartShape>& catalog, double min_rel_freq,
    const SparsifyParams& sparsify_params);

PathfinderModel learn_pathfinder_model(
    const std::vector<std::vector<std::pair<int, int>>>& contours, int rows,
    int cols, const std::vector<PartShape>& catalog, double min_rel_freq,
    double termination_penalty, const SparsifyParams& sparsify_params);

struct PathfinderInferParams {
  SparsifyParams sparsify = pathfinder_sparsify_defaults();
  BpConfig bp;
  double marker_radius = 10.0;
};

struct AttentionEdge {
  int u = 0;  // indices into PathfinderDecoding::parts
  int v = 0;
  bool on = false;
};

struct PathfinderDecoding {
  std::vector<Placement> parts;  // activated placements kept after pruning
  std::vector<std::uint8_t> part_on;  // joint-model decode per placement
  std::vector<AttentionEdge> edges;   // instantiated attention variables
};

// Sparsifies the image, keeps only activated placements, instantiates the
// contour-continuation factors over them, and decodes the joint model with
// pixels clamped to the image.
PathfinderDecoding prune_and_infer(const BinaryImage& image,
                                   const PathfinderModel& model,
                                   const PathfinderInferParams& params);

// Maps each marker to the nearest decoded-ON placement anchor within radius
// (ties to the lowest index); same iff both map into one connected component
// of the ON attention edges.
bool classify_same(const PathfinderDecoding& decoding,
                   std::pair<int, int> marker_a, std::pair<int, int> marker_b,
                   double radius);

struct PathfinderEval {
  int n = 0;
  int correct = 0;
  double accuracy = 0.0;
  // confusion[actual][predicted], 0 = different, 1 = same
  int confusion[2][2] = {{0, 0}, {0, 0}};
  std::vector<std::uint8_t> decisions;  // predicted same flag per instance
};

PathfinderEval evaluate_pathfinder(const std::vector<PathfinderInstance>& instances,
                                   const PathfinderModel& model,
                                   const PathfinderInferParams& params,
                                   int threads = 1);

}  // namespace mam
