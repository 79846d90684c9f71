#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mam/engine.hpp"
#include "mam/graph.hpp"
#include "mam/image.hpp"

namespace mam {

// A part type as a set of pixel offsets relative to the placement anchor.
struct PartShape {
  int part_type = 0;
  std::vector<std::pair<int, int>> offsets;  // (dr, dc)

  bool operator==(const PartShape&) const = default;
};

std::string catalog_to_json_string(const std::vector<PartShape>& catalog);
std::vector<PartShape> catalog_from_json_string(const std::string& text);
void save_catalog(const std::string& path, const std::vector<PartShape>& catalog);
std::vector<PartShape> load_catalog(const std::string& path);

// One candidate part instance: shape `part_type` anchored at (row, col).
struct Placement {
  int part_type = 0;
  int row = 0;
  int col = 0;
  VariableId var{};  // filled once the graph is built

  bool operator==(const Placement&) const = default;
};

// Pixel layer plus one part variable per placement.  Pixels come first
// (row-major), each explained by an or-factor over the placements whose
// clipped support covers it.  Pixels nothing covers get a unary that prices
// spontaneous activations the same way.
struct SparsifierGraph {
  FactorGraph graph;
  int rows = 0;
  int cols = 0;
  std::vector<Placement> placements;
  std::vector<std::vector<std::int32_t>> support;  // per placement, pixel indices

  VariableId pixel_var(int r, int c) const { return VariableId{r * cols + c}; }
};

// Anchors on the stride grid; shapes are clipped at the image boundary and
// placements with empty support are dropped.
std::vector<Placement> enumerate_placements(int rows, int cols,
                                            const std::vector<PartShape>& catalog,
                                            int stride);

SparsifierGraph build_placement_graph(int rows, int cols,
                                      const std::vector<PartShape>& catalog,
                                      std::vector<Placement> placements,
                                      double log_pi01, double log_pi10,
                                      double part_prior);

SparsifierGraph build_sparsifier(int rows, int cols,
                                 const std::vector<PartShape>& catalog, int stride,
                                 double log_pi01, double log_pi10,
                                 double part_prior);

struct SparsifyParams {
  double log_pi01 = -2.0;
  double log_pi10 = -4.0;
  double part_prior = -1.0;
  int stride = 1;
  int restarts = 10;
  double noise = 1e-3;
  double pixel_clamp = 1e4;
  std::uint64_t seed = 0;
  bool prune = true;  // drop placements that can never pay for their prior
  BpConfig bp;
};

struct SparsifyResult {
  SparsifierGraph graph;
  Assignment assignment;  // over graph, pixels forced to the image
  std::vector<Placement> activations;
  double score = 0.0;
  int best_restart = -1;  // -1 means the all-off baseline won
  bool converged = false;
};

// Max-product inference over the placement graph with pixels clamped to the
// image.  Runs one zero-init pass plus noisy restarts, always keeps the
// all-parts-off assignment as a candidate, and returns the best candidate
// scored with pixels forced to the image and no evidence term.
SparsifyResult sparsify(const BinaryImage& image,
                        const std::vector<PartShape>& catalog,
                        const SparsifyParams& params);

}  // namespace mam
