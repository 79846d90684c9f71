#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mam/engine.hpp"
#include "mam/image.hpp"
#include "mam/sparsifier.hpp"

namespace mam {

struct LearnPartsParams {
  int num_parts = 4;
  int patch_rows = 3;
  int patch_cols = 3;
  // Leak cost is kept well above the miss cost while learning so weights hug
  // the data instead of smearing into blobs.
  double log_pi01 = -6.0;
  double log_pi10 = -4.0;
  double part_prior = -1.0;
  double weight_prior = -0.1;
  int stride = 1;
  int batch_size = 10;
  double pixel_clamp = 1e4;
  double noise = 0.5;  // symmetry-breaking message init
  std::uint64_t seed = 0;
  // Weight sharing makes the graph far loopier than a single sparsifier pass;
  // heavier damping and a longer budget keep the updates from oscillating.
  BpConfig bp = [] {
    BpConfig c;
    c.damping = 0.8;
    c.max_iters = 400;
    return c;
  }();
};

struct LearnPartsResult {
  std::vector<PartShape> catalog;  // one shape per part type, possibly empty
  std::vector<double> weight_beliefs;  // summed over batches, layout (t, dr, dc)
  bool all_images_empty = false;
  std::string warning;
};

// Learns binary part shapes by treating each weight pixel as a shared
// variable: a placement explains an image pixel through an and-gate of the
// placement state and the corresponding weight.  Images are processed in
// batches; weight beliefs accumulate across batches and an offset joins a
// shape when its summed belief is positive.
LearnPartsResult learn_parts(const std::vector<BinaryImage>& images,
                             const LearnPartsParams& params);

}  // namespace mam
