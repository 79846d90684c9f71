#pragma once

#include <cstdint>
#include <vector>

#include "mam/elastic.hpp"
#include "mam/letters.hpp"
#include "mam/object_mam.hpp"

namespace mam {

struct CabcLearnParams {
  int part_radius = 2;
  int eta = 5;  // slack stored on the learned graphs
  SparsifyParams sparsify = cabc_sparsify_defaults();
  Alg1Params alg1;
};

// One reference letter per template, rendered with mild distortion; seeds are
// derived per letter so the set is reproducible from one root seed.
std::vector<BinaryImage> render_training_letters(int per_template, int size,
                                                 int thickness, double distortion,
                                                 double pixel_noise,
                                                 std::uint64_t seed);

// Elastic graph per training image: disk-part sparsification for the skeleton
// vertices, then edge construction; anchors normalized to (0, 0).
std::vector<ElasticGraph> learn_cabc_graphs(const std::vector<BinaryImage>& letters,
                                            const CabcLearnParams& params);

struct CabcEvalParams {
  CandidateSearchParams search;
  RefineParams refine;
  int threads = 1;
};

// Small-canvas operating point: shrunk search/refine windows and a capped
// candidate list so a full evaluation stays cheap.
CabcEvalParams cabc_desk_eval_params();

struct CabcEval {
  int n = 0;
  int correct = 0;
  double accuracy = 0.0;
  // [actual same][predicted same]
  int confusion[2][2] = {{0, 0}, {0, 0}};
  std::vector<std::uint8_t> decisions;  // predicted same per instance
};

CabcEval evaluate_cabc(const std::vector<CabcInstance>& instances,
                       const std::vector<ElasticGraph>& graphs,
                       const CabcEvalParams& params);

}  // namespace mam
