#include "mam/cabc.hpp"

#include "mam/util.hpp"

namespace mam {

std::vector<BinaryImage> render_training_letters(int per_template, int size,
                                                 int thickness, double distortion,
                                                 double pixel_noise,
                                                 std::uint64_t seed) {
  if (per_template < 1) throw ShapeError("render_training_letters: per_template >= 1");
  const auto& templates = letter_templates();
  std::vector<BinaryImage> out;
  for (int rep = 0; rep < per_template; ++rep) {
    for (std::size_t t = 0; t < templates.size(); ++t) {
      Rng rng(derive_seed(seed, std::uint64_t(rep) * templates.size() + t));
      out.push_back(render_letter(templates[t], size, thickness, distortion,
                                  pixel_noise, rng));
    }
  }
  return out;
}

std::vector<ElasticGraph> learn_cabc_graphs(const std::vector<BinaryImage>& letters,
                                            const CabcLearnParams& params) {
  const PartShape shape = disk_part_shape(params.part_radius);
  std::vector<ElasticGraph> graphs;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    SparsifyParams sp = params.sparsify;
    sp.seed = derive_seed(params.sparsify.seed, i);
    ElasticGraph g = extract_elastic_graph(letters[i], shape, sp, params.alg1, params.eta);
    g.normalize_anchor(0, 0);
    graphs.push_back(std::move(g));
  }
  return graphs;
}

CabcEvalParams cabc_desk_eval_params() {
  CabcEvalParams p;
  p.search.eta_search = 4;
  p.search.anchor_stride = 3;
  p.search.top_per_anchor = 2;
  p.search.top_overall = 8;
  p.refine.eta_refine = 5;
  p.refine.bp.max_iters = 60;
  p.refine.bp.tol = 1e-4;
  return p;
}

CabcEval evaluate_cabc(const std::vector<CabcInstance>& instances,
                       const std::vector<ElasticGraph>& graphs,
                       const CabcEvalParams& params) {
  CabcEval eval;
  eval.n = int(instances.size());
  eval.decisions.resize(instances.size(), 0);
  parallel_for(instances.size(), params.threads, [&](std::size_t i) {
    const CabcInstance& inst = instances[i];
    bool same = classify_cabc_same(inst.image, inst.marker_a, inst.marker_b, graphs,
                                   params.search, params.refine, 1);
    eval.decisions[i] = same ? 1 : 0;
  });
  for (std::size_t i = 0; i < instances.size(); ++i) {
    bool actual = instances[i].same;
    bool predicted = eval.decisions[i] != 0;
    eval.confusion[actual ? 1 : 0][predicted ? 1 : 0] += 1;
    if (actual == predicted) eval.correct += 1;
  }
  eval.accuracy = instances.empty() ? 0.0 : double(eval.correct) / double(eval.n);
  return eval;
}

}  // namespace mam
