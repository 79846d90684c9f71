#include "mam/part_learning.hpp"

#include <algorithm>

#include "mam/logdomain.hpp"
#include "mam/util.hpp"

namespace mam {

namespace {

// Table over (x, w, a): finite exactly when a == (x && w).
TableFactor and_gate(VariableId x, VariableId w, VariableId a) {
  std::vector<double> pots(8, kNegInf);
  for (int xs = 0; xs < 2; ++xs) {
    for (int ws = 0; ws < 2; ++ws) {
      int as = xs & ws;
      pots[std::size_t(xs * 4 + ws * 2 + as)] = 0.0;
    }
  }
  return TableFactor{{x, w, a}, std::move(pots)};
}

}  // namespace

LearnPartsResult learn_parts(const std::vector<BinaryImage>& images,
                             const LearnPartsParams& params) {
  if (images.empty()) throw ShapeError("learn_parts: no training images");
  if (params.num_parts < 1) throw ShapeError("learn_parts: num_parts must be positive");
  if (params.patch_rows < 1 || params.patch_cols < 1) {
    throw ShapeError("learn_parts: patch dimensions must be positive");
  }
  if (params.batch_size < 1) throw ShapeError("learn_parts: batch_size must be positive");

  const int patch = params.patch_rows * params.patch_cols;
  const int num_weights = params.num_parts * patch;

  LearnPartsResult result;
  result.weight_beliefs.assign(std::size_t(num_weights), 0.0);

  bool any_on = false;
  for (const auto& img : images) any_on = any_on || img.count_on() > 0;
  if (!any_on) {
    result.all_images_empty = true;
    result.warning = "all training images are empty; learned shapes are empty";
    for (int t = 0; t < params.num_parts; ++t) {
      result.catalog.push_back({t, {}});
    }
    return result;
  }

  const std::size_t num_batches =
      (images.size() + std::size_t(params.batch_size) - 1) / std::size_t(params.batch_size);
  for (std::size_t batch = 0; batch < num_batches; ++batch) {
    const std::size_t img_begin = batch * std::size_t(params.batch_size);
    const std::size_t img_end = std::min(images.size(), img_begin + std::size_t(params.batch_size));

    FactorGraph g;
    std::vector<VariableId> weight_vars;
    for (int t = 0; t < params.num_parts; ++t) {
      for (int dr = 0; dr < params.patch_rows; ++dr) {
        for (int dc = 0; dc < params.patch_cols; ++dc) {
          weight_vars.push_back(g.add_variable(
              VarKind::weight, "w[" + std::to_string(t) + "](" + std::to_string(dr) +
                                   "," + std::to_string(dc) + ")"));
        }
      }
    }

    std::vector<double> evidence;
    std::vector<std::pair<VariableId, double>> pixel_clamps;
    std::vector<VariableId> part_vars;
    std::vector<UnaryFactor> pixel_unaries;
    std::vector<OrFactorSpec> or_specs;
    std::vector<TableFactor> gates;

    for (std::size_t i = img_begin; i < img_end; ++i) {
      const BinaryImage& img = images[i];
      std::vector<VariableId> pixels;
      pixels.reserve(std::size_t(img.rows) * std::size_t(img.cols));
      std::string tag = "i" + std::to_string(i);
      for (int r = 0; r < img.rows; ++r) {
        for (int c = 0; c < img.cols; ++c) {
          VariableId v = g.add_variable(VarKind::pixel, tag + ":p(" + std::to_string(r) +
                                                            "," + std::to_string(c) + ")");
          pixels.push_back(v);
          pixel_clamps.emplace_back(v, img.at(r, c) ? params.pixel_clamp
                                                    : -params.pixel_clamp);
        }
      }
      std::vector<std::vector<VariableId>> parents(pixels.size());
      const int anchor_rows = img.rows - params.patch_rows + 1;
      const int anchor_cols = img.cols - params.patch_cols + 1;
      for (int t = 0; t < params.num_parts; ++t) {
        for (int ar = 0; ar < anchor_rows; ar += params.stride) {
          for (int ac = 0; ac < anchor_cols; ac += params.stride) {
            VariableId x = g.add_variable(
                VarKind::part, tag + ":x[" + std::to_string(t) + "]@(" +
                                   std::to_string(ar) + "," + std::to_string(ac) + ")");
            part_vars.push_back(x);
            for (int dr = 0; dr < params.patch_rows; ++dr) {
              for (int dc = 0; dc < params.patch_cols; ++dc) {
                VariableId a = g.add_variable(
                    VarKind::part, tag + ":a[" + std::to_string(t) + "]@(" +
                                       std::to_string(ar) + "," + std::to_string(ac) +
                                       ")+(" + std::to_string(dr) + "," +
                                       std::to_string(dc) + ")");
                VariableId w = weight_vars[std::size_t(t * patch + dr * params.patch_cols + dc)];
                gates.push_back(and_gate(x, w, a));
                parents[std::size_t((ar + dr) * img.cols + (ac + dc))].push_back(a);
              }
            }
          }
        }
      }
      for (std::size_t p = 0; p < pixels.size(); ++p) {
        if (parents[p].empty()) {
          pixel_unaries.push_back({pixels[p], 0.0, params.log_pi10});
        } else {
          or_specs.push_back({pixels[p], parents[p], params.log_pi01, params.log_pi10});
        }
      }
    }

    for (auto& gate : gates) g.add_factor(std::move(gate));
    for (auto& spec : or_specs) g.add_factor(std::move(spec));
    for (auto& u : pixel_unaries) g.add_factor(u);
    for (auto x : part_vars) g.add_factor(UnaryFactor{x, 0.0, params.part_prior});
    for (auto w : weight_vars) g.add_factor(UnaryFactor{w, 0.0, params.weight_prior});

    evidence.assign(std::size_t(g.num_variables()), 0.0);
    for (auto [v, e] : pixel_clamps) evidence[std::size_t(v.value)] = e;

    BpResult run;
    if (params.noise > 0.0) {
      MessageState init =
          noisy_messages(g, derive_seed(params.seed, batch + 1), params.noise);
      run = run_mpbp(g, evidence, params.bp, &init);
    } else {
      run = run_mpbp(g, evidence, params.bp);
    }
    std::vector<double> b = beliefs(g, run.messages, evidence);
    for (int wi = 0; wi < num_weights; ++wi) {
      double bw = b[std::size_t(weight_vars[std::size_t(wi)].value)];
      if (std::isfinite(bw)) result.weight_beliefs[std::size_t(wi)] += bw;
    }
  }

  for (int t = 0; t < params.num_parts; ++t) {
    PartShape shape;
    shape.part_type = t;
    for (int dr = 0; dr < params.patch_rows; ++dr) {
      for (int dc = 0; dc < params.patch_cols; ++dc) {
        if (result.weight_beliefs[std::size_t(t * patch + dr * params.patch_cols + dc)] > 0.0) {
          shape.offsets.emplace_back(dr, dc);
        }
      }
    }
    result.catalog.push_back(std::move(shape));
  }
  bool all_empty_shapes = std::all_of(result.catalog.begin(), result.catalog.end(),
                                      [](const PartShape& s) { return s.offsets.empty(); });
  if (all_empty_shapes) {
    result.warning = "no weight settled on; learned shapes are empty";
  }
  return result;
}

}  // namespace mam
