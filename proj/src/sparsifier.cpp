#include "mam/sparsifier.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mam/logdomain.hpp"
#include "mam/util.hpp"

namespace mam {

using nlohmann::json;

std::string catalog_to_json_string(const std::vector<PartShape>& catalog) {
  json parts = json::array();
  for (const auto& shape : catalog) {
    json offs = json::array();
    for (auto [dr, dc] : shape.offsets) offs.push_back(json::array({dr, dc}));
    parts.push_back({{"part_type", shape.part_type}, {"offsets", std::move(offs)}});
  }
  json doc{{"format_version", 1}, {"parts", std::move(parts)}};
  return doc.dump(2) + "\n";
}

std::vector<PartShape> catalog_from_json_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("parts") || !doc["parts"].is_array()) {
    throw ParseError("catalog: missing parts array");
  }
  std::vector<PartShape> catalog;
  for (const auto& p : doc["parts"]) {
    PartShape shape;
    shape.part_type = p.at("part_type").get<int>();
    for (const auto& off : p.at("offsets")) {
      if (!off.is_array() || off.size() != 2) throw ParseError("catalog: offset must be [dr, dc]");
      shape.offsets.emplace_back(off[0].get<int>(), off[1].get<int>());
    }
    catalog.push_back(std::move(shape));
  }
  return catalog;
}

void save_catalog(const std::string& path, const std::vector<PartShape>& catalog) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << catalog_to_json_string(catalog);
}

std::vector<PartShape> load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return catalog_from_json_string(buf.str());
}

namespace {

std::vector<std::int32_t> clipped_support(const PartShape& shape, int row, int col,
                                          int rows, int cols) {
  std::vector<std::int32_t> pixels;
  for (auto [dr, dc] : shape.offsets) {
    int r = row + dr, c = col + dc;
    if (r >= 0 && r < rows && c >= 0 && c < cols) pixels.push_back(r * cols + c);
  }
  return pixels;
}

const PartShape& shape_for(const std::vector<PartShape>& catalog, int part_type) {
  for (const auto& s : catalog) {
    if (s.part_type == part_type) return s;
  }
  throw ShapeError("unknown part_type " + std::to_string(part_type));
}

}  // namespace

std::vector<Placement> enumerate_placements(int rows, int cols,
                                            const std::vector<PartShape>& catalog,
                                            int stride) {
  if (stride < 1) throw ShapeError("stride must be positive");
  if (rows < 1 || cols < 1) throw ShapeError("image dimensions must be positive");
  if (catalog.empty()) throw ShapeError("empty part catalog");
  std::vector<Placement> placements;
  for (const auto& shape : catalog) {
    for (int r = 0; r < rows; r += stride) {
      for (int c = 0; c < cols; c += stride) {
        if (clipped_support(shape, r, c, rows, cols).empty()) continue;
        placements.push_back({shape.part_type, r, c, VariableId{}});
      }
    }
  }
  return placements;
}

SparsifierGraph build_placement_graph(int rows, int cols,
                                      const std::vector<PartShape>& catalog,
                                      std::vector<Placement> placements,
                                      double log_pi01, double log_pi10,
                                      double part_prior) {
  SparsifierGraph sg;
  sg.rows = rows;
  sg.cols = cols;
  const int num_pixels = rows * cols;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      sg.graph.add_variable(VarKind::pixel,
                            "p(" + std::to_string(r) + "," + std::to_string(c) + ")");
    }
  }
  std::vector<std::vector<VariableId>> parents(num_pixels);
  for (auto& pl : placements) {
    pl.var = sg.graph.add_variable(
        VarKind::part, "x[" + std::to_string(pl.part_type) + "]@(" +
                           std::to_string(pl.row) + "," + std::to_string(pl.col) + ")");
    auto pix = clipped_support(shape_for(catalog, pl.part_type), pl.row, pl.col, rows, cols);
    if (pix.empty()) throw ShapeError("placement with empty support");
    for (auto p : pix) parents[p].push_back(pl.var);
    sg.support.push_back(std::move(pix));
  }
  for (int p = 0; p < num_pixels; ++p) {
    VariableId pixel{p};
    if (parents[p].empty()) {
      sg.graph.add_factor(UnaryFactor{pixel, 0.0, log_pi10});
    } else {
      sg.graph.add_factor(OrFactorSpec{pixel, parents[p], log_pi01, log_pi10});
    }
  }
  for (const auto& pl : placements) {
    sg.graph.add_factor(UnaryFactor{pl.var, 0.0, part_prior});
  }
  sg.placements = std::move(placements);
  return sg;
}

SparsifierGraph build_sparsifier(int rows, int cols,
                                 const std::vector<PartShape>& catalog, int stride,
                                 double log_pi01, double log_pi10,
                                 double part_prior) {
  return build_placement_graph(rows, cols, catalog,
                               enumerate_placements(rows, cols, catalog, stride),
                               log_pi01, log_pi10, part_prior);
}

SparsifyResult sparsify(const BinaryImage& image, const std::vector<PartShape>& catalog,
                        const SparsifyParams& params) {
  auto placements = enumerate_placements(image.rows, image.cols, catalog, params.stride);
  if (params.prune) {
    // A part pays -part_prior to switch on and can at best explain away the
    // spontaneous-activation cost of the on pixels it covers, so anything
    // with on_cover * (-log_pi10) <= -part_prior can never improve the score.
    std::vector<Placement> kept;
    for (const auto& pl : placements) {
      auto pix = clipped_support(shape_for(catalog, pl.part_type), pl.row, pl.col,
                                 image.rows, image.cols);
      int on_cover = 0;
      for (auto p : pix) on_cover += image.bits[p];
      bool keep;
      if (on_cover == 0) {
        keep = params.part_prior > 0.0;
      } else if (is_neg_inf(params.log_pi10)) {
        keep = true;
      } else {
        keep = double(on_cover) * (-params.log_pi10) > -params.part_prior;
      }
      if (keep) kept.push_back(pl);
    }
    placements = std::move(kept);
  }

  SparsifyResult result;
  result.graph = build_placement_graph(image.rows, image.cols, catalog,
                                       std::move(placements), params.log_pi01,
                                       params.log_pi10, params.part_prior);
  const FactorGraph& g = result.graph.graph;
  const int num_pixels = image.rows * image.cols;

  Evidence evidence(g.num_variables(), 0.0);
  for (int p = 0; p < num_pixels; ++p) {
    evidence[p] = image.bits[p] ? params.pixel_clamp : -params.pixel_clamp;
  }

  auto force_pixels = [&](Assignment& x) {
    for (int p = 0; p < num_pixels; ++p) x[p] = image.bits[p];
  };

  // All-parts-off baseline, always a candidate.
  Assignment best(g.num_variables(), 0);
  force_pixels(best);
  double best_score = map_score(g, best);
  int best_restart = -1;
  bool best_converged = true;

  for (int r = 0; r < params.restarts; ++r) {
    BpResult run;
    if (r == 0) {
      run = run_mpbp(g, evidence, params.bp);
    } else {
      MessageState init = noisy_messages(g, derive_seed(params.seed, std::uint64_t(r)),
                                         params.noise);
      run = run_mpbp(g, evidence, params.bp, &init);
    }
    Assignment x = decode(g, run.messages, evidence);
    force_pixels(x);
    double score = map_score(g, x);
    if (score > best_score) {
      best_score = score;
      best = std::move(x);
      best_restart = r;
      best_converged = run.converged;
    }
  }

  result.assignment = std::move(best);
  result.score = best_score;
  result.best_restart = best_restart;
  result.converged = best_converged;
  for (const auto& pl : result.graph.placements) {
    if (result.assignment[std::size_t(pl.var.value)]) result.activations.push_back(pl);
  }
  return result;
}

}  // namespace mam
