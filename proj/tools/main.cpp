// Command-line surface: generic solve/verify, sparsification, part learning,
// and the two perceptual-grouping pipelines. Every run emits a manifest that
// reproduces it bit-identically; timing goes to a side file so reruns (with
// any --threads) match byte for byte.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mam/cabc.hpp"
#include "mam/engine.hpp"
#include "mam/gene_network.hpp"
#include "mam/graph_json.hpp"
#include "mam/manifest.hpp"
#include "mam/mam_hof.hpp"
#include "mam/object_mam.hpp"
#include "mam/or_factor.hpp"
#include "mam/oracle.hpp"
#include "mam/part_learning.hpp"
#include "mam/pathfinder.hpp"
#include "mam/sparsifier.hpp"
#include "mam/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool json_out = false;
  int threads = 1;
};

std::string pad4(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", i);
  return buf;
}

std::string num(double v) { return json(v).dump(); }

// Grayscale P2 with a deterministic byte layout.
void write_pgm(const std::string& path, const std::vector<std::uint8_t>& gray,
               int rows, int cols) {
  std::string out = "P2\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) out += ' ';
      out += std::to_string(gray[std::size_t(r) * std::size_t(cols) + std::size_t(c)]);
    }
    out += '\n';
  }
  mam::write_text_file(path, out);
}

void draw_line(std::vector<std::uint8_t>& gray, int rows, int cols, int r0, int c0,
               int r1, int c1, std::uint8_t value) {
  int steps = std::max(std::abs(r1 - r0), std::abs(c1 - c0));
  for (int k = 0; k <= steps; ++k) {
    double f = steps ? double(k) / double(steps) : 0.0;
    int r = int(std::lround(r0 + f * (r1 - r0)));
    int c = int(std::lround(c0 + f * (c1 - c0)));
    if (r >= 0 && r < rows && c >= 0 && c < cols)
      gray[std::size_t(r) * std::size_t(cols) + std::size_t(c)] = value;
  }
}

std::vector<std::string> sorted_files(const std::string& dir, const std::string& prefix,
                                      const std::string& ext) {
  if (!fs::is_directory(dir)) throw mam::ParseError("not a directory: " + dir);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && name.size() > ext.size() &&
        name.compare(name.size() - ext.size(), ext.size(), ext) == 0)
      names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

// Aggregated digest over a file list: stable under any directory iteration
// order, sensitive to names and contents.
std::string digest_files(const std::string& dir, const std::vector<std::string>& names) {
  std::string acc;
  for (const auto& name : names)
    acc += name + ":" + mam::hash_file((fs::path(dir) / name).string()) + "\n";
  return mam::hash_bytes(acc);
}

void emit_run_files(const std::string& manifest_path, const std::string& timing_path,
                    const mam::RunManifest& m, long long wall_ms, int threads) {
  mam::write_text_file(manifest_path, mam::manifest_json(m).dump(2) + "\n");
  mam::write_text_file(timing_path, mam::timing_json(wall_ms, threads).dump(2) + "\n");
}

void emit_summary(const GlobalOpts& g, const json& machine, const std::string& human) {
  if (g.json_out)
    std::cout << machine.dump(2) << "\n";
  else
    std::cout << human << "\n";
}

long long elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

// --------------------------------------------------------------------------
// solve / verify

struct BpFlags {
  double damping = 0.5;
  int max_iters = 200;
  double tol = 1e-6;
  bool paper_verbatim = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--damping", damping, "message damping factor")->capture_default_str();
    cmd->add_option("--max-iters", max_iters, "iteration cap")->capture_default_str();
    cmd->add_option("--tol", tol, "convergence threshold")->capture_default_str();
    cmd->add_flag("--paper-verbatim", paper_verbatim,
                  "use the published update equations verbatim");
  }
  mam::BpConfig config(int threads) const {
    mam::BpConfig bp;
    bp.damping = damping;
    bp.max_iters = max_iters;
    bp.tol = tol;
    bp.threads = threads;
    bp.hof.paper_verbatim = paper_verbatim;
    return bp;
  }
  void argv(std::vector<std::string>& v) const {
    v.insert(v.end(), {"--damping", num(damping), "--max-iters", std::to_string(max_iters),
                       "--tol", num(tol)});
    if (paper_verbatim) v.push_back("--paper-verbatim");
  }
  json params() const {
    return {{"damping", damping},
            {"max_iters", max_iters},
            {"tol", tol},
            {"paper_verbatim", paper_verbatim}};
  }
};

struct SolveOpts {
  std::string graph_file;
  std::string evidence_file;
  std::string out_file;
  BpFlags bp;
};

int run_solve(const SolveOpts& o, const GlobalOpts& g) {
  mam::FactorGraph graph = mam::load_graph(o.graph_file);
  mam::Evidence ev(graph.num_variables(), 0.0);
  if (!o.evidence_file.empty())
    ev = mam::evidence_from_json(mam::load_json_file(o.evidence_file), graph.num_variables());

  mam::BpResult res = mam::run_mpbp(graph, ev, o.bp.config(g.threads));
  mam::Assignment x = mam::decode(graph, res.messages, ev);
  double score = mam::map_score(graph, x, ev);

  mam::RunManifest m;
  m.command = "solve";
  m.argv = {"solve", "--graph", o.graph_file};
  if (!o.evidence_file.empty()) m.argv.insert(m.argv.end(), {"--evidence", o.evidence_file});
  o.bp.argv(m.argv);
  if (!o.out_file.empty()) m.argv.insert(m.argv.end(), {"--out", o.out_file});
  m.parameters = o.bp.params();
  m.seed = g.seed;
  m.input_hashes["graph"] = mam::hash_file(o.graph_file);
  if (!o.evidence_file.empty()) m.input_hashes["evidence"] = mam::hash_file(o.evidence_file);

  json out;
  out["format_version"] = 1;
  out["assignment"] = x;
  out["score"] = mam::log_value_to_json(score);
  out["converged"] = res.converged;
  out["iters_run"] = res.iters_run;
  out["final_delta"] = res.final_delta;
  out["num_variables"] = graph.num_variables();
  out["manifest"] = mam::manifest_json(m);
  std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (!o.out_file.empty()) mam::write_text_file(o.out_file, text);
  return 0;
}

struct CsiQuery {
  mam::VariableId x{0}, y{0};
  std::vector<std::pair<mam::VariableId, std::uint8_t>> cond;
};

CsiQuery parse_csi(const std::string& s) {
  // "<x>,<y>[,<cond>=<state>...]"
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    tokens.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  const auto bad = [&] { throw mam::ParseError("bad --csi spec (want x,y[,cond=state...]): " + s); };
  if (tokens.size() < 2) bad();
  CsiQuery q;
  int x = 0, y = 0;
  char tail = 0;
  if (std::sscanf(tokens[0].c_str(), "%d%c", &x, &tail) != 1) bad();
  if (std::sscanf(tokens[1].c_str(), "%d%c", &y, &tail) != 1) bad();
  q.x = mam::VariableId(x);
  q.y = mam::VariableId(y);
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    int c = 0, st = 0;
    if (std::sscanf(tokens[i].c_str(), "%d=%d%c", &c, &st, &tail) != 2 || (st != 0 && st != 1))
      bad();
    q.cond.emplace_back(mam::VariableId(c), std::uint8_t(st));
  }
  return q;
}

struct VerifyOpts {
  std::string graph_file;
  std::string evidence_file;
  std::uint64_t budget = mam::kDefaultOracleBudget;
  std::vector<std::string> csi;
  BpFlags bp;
};

int run_verify(const VerifyOpts& o, const GlobalOpts& g) {
  mam::FactorGraph graph = mam::load_graph(o.graph_file);
  mam::Evidence ev(graph.num_variables(), 0.0);
  if (!o.evidence_file.empty())
    ev = mam::evidence_from_json(mam::load_json_file(o.evidence_file), graph.num_variables());

  mam::MapResult oracle = mam::brute_force_map(graph, ev, o.budget, g.threads);
  mam::BpResult res = mam::run_mpbp(graph, ev, o.bp.config(g.threads));
  mam::Assignment x = mam::decode(graph, res.messages, ev);
  double decode_score = mam::map_score(graph, x, ev);

  // Efficient factor updates against enumerated ones, from the converged
  // variable-to-factor messages.
  mam::EdgeIndex index(graph);
  double max_dev = 0.0;
  json per_factor = json::array();
  for (std::int32_t f = 0; f < std::int32_t(graph.num_factors()); ++f) {
    const std::size_t begin = index.factor_begin(f), end = index.factor_end(f);
    std::vector<double> incoming(res.messages.var_to_factor.begin() + long(begin),
                                 res.messages.var_to_factor.begin() + long(end));
    auto exact = mam::exact_factor_messages(graph.factor(f), incoming);
    double dev = 0.0;
    const char* type = "table";
    if (const auto* hof = std::get_if<mam::MamHofSpec>(&graph.factor(f))) {
      type = "mam_hof";
      auto eff = mam::mam_hof_messages(
          *hof, incoming[0], std::span<const double>(incoming).subspan(1),
          o.bp.config(g.threads).hof);
      dev = std::max(dev, mam::message_delta(
                              eff.to_part, mam::normalize_message(exact[0][0], exact[0][1])));
      for (std::size_t i = 0; i < eff.to_attention.size(); ++i)
        dev = std::max(dev, mam::message_delta(eff.to_attention[i],
                                               mam::normalize_message(exact[i + 1][0],
                                                                      exact[i + 1][1])));
    } else if (const auto* orf = std::get_if<mam::OrFactorSpec>(&graph.factor(f))) {
      type = "or";
      auto eff = mam::or_factor_messages(*orf, incoming[0],
                                         std::span<const double>(incoming).subspan(1));
      dev = std::max(dev, mam::message_delta(
                              eff.to_pixel, mam::normalize_message(exact[0][0], exact[0][1])));
      for (std::size_t i = 0; i < eff.to_parents.size(); ++i)
        dev = std::max(dev, mam::message_delta(eff.to_parents[i],
                                               mam::normalize_message(exact[i + 1][0],
                                                                      exact[i + 1][1])));
    } else if (std::holds_alternative<mam::UnaryFactor>(graph.factor(f))) {
      type = "unary";  // engine enumerates these directly; deviation 0 by route
    }
    max_dev = std::max(max_dev, dev);
    per_factor.push_back({{"factor", f}, {"type", type}, {"deviation", dev}});
  }

  json csi_report = json::array();
  for (const auto& spec : o.csi) {
    CsiQuery q = parse_csi(spec);
    double mi = mam::conditional_mutual_information(graph, ev, q.x, q.y, q.cond, o.budget,
                                                    g.threads);
    json cond = json::array();
    for (const auto& [var, st] : q.cond) cond.push_back({{"var", var.value}, {"state", int(st)}});
    csi_report.push_back({{"x", q.x.value}, {"y", q.y.value}, {"cond", cond}, {"mi", mi}});
  }

  mam::RunManifest m;
  m.command = "verify";
  m.argv = {"verify", "--graph", o.graph_file};
  if (!o.evidence_file.empty()) m.argv.insert(m.argv.end(), {"--evidence", o.evidence_file});
  m.argv.insert(m.argv.end(), {"--budget", std::to_string(o.budget)});
  for (const auto& spec : o.csi) m.argv.insert(m.argv.end(), {"--csi", spec});
  o.bp.argv(m.argv);
  m.parameters = o.bp.params();
  m.parameters["budget"] = o.budget;
  m.seed = g.seed;
  m.input_hashes["graph"] = mam::hash_file(o.graph_file);
  if (!o.evidence_file.empty()) m.input_hashes["evidence"] = mam::hash_file(o.evidence_file);

  json out;
  out["format_version"] = 1;
  out["oracle_score"] = mam::log_value_to_json(oracle.score);
  out["num_optima"] = oracle.num_optima;
  out["decode_score"] = mam::log_value_to_json(decode_score);
  out["gap"] = mam::log_value_to_json(oracle.score - decode_score);
  out["converged"] = res.converged;
  out["message_max_deviation"] = max_dev;
  out["per_factor"] = per_factor;
  if (!csi_report.empty()) out["csi"] = csi_report;
  out["manifest"] = mam::manifest_json(m);
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --------------------------------------------------------------------------
// sparsify / learn-parts

struct SparsifyOpts {
  std::string image_file;
  std::string catalog_file;
  std::string out_file;
  std::string overlay_file;
  mam::SparsifyParams params;
};

int run_sparsify(const SparsifyOpts& o, const GlobalOpts& g) {
  mam::BinaryImage image = mam::read_pbm(o.image_file);
  std::vector<mam::PartShape> catalog = mam::load_catalog(o.catalog_file);
  mam::SparsifyParams params = o.params;
  params.seed = g.seed;
  params.bp.threads = g.threads;
  mam::SparsifyResult res = mam::sparsify(image, catalog, params);

  mam::RunManifest m;
  m.command = "sparsify";
  m.argv = {"sparsify", "--image", o.image_file, "--catalog", o.catalog_file,
            "--pi01", num(params.log_pi01), "--pi10", num(params.log_pi10),
            "--prior", num(params.part_prior), "--stride", std::to_string(params.stride),
            "--restarts", std::to_string(params.restarts), "--noise", num(params.noise),
            "--seed", std::to_string(g.seed)};
  if (!params.prune) m.argv.push_back("--no-prune");
  if (!o.out_file.empty()) m.argv.insert(m.argv.end(), {"--out", o.out_file});
  if (!o.overlay_file.empty()) m.argv.insert(m.argv.end(), {"--overlay", o.overlay_file});
  m.parameters = {{"log_pi01", params.log_pi01},   {"log_pi10", params.log_pi10},
                  {"part_prior", params.part_prior}, {"stride", params.stride},
                  {"restarts", params.restarts},   {"noise", params.noise},
                  {"prune", params.prune}};
  m.seed = g.seed;
  m.input_hashes["image"] = mam::hash_file(o.image_file);
  m.input_hashes["catalog"] = mam::hash_file(o.catalog_file);

  json acts = json::array();
  for (const auto& p : res.activations)
    acts.push_back({{"part_type", p.part_type}, {"row", p.row}, {"col", p.col}});
  json out;
  out["format_version"] = 1;
  out["activations"] = acts;
  out["score"] = mam::log_value_to_json(res.score);
  out["best_restart"] = res.best_restart;
  out["converged"] = res.converged;
  out["num_placements"] = res.graph.placements.size();
  out["manifest"] = mam::manifest_json(m);
  std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (!o.out_file.empty()) mam::write_text_file(o.out_file, text);

  if (!o.overlay_file.empty()) {
    std::vector<std::uint8_t> gray(std::size_t(image.rows) * std::size_t(image.cols), 0);
    for (int r = 0; r < image.rows; ++r)
      for (int c = 0; c < image.cols; ++c)
        if (image.at(r, c)) gray[std::size_t(r) * std::size_t(image.cols) + c] = 64;
    for (std::size_t i = 0; i < res.graph.placements.size(); ++i) {
      if (std::find(res.activations.begin(), res.activations.end(),
                    res.graph.placements[i]) == res.activations.end())
        continue;
      for (std::int32_t px : res.graph.support[i]) gray[std::size_t(px)] = 255;
    }
    write_pgm(o.overlay_file, gray, image.rows, image.cols);
  }
  return 0;
}

struct LearnPartsOpts {
  std::vector<std::string> image_files;
  std::string out_file;
  mam::LearnPartsParams params;
};

int run_learn_parts(const LearnPartsOpts& o, const GlobalOpts& g) {
  std::vector<mam::BinaryImage> images;
  for (const auto& f : o.image_files) images.push_back(mam::read_pbm(f));
  mam::LearnPartsParams params = o.params;
  params.seed = g.seed;
  params.bp.threads = g.threads;
  mam::LearnPartsResult res = mam::learn_parts(images, params);
  mam::save_catalog(o.out_file, res.catalog);

  mam::RunManifest m;
  m.command = "learn-parts";
  m.argv = {"learn-parts"};
  for (const auto& f : o.image_files) m.argv.insert(m.argv.end(), {"--image", f});
  m.argv.insert(m.argv.end(),
                {"--num-parts", std::to_string(params.num_parts), "--patch-rows",
                 std::to_string(params.patch_rows), "--patch-cols",
                 std::to_string(params.patch_cols), "--batch-size",
                 std::to_string(params.batch_size), "--seed", std::to_string(g.seed),
                 "--out", o.out_file});
  m.parameters = {{"num_parts", params.num_parts},
                  {"patch_rows", params.patch_rows},
                  {"patch_cols", params.patch_cols},
                  {"batch_size", params.batch_size},
                  {"log_pi01", params.log_pi01},
                  {"log_pi10", params.log_pi10},
                  {"part_prior", params.part_prior},
                  {"weight_prior", params.weight_prior}};
  m.seed = g.seed;
  for (std::size_t i = 0; i < o.image_files.size(); ++i)
    m.input_hashes["image" + std::to_string(i)] = mam::hash_file(o.image_files[i]);

  json out;
  out["format_version"] = 1;
  out["catalog"] = json::parse(mam::catalog_to_json_string(res.catalog));
  out["all_images_empty"] = res.all_images_empty;
  out["warning"] = res.warning;
  out["manifest"] = mam::manifest_json(m);
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --------------------------------------------------------------------------
// pathfinder pipeline

struct PfGenOpts {
  std::string out_dir;
  int n = 10;
  mam::PathfinderGenParams params;
};

int run_pathfinder_gen(const PfGenOpts& o, const GlobalOpts& g) {
  auto start = std::chrono::steady_clock::now();
  fs::create_directories(o.out_dir);
  std::vector<std::string> pbm(std::size_t(o.n)), sidecar(std::size_t(o.n));
  mam::parallel_for(std::size_t(o.n), g.threads, [&](std::size_t i) {
    mam::PathfinderGenParams p = o.params;
    p.seed = mam::derive_seed(g.seed, i);
    mam::PathfinderInstance inst = mam::generate_pathfinder(p);
    pbm[i] = mam::pbm_to_string(inst.image);
    sidecar[i] = mam::pathfinder_instance_to_json_string(inst);
  });
  for (int i = 0; i < o.n; ++i) {
    mam::write_text_file((fs::path(o.out_dir) / ("instance_" + pad4(i) + ".pbm")).string(),
                         pbm[std::size_t(i)]);
    mam::write_text_file((fs::path(o.out_dir) / ("instance_" + pad4(i) + ".json")).string(),
                         sidecar[std::size_t(i)]);
  }

  mam::RunManifest m;
  m.command = "pathfinder gen";
  m.argv = {"pathfinder", "gen", "--out", o.out_dir, "--n", std::to_string(o.n),
            "--rows", std::to_string(o.params.rows), "--cols", std::to_string(o.params.cols),
            "--targets", std::to_string(o.params.n_targets),
            "--target-len-min", std::to_string(o.params.target_len_min),
            "--target-len-max", std::to_string(o.params.target_len_max),
            "--distractors", std::to_string(o.params.n_distractors),
            "--distractor-len-min", std::to_string(o.params.distractor_len_min),
            "--distractor-len-max", std::to_string(o.params.distractor_len_max),
            "--separation", std::to_string(o.params.separation),
            "--max-retries", std::to_string(o.params.max_retries),
            "--seed", std::to_string(g.seed)};
  m.parameters = {{"n", o.n},
                  {"rows", o.params.rows},
                  {"cols", o.params.cols},
                  {"n_targets", o.params.n_targets},
                  {"target_len_min", o.params.target_len_min},
                  {"target_len_max", o.params.target_len_max},
                  {"n_distractors", o.params.n_distractors},
                  {"distractor_len_min", o.params.distractor_len_min},
                  {"distractor_len_max", o.params.distractor_len_max},
                  {"separation", o.params.separation},
                  {"max_retries", o.params.max_retries},
                  {"margin", o.params.margin}};
  m.seed = g.seed;
  emit_run_files((fs::path(o.out_dir) / "manifest.json").string(),
                 (fs::path(o.out_dir) / "timing.json").string(), m, elapsed_ms(start),
                 g.threads);
  emit_summary(g,
               json{{"status", "ok"}, {"n", o.n}, {"dir", o.out_dir},
                    {"manifest", mam::manifest_json(m)}},
               "wrote " + std::to_string(o.n) + " instances to " + o.out_dir);
  return 0;
}

std::vector<mam::PathfinderInstance> load_pathfinder_dataset(const std::string& dir,
                                                             std::string* digest) {
  auto names = sorted_files(dir, "instance_", ".json");
  if (names.empty()) throw mam::ParseError("no instances under " + dir);
  std::vector<std::string> all = names;
  std::vector<mam::PathfinderInstance> instances;
  for (const auto& name : names) {
    std::string stem = name.substr(0, name.size() - 5);
    std::string pbm_path = (fs::path(dir) / (stem + ".pbm")).string();
    mam::BinaryImage img = mam::read_pbm(pbm_path);
    std::string text = mam::read_text_file((fs::path(dir) / name).string());
    instances.push_back(mam::pathfinder_instance_from_json_string(text, img));
    all.push_back(stem + ".pbm");
  }
  if (digest) {
    std::sort(all.begin(), all.end());
    *digest = digest_files(dir, all);
  }
  return instances;
}

struct PfLearnOpts {
  std::string data_dir;
  std::string out_file;
  double min_rel_freq = 1e-3;
  double termination_penalty = 1.6;
};

int run_pathfinder_learn(const PfLearnOpts& o, const GlobalOpts& g) {
  auto start = std::chrono::steady_clock::now();
  std::string digest;
  auto instances = load_pathfinder_dataset(o.data_dir, &digest);
  std::vector<std::vector<std::pair<int, int>>> contours;
  for (const auto& inst : instances)
    for (const auto& contour : inst.contours) contours.push_back(contour);
  const int rows = instances[0].image.rows, cols = instances[0].image.cols;

  mam::SparsifyParams sp = mam::pathfinder_sparsify_defaults();
  sp.seed = g.seed;
  sp.bp.threads = g.threads;
  mam::PathfinderModel model = mam::learn_pathfinder_model(
      contours, rows, cols, mam::pathfinder_catalog(), o.min_rel_freq,
      o.termination_penalty, sp);
  mam::save_pathfinder_model(o.out_file, model);

  mam::RunManifest m;
  m.command = "pathfinder learn";
  m.argv = {"pathfinder", "learn", "--data", o.data_dir, "--out", o.out_file,
            "--min-rel-freq", num(o.min_rel_freq),
            "--termination-penalty", num(o.termination_penalty),
            "--seed", std::to_string(g.seed)};
  m.parameters = {{"min_rel_freq", o.min_rel_freq},
                  {"termination_penalty", o.termination_penalty},
                  {"num_contours", contours.size()}};
  m.seed = g.seed;
  m.input_hashes["data"] = digest;
  emit_run_files(o.out_file + ".manifest.json", o.out_file + ".timing.json", m,
                 elapsed_ms(start), g.threads);
  emit_summary(g,
               json{{"status", "ok"},
                    {"model", o.out_file},
                    {"cooccurrences", model.cooccurrences.size()},
                    {"manifest", mam::manifest_json(m)}},
               "learned " + std::to_string(model.cooccurrences.size()) +
                   " co-occurrences from " + std::to_string(contours.size()) +
                   " contours");
  return 0;
}

struct PfEvalOpts {
  std::string data_dir;
  std::string model_file;
  std::string out_file;
  std::string overlay_dir;
  double marker_radius = 10.0;
  BpFlags bp;
};

int run_pathfinder_eval(const PfEvalOpts& o, const GlobalOpts& g) {
  auto start = std::chrono::steady_clock::now();
  std::string digest;
  auto instances = load_pathfinder_dataset(o.data_dir, &digest);
  mam::PathfinderModel model = mam::load_pathfinder_model(o.model_file);

  mam::PathfinderInferParams ip;
  ip.bp = o.bp.config(1);
  ip.sparsify.seed = g.seed;
  ip.marker_radius = o.marker_radius;

  const bool overlays = !o.overlay_dir.empty();
  if (overlays) fs::create_directories(o.overlay_dir);
  std::vector<std::uint8_t> decisions(instances.size(), 0);
  std::vector<std::vector<std::uint8_t>> grays(overlays ? instances.size() : 0);
  mam::parallel_for(instances.size(), g.threads, [&](std::size_t i) {
    const auto& inst = instances[i];
    mam::PathfinderDecoding dec = mam::prune_and_infer(inst.image, model, ip);
    decisions[i] = mam::classify_same(dec, inst.marker_a, inst.marker_b, ip.marker_radius)
                       ? 1
                       : 0;
    if (!overlays) return;
    const int rows = inst.image.rows, cols = inst.image.cols;
    std::vector<std::uint8_t> gray(std::size_t(rows) * std::size_t(cols), 0);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (inst.image.at(r, c)) gray[std::size_t(r) * std::size_t(cols) + c] = 64;
    for (const auto& e : dec.edges) {
      if (!e.on) continue;
      const auto& pu = dec.parts[std::size_t(e.u)];
      const auto& pv = dec.parts[std::size_t(e.v)];
      draw_line(gray, rows, cols, pu.row, pu.col, pv.row, pv.col, 160);
    }
    for (std::size_t p = 0; p < dec.parts.size(); ++p) {
      if (!dec.part_on[p]) continue;
      if (dec.parts[p].row >= 0 && dec.parts[p].row < rows && dec.parts[p].col >= 0 &&
          dec.parts[p].col < cols)
        gray[std::size_t(dec.parts[p].row) * std::size_t(cols) + dec.parts[p].col] = 255;
    }
    grays[i] = std::move(gray);
  });

  mam::PathfinderEval eval;
  eval.n = int(instances.size());
  eval.decisions = decisions;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    bool actual = instances[i].same, predicted = decisions[i] != 0;
    eval.confusion[actual ? 1 : 0][predicted ? 1 : 0] += 1;
    if (actual == predicted) eval.correct += 1;
  }
  eval.accuracy = instances.empty() ? 0.0 : double(eval.correct) / double(eval.n);
  if (overlays)
    for (std::size_t i = 0; i < instances.size(); ++i)
      write_pgm((fs::path(o.overlay_dir) / ("instance_" + pad4(int(i)) + ".pgm")).string(),
                grays[i], instances[i].image.rows, instances[i].image.cols);

  mam::RunManifest m;
  m.command = "pathfinder eval";
  m.argv = {"pathfinder", "eval", "--data", o.data_dir, "--model", o.model_file,
            "--out", o.out_file, "--marker-radius", num(o.marker_radius)};
  if (overlays) m.argv.insert(m.argv.end(), {"--overlay-dir", o.overlay_dir});
  o.bp.argv(m.argv);
  m.argv.insert(m.argv.end(), {"--seed", std::to_string(g.seed)});
  m.parameters = o.bp.params();
  m.parameters["marker_radius"] = o.marker_radius;
  m.seed = g.seed;
  m.input_hashes["data"] = digest;
  m.input_hashes["model"] = mam::hash_file(o.model_file);

  json out;
  out["format_version"] = 1;
  out["n"] = eval.n;
  out["correct"] = eval.correct;
  out["accuracy"] = eval.accuracy;
  out["confusion"] = {{eval.confusion[0][0], eval.confusion[0][1]},
                      {eval.confusion[1][0], eval.confusion[1][1]}};
  out["decisions"] = eval.decisions;
  out["manifest"] = mam::manifest_json(m);
  mam::write_text_file(o.out_file, out.dump(2) + "\n");
  mam::write_text_file(o.out_file + ".timing.json",
                       mam::timing_json(elapsed_ms(start), g.threads).dump(2) + "\n");
  emit_summary(g, out, "accuracy " + num(eval.accuracy) + " on " +
                           std::to_string(eval.n) + " instances");
  return 0;
}

// --------------------------------------------------------------------------
// cabc pipeline

struct CabcGenOpts {
  std::string out_dir;
  int n = 10;
  mam::CabcGenParams params;
};

int run_cabc_gen(const CabcGenOpts& o, const GlobalOpts& g) {
  auto start = std::chrono::steady_clock::now();
  fs::create_directories(o.out_dir);
  std::vector<std::string> pbm(std::size_t(o.n)), sidecar(std::size_t(o.n));
  mam::parallel_for(std::size_t(o.n), g.threads, [&](std::size_t i) {
    mam::CabcGenParams p = o.params;
    p.seed = mam::derive_seed(g.seed, i);
    mam::CabcInstance inst = mam::generate_cabc(p);
    pbm[i] = mam::pbm_to_string(inst.image);
    sidecar[i] = mam::cabc_instance_to_json_string(inst);
  });
  for (int i = 0; i < o.n; ++i) {
    mam::write_text_file((fs::path(o.out_dir) / ("instance_" + pad4(i) + ".pbm")).string(),
                         pbm[std::size_t(i)]);
    mam::write_text_file((fs::path(o.out_dir) / ("instance_" + pad4(i) + ".json")).string(),
                         sidecar[std::size_t(i)]);
  }

  mam::RunManifest m;
  m.command = "cabc gen";
  m.argv = {"cabc", "gen", "--out", o.out_dir, "--n", std::to_string(o.n),
            "--rows", std::to_string(o.params.rows), "--cols", std::to_string(o.params.cols),
            "--letter-size", std::to_string(o.params.letter_size),
            "--thickness", std::to_string(o.params.thickness),
            "--distortion", num(o.params.distortion),
            "--pixel-noise", num(o.params.pixel_noise),
            "--separation", std::to_string(o.params.separation),
            "--seed", std::to_string(g.seed)};
  m.parameters = {{"n", o.n},
                  {"rows", o.params.rows},
                  {"cols", o.params.cols},
                  {"letter_size", o.params.letter_size},
                  {"thickness", o.params.thickness},
                  {"distortion", o.params.distortion},
                  {"pixel_noise", o.params.pixel_noise},
                  {"separation", o.params.separation}};
  m.seed = g.seed;
  emit_run_files((fs::path(o.out_dir) / "manifest.json").string(),
                 (fs::path(o.out_dir) / "timing.json").string(), m, elapsed_ms(start),
                 g.threads);
  emit_summary(g,
               json{{"status", "ok"}, {"n", o.n}, {"dir", o.out_dir},
                    {"manifest", mam::manifest_json(m)}},
               "wrote " + std::to_string(o.n) + " instances to " + o.out_dir);
  return 0;
}

struct CabcLearnOpts {
  std::string out_dir;
  int per_template = 1;
  int letter_size = 24;
  int thickness = 3;
  double distortion = 0.02;
  double pixel_noise = 0.0;
  mam::CabcLearnParams params;
};

int run_cabc_learn(const CabcLearnOpts& o, const GlobalOpts& g) {
  auto start = std::chrono::steady_clock::now();
  fs::create_directories(o.out_dir);
  auto letters = mam::render_training_letters(o.per_template, o.letter_size, o.thickness,
                                              o.distortion, o.pixel_noise, g.seed);
  mam::CabcLearnParams params = o.params;
  params.sparsify.seed = mam::derive_seed(g.seed, 0x1e77e125);
  params.sparsify.bp.threads = 1;
  auto graphs = mam::learn_cabc_graphs(letters, params);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    mam::write_text_file(
        (fs::path(o.out_dir) / ("letter_" + pad4(int(i)) + ".pbm")).string(),
        mam::pbm_to_string(letters[i]));
    mam::save_elastic_graph(
        (fs::path(o.out_dir) / ("graph_" + pad4(int(i)) + ".json")).string(), graphs[i]);
  }

  mam::RunManifest m;
  m.command = "cabc learn";
  m.argv = {"cabc", "learn", "--out", o.out_dir,
            "--per-template", std::to_string(o.per_template),
            "--letter-size", std::to_string(o.letter_size),
            "--thickness", std::to_string(o.thickness),
            "--distortion", num(o.distortion),
            "--pixel-noise", num(o.pixel_noise),
            "--part-radius", std::to_string(o.params.part_radius),
            "--eta", std::to_string(o.params.eta),
            "--seed", std::to_string(g.seed)};
  m.parameters = {{"per_template", o.per_template},
                  {"letter_size", o.letter_size},
                  {"thickness", o.thickness},
                  {"distortion", o.distortion},
                  {"pixel_noise", o.pixel_noise},
                  {"part_radius", o.params.part_radius},
                  {"eta", o.params.eta},
                  {"num_graphs", graphs.size()}};
  m.seed = g.seed;
  emit_run_files((fs::path(o.out_dir) / "manifest.json").string(),
                 (fs::path(o.out_dir) / "timing.json").string(), m, elapsed_ms(start),
                 g.threads);
  emit_summary(g,
               json{{"status", "ok"}, {"dir", o.out_dir}, {"graphs", graphs.size()},
                    {"manifest", mam::manifest_json(m)}},
               "learned " + std::to_string(graphs.size()) + " elastic graphs");
  return 0;
}

std::vector<mam::CabcInstance> load_cabc_dataset(const std::string& dir,
                                                 std::string* digest) {
  auto names = sorted_files(dir, "instance_", ".json");
  if (names.empty()) throw mam::ParseError("no instances under " + dir);
  std::vector<std::string> all = names;
  std::vector<mam::CabcInstance> instances;
  for (const auto& name : names) {
    std::string stem = name.substr(0, name.size() - 5);
    mam::BinaryImage img = mam::read_pbm((fs::path(dir) / (stem + ".pbm")).string());
    std::string text = mam::read_text_file((fs::path(dir) / name).string());
    instances.push_back(mam::cabc_instance_from_json_string(text, std::move(img)));
    all.push_back(stem + ".pbm");
  }
  if (digest) {
    std::sort(all.begin(), all.end());
    *digest = digest_files(dir, all);
  }
  return instances;
}

struct CabcEvalOpts {
  std::string data_dir;
  std::string models_dir;
  std::string out_file;
  std::string overlay_dir;
  mam::CabcEvalParams params = mam::cabc_desk_eval_params();
};

int run_cabc_eval(const CabcEvalOpts& o, const GlobalOpts& g) {
  auto start = std::chrono::steady_clock::now();
  std::string digest;
  auto instances = load_cabc_dataset(o.data_dir, &digest);
  auto graph_files = sorted_files(o.models_dir, "graph_", ".json");
  if (graph_files.empty()) throw mam::ParseError("no graph_*.json under " + o.models_dir);
  std::vector<mam::ElasticGraph> graphs;
  for (const auto& name : graph_files)
    graphs.push_back(mam::load_elastic_graph((fs::path(o.models_dir) / name).string()));

  const bool overlays = !o.overlay_dir.empty();
  if (overlays) fs::create_directories(o.overlay_dir);
  std::vector<std::uint8_t> decisions(instances.size(), 0);
  std::vector<std::vector<std::uint8_t>> grays(overlays ? instances.size() : 0);
  mam::parallel_for(instances.size(), g.threads, [&](std::size_t i) {
    const auto& inst = instances[i];
    mam::CabcDecision dec = mam::classify_cabc_decision(
        inst.image, inst.marker_a, inst.marker_b, graphs, o.params.search,
        o.params.refine, 1);
    decisions[i] = dec.same ? 1 : 0;
    if (!overlays) return;
    const int rows = inst.image.rows, cols = inst.image.cols;
    std::vector<std::uint8_t> gray(std::size_t(rows) * std::size_t(cols), 0);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (inst.image.at(r, c)) gray[std::size_t(r) * std::size_t(cols) + c] = 64;
    if (dec.pair.first >= 0) {
      for (std::int32_t px : dec.pair.refined[std::size_t(dec.pair.first)].covered)
        gray[std::size_t(px)] = 160;
      for (std::int32_t px : dec.pair.refined[std::size_t(dec.pair.second)].covered)
        gray[std::size_t(px)] = 255;
    }
    grays[i] = std::move(gray);
  });

  int correct = 0, confusion[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < instances.size(); ++i) {
    bool actual = instances[i].same, predicted = decisions[i] != 0;
    confusion[actual ? 1 : 0][predicted ? 1 : 0] += 1;
    if (actual == predicted) correct += 1;
  }
  if (overlays)
    for (std::size_t i = 0; i < instances.size(); ++i)
      write_pgm((fs::path(o.overlay_dir) / ("instance_" + pad4(int(i)) + ".pgm")).string(),
                grays[i], instances[i].image.rows, instances[i].image.cols);

  mam::RunManifest m;
  m.command = "cabc eval";
  m.argv = {"cabc", "eval", "--data", o.data_dir, "--models", o.models_dir,
            "--out", o.out_file,
            "--search-eta", std::to_string(o.params.search.eta_search),
            "--stride", std::to_string(o.params.search.anchor_stride),
            "--top-per-anchor", std::to_string(o.params.search.top_per_anchor),
            "--top-overall", std::to_string(o.params.search.top_overall),
            "--refine-eta", std::to_string(o.params.refine.eta_refine),
            "--overlap-penalty", num(o.params.refine.overlap_penalty),
            "--bp-iters", std::to_string(o.params.refine.bp.max_iters),
            "--bp-tol", num(o.params.refine.bp.tol),
            "--seed", std::to_string(g.seed)};
  if (overlays) m.argv.insert(m.argv.end(), {"--overlay-dir", o.overlay_dir});
  m.parameters = {{"eta_search", o.params.search.eta_search},
                  {"anchor_stride", o.params.search.anchor_stride},
                  {"top_per_anchor", o.params.search.top_per_anchor},
                  {"top_overall", o.params.search.top_overall},
                  {"eta_refine", o.params.refine.eta_refine},
                  {"overlap_penalty", o.params.refine.overlap_penalty},
                  {"bp_max_iters", o.params.refine.bp.max_iters},
                  {"bp_tol", o.params.refine.bp.tol}};
  m.seed = g.seed;
  m.input_hashes["data"] = digest;
  m.input_hashes["models"] = digest_files(o.models_dir, graph_files);

  json out;
  out["format_version"] = 1;
  out["n"] = instances.size();
  out["correct"] = correct;
  out["accuracy"] = instances.empty() ? 0.0 : double(correct) / double(instances.size());
  out["confusion"] = {{confusion[0][0], confusion[0][1]},
                      {confusion[1][0], confusion[1][1]}};
  out["decisions"] = decisions;
  out["manifest"] = mam::manifest_json(m);
  mam::write_text_file(o.out_file, out.dump(2) + "\n");
  mam::write_text_file(o.out_file + ".timing.json",
                       mam::timing_json(elapsed_ms(start), g.threads).dump(2) + "\n");
  emit_summary(g, out, "accuracy " + num(out["accuracy"].get<double>()) + " on " +
                           std::to_string(instances.size()) + " instances");
  return 0;
}

// --------------------------------------------------------------------------
// gene network demo

int run_demo_gene_network(const GlobalOpts& g) {
  const double strengths[] = {0.05, 0.1, 0.2, 0.4, 0.8};
  json grid = json::array();
  double max_mi = 0.0;
  for (double s : strengths) {
    mam::GeneNetworkConfig cfg;
    cfg.promote_b = std::log(s);
    cfg.promote_d = std::log(s);
    cfg.corepress = std::log(s);
    mam::GeneCsiReport r = mam::gene_network_csi(cfg);
    max_mi = std::max({max_mi, r.i_ab_given_c1, r.i_ad_given_c0});
    grid.push_back({{"strength", s},
                    {"i_ab_given_c1", r.i_ab_given_c1},
                    {"i_ad_given_c0", r.i_ad_given_c0}});
  }

  mam::RunManifest m;
  m.command = "demo-gene-network";
  m.argv = {"demo-gene-network", "--seed", std::to_string(g.seed)};
  m.seed = g.seed;

  json out;
  out["format_version"] = 1;
  out["quantities"] = {{"i_ab_given_c1", "I(X_A;X_B | X_C=1, X_D)"},
                       {"i_ad_given_c0", "I(X_A;X_D | X_C=0, X_B)"}};
  out["grid"] = grid;
  out["max_mi"] = max_mi;
  out["manifest"] = mam::manifest_json(m);
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-product inference for binary attention-augmented MRFs"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "root seed; per-instance seeds derive from it")
      ->capture_default_str();
  app.add_flag("--json", g.json_out, "machine-readable stdout only");
  app.add_option("--threads", g.threads, "worker hint; results identical for any value")
      ->capture_default_str();

  SolveOpts solve_o;
  auto* solve = app.add_subcommand("solve", "MAP decode a factor graph");
  solve->fallthrough();
  solve->add_option("--graph", solve_o.graph_file, "factor graph JSON")->required();
  solve->add_option("--evidence", solve_o.evidence_file, "evidence JSON");
  solve->add_option("--out", solve_o.out_file, "also write the report here");
  solve_o.bp.add_to(solve);

  VerifyOpts verify_o;
  auto* verify = app.add_subcommand("verify", "compare decode and messages to enumeration");
  verify->fallthrough();
  verify->add_option("--graph", verify_o.graph_file, "factor graph JSON")->required();
  verify->add_option("--evidence", verify_o.evidence_file, "evidence JSON");
  verify->add_option("--budget", verify_o.budget, "enumeration budget in states")
      ->capture_default_str();
  verify->add_option("--csi", verify_o.csi,
                     "conditional MI query x,y[,cond=state...] (repeatable)");
  verify_o.bp.add_to(verify);

  SparsifyOpts sparsify_o;
  auto* sparsify = app.add_subcommand("sparsify", "ground a part catalog in an image");
  sparsify->fallthrough();
  sparsify->add_option("--image", sparsify_o.image_file, "PBM image")->required();
  sparsify->add_option("--catalog", sparsify_o.catalog_file, "part catalog JSON")->required();
  sparsify->add_option("--pi01", sparsify_o.params.log_pi01, "log miss probability")
      ->capture_default_str();
  sparsify->add_option("--pi10", sparsify_o.params.log_pi10, "log spurious-pixel probability")
      ->capture_default_str();
  sparsify->add_option("--prior", sparsify_o.params.part_prior, "per-placement log prior")
      ->capture_default_str();
  sparsify->add_option("--stride", sparsify_o.params.stride, "anchor stride")
      ->capture_default_str();
  sparsify->add_option("--restarts", sparsify_o.params.restarts, "noisy restarts")
      ->capture_default_str();
  sparsify->add_option("--noise", sparsify_o.params.noise, "restart message noise")
      ->capture_default_str();
  bool no_prune = false;
  sparsify->add_flag("--no-prune", no_prune, "keep placements that cannot pay their prior");
  sparsify->add_option("--out", sparsify_o.out_file, "also write the report here");
  sparsify->add_option("--overlay", sparsify_o.overlay_file, "activation overlay PGM");

  LearnPartsOpts learn_parts_o;
  auto* learn_parts = app.add_subcommand("learn-parts", "learn part shapes from images");
  learn_parts->fallthrough();
  learn_parts->add_option("--image", learn_parts_o.image_files, "PBM images (repeatable)")
      ->required();
  learn_parts->add_option("--num-parts", learn_parts_o.params.num_parts, "part slots")
      ->capture_default_str();
  learn_parts->add_option("--patch-rows", learn_parts_o.params.patch_rows, "patch height")
      ->capture_default_str();
  learn_parts->add_option("--patch-cols", learn_parts_o.params.patch_cols, "patch width")
      ->capture_default_str();
  learn_parts->add_option("--batch-size", learn_parts_o.params.batch_size, "images per batch")
      ->capture_default_str();
  learn_parts->add_option("--out", learn_parts_o.out_file, "catalog JSON path")->required();

  auto* pathfinder = app.add_subcommand("pathfinder", "dashed-contour grouping pipeline");
  pathfinder->require_subcommand(1);
  pathfinder->fallthrough();

  PfGenOpts pf_gen_o;
  auto* pf_gen = pathfinder->add_subcommand("gen", "generate instances");
  pf_gen->fallthrough();
  pf_gen->add_option("--out", pf_gen_o.out_dir, "output directory")->required();
  pf_gen->add_option("--n", pf_gen_o.n, "instance count")->capture_default_str();
  pf_gen->add_option("--rows", pf_gen_o.params.rows)->capture_default_str();
  pf_gen->add_option("--cols", pf_gen_o.params.cols)->capture_default_str();
  pf_gen->add_option("--targets", pf_gen_o.params.n_targets)->capture_default_str();
  pf_gen->add_option("--target-len-min", pf_gen_o.params.target_len_min)->capture_default_str();
  pf_gen->add_option("--target-len-max", pf_gen_o.params.target_len_max)->capture_default_str();
  pf_gen->add_option("--distractors", pf_gen_o.params.n_distractors)->capture_default_str();
  pf_gen->add_option("--distractor-len-min", pf_gen_o.params.distractor_len_min)
      ->capture_default_str();
  pf_gen->add_option("--distractor-len-max", pf_gen_o.params.distractor_len_max)
      ->capture_default_str();
  pf_gen->add_option("--separation", pf_gen_o.params.separation)->capture_default_str();
  pf_gen->add_option("--max-retries", pf_gen_o.params.max_retries)->capture_default_str();

  PfLearnOpts pf_learn_o;
  auto* pf_learn = pathfinder->add_subcommand("learn", "learn the contour model");
  pf_learn->fallthrough();
  pf_learn->add_option("--data", pf_learn_o.data_dir, "training instance directory")
      ->required();
  pf_learn->add_option("--out", pf_learn_o.out_file, "model JSON path")->required();
  pf_learn->add_option("--min-rel-freq", pf_learn_o.min_rel_freq,
                       "drop rarer co-occurrences")
      ->capture_default_str();
  pf_learn->add_option("--termination-penalty", pf_learn_o.termination_penalty,
                       "contour break penalty")
      ->capture_default_str();

  PfEvalOpts pf_eval_o;
  auto* pf_eval = pathfinder->add_subcommand("eval", "evaluate same/different accuracy");
  pf_eval->fallthrough();
  pf_eval->add_option("--data", pf_eval_o.data_dir, "instance directory")->required();
  pf_eval->add_option("--model", pf_eval_o.model_file, "model JSON")->required();
  pf_eval->add_option("--out", pf_eval_o.out_file, "results JSON path")->required();
  pf_eval->add_option("--overlay-dir", pf_eval_o.overlay_dir, "decoded overlay PGMs");
  pf_eval->add_option("--marker-radius", pf_eval_o.marker_radius)->capture_default_str();
  pf_eval_o.bp.add_to(pf_eval);

  auto* cabc = app.add_subcommand("cabc", "letter-pair grouping pipeline");
  cabc->require_subcommand(1);
  cabc->fallthrough();

  CabcGenOpts cabc_gen_o;
  auto* cabc_gen = cabc->add_subcommand("gen", "generate two-letter instances");
  cabc_gen->fallthrough();
  cabc_gen->add_option("--out", cabc_gen_o.out_dir, "output directory")->required();
  cabc_gen->add_option("--n", cabc_gen_o.n, "instance count")->capture_default_str();
  cabc_gen->add_option("--rows", cabc_gen_o.params.rows)->capture_default_str();
  cabc_gen->add_option("--cols", cabc_gen_o.params.cols)->capture_default_str();
  cabc_gen->add_option("--letter-size", cabc_gen_o.params.letter_size)->capture_default_str();
  cabc_gen->add_option("--thickness", cabc_gen_o.params.thickness)->capture_default_str();
  cabc_gen->add_option("--distortion", cabc_gen_o.params.distortion)->capture_default_str();
  cabc_gen->add_option("--pixel-noise", cabc_gen_o.params.pixel_noise)->capture_default_str();
  cabc_gen->add_option("--separation", cabc_gen_o.params.separation)->capture_default_str();

  CabcLearnOpts cabc_learn_o;
  auto* cabc_learn = cabc->add_subcommand("learn", "learn elastic graphs from templates");
  cabc_learn->fallthrough();
  cabc_learn->add_option("--out", cabc_learn_o.out_dir, "output directory")->required();
  cabc_learn->add_option("--per-template", cabc_learn_o.per_template)->capture_default_str();
  cabc_learn->add_option("--letter-size", cabc_learn_o.letter_size)->capture_default_str();
  cabc_learn->add_option("--thickness", cabc_learn_o.thickness)->capture_default_str();
  cabc_learn->add_option("--distortion", cabc_learn_o.distortion)->capture_default_str();
  cabc_learn->add_option("--pixel-noise", cabc_learn_o.pixel_noise)->capture_default_str();
  cabc_learn->add_option("--part-radius", cabc_learn_o.params.part_radius)
      ->capture_default_str();
  cabc_learn->add_option("--eta", cabc_learn_o.params.eta)->capture_default_str();

  CabcEvalOpts cabc_eval_o;
  auto* cabc_eval = cabc->add_subcommand("eval", "evaluate same/different accuracy");
  cabc_eval->fallthrough();
  cabc_eval->add_option("--data", cabc_eval_o.data_dir, "instance directory")->required();
  cabc_eval->add_option("--models", cabc_eval_o.models_dir, "elastic graph directory")
      ->required();
  cabc_eval->add_option("--out", cabc_eval_o.out_file, "results JSON path")->required();
  cabc_eval->add_option("--overlay-dir", cabc_eval_o.overlay_dir, "decoded overlay PGMs");
  cabc_eval->add_option("--search-eta", cabc_eval_o.params.search.eta_search)
      ->capture_default_str();
  cabc_eval->add_option("--stride", cabc_eval_o.params.search.anchor_stride)
      ->capture_default_str();
  cabc_eval->add_option("--top-per-anchor", cabc_eval_o.params.search.top_per_anchor)
      ->capture_default_str();
  cabc_eval->add_option("--top-overall", cabc_eval_o.params.search.top_overall)
      ->capture_default_str();
  cabc_eval->add_option("--refine-eta", cabc_eval_o.params.refine.eta_refine)
      ->capture_default_str();
  cabc_eval->add_option("--overlap-penalty", cabc_eval_o.params.refine.overlap_penalty)
      ->capture_default_str();
  cabc_eval->add_option("--bp-iters", cabc_eval_o.params.refine.bp.max_iters)
      ->capture_default_str();
  cabc_eval->add_option("--bp-tol", cabc_eval_o.params.refine.bp.tol)->capture_default_str();

  auto* demo = app.add_subcommand("demo-gene-network",
                                  "context-specific independence demo report");
  demo->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*solve) return run_solve(solve_o, g);
    if (*verify) return run_verify(verify_o, g);
    if (*sparsify) {
      sparsify_o.params.prune = !no_prune;
      return run_sparsify(sparsify_o, g);
    }
    if (*learn_parts) return run_learn_parts(learn_parts_o, g);
    if (*pathfinder) {
      if (*pf_gen) return run_pathfinder_gen(pf_gen_o, g);
      if (*pf_learn) return run_pathfinder_learn(pf_learn_o, g);
      if (*pf_eval) return run_pathfinder_eval(pf_eval_o, g);
    }
    if (*cabc) {
      if (*cabc_gen) return run_cabc_gen(cabc_gen_o, g);
      if (*cabc_learn) return run_cabc_learn(cabc_learn_o, g);
      if (*cabc_eval) return run_cabc_eval(cabc_eval_o, g);
    }
    if (*demo) return run_demo_gene_network(g);
  } catch (const mam::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mam::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mam::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
