#include "mam/letters.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <json.hpp>

namespace mam {

const std::vector<LetterTemplate>& letter_templates() {
  static const std::vector<LetterTemplate> templates = {
      {"L", {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.8}}}},
      {"T", {{{0.0, 0.0}, {0.0, 1.0}}, {{0.0, 0.5}, {1.0, 0.5}}}},
      {"H", {{{0.0, 0.0}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}}, {{0.5, 0.0}, {0.5, 1.0}}}},
      {"U", {{{0.0, 0.0}, {0.75, 0.0}, {1.0, 0.25}, {1.0, 0.75}, {0.75, 1.0}, {0.0, 1.0}}}},
      {"Z", {{{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}}},
      {"X", {{{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 0.0}}}},
      {"O",
       {{{0.0, 0.3},
         {0.0, 0.7},
         {0.3, 1.0},
         {0.7, 1.0},
         {1.0, 0.7},
         {1.0, 0.3},
         {0.7, 0.0},
         {0.3, 0.0},
         {0.0, 0.3}}}},
  };
  return templates;
}

BinaryImage render_letter(const LetterTemplate& t, int size, int thickness,
                          double distortion, double pixel_noise, Rng& rng) {
  if (size < 2) throw ShapeError("render_letter: size must be >= 2");
  if (thickness < 1) throw ShapeError("render_letter: thickness must be >= 1");
  BinaryImage img(size, size);
  const double scale = double(size - 1);
  const int brush = (thickness - 1) / 2;

  auto stamp = [&](double r, double c) {
    int ir = int(std::lround(r)), ic = int(std::lround(c));
    for (int dr = -brush; dr <= brush; ++dr)
      for (int dc = -brush; dc <= brush; ++dc)
        if (img.in_bounds(ir + dr, ic + dc)) img.set(ir + dr, ic + dc, 1);
  };

  for (const auto& stroke : t.strokes) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [pr, pc] : stroke) {
      double r = pr * scale + rng.uniform(-distortion, distortion) * scale;
      double c = pc * scale + rng.uniform(-distortion, distortion) * scale;
      pts.push_back({std::clamp(r, 0.0, scale), std::clamp(c, 0.0, scale)});
    }
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
      double dr = pts[s + 1].first - pts[s].first;
      double dc = pts[s + 1].second - pts[s].second;
      int steps = int(std::ceil(2.0 * std::max(std::abs(dr), std::abs(dc)))) + 1;
      for (int k = 0; k <= steps; ++k) {
        double f = double(k) / double(steps);
        stamp(pts[s].first + f * dr, pts[s].second + f * dc);
      }
    }
  }

  if (pixel_noise > 0.0) {
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c)
        if (rng.uniform() < pixel_noise) img.set(r, c, img.at(r, c) ? 0 : 1);
  }
  return img;
}

CabcInstance generate_cabc(const CabcGenParams& params) {
  const auto& templates = letter_templates();
  const int S = params.letter_size;
  const int lo = params.margin;
  const int hi_r = params.rows - params.margin - S;
  const int hi_c = params.cols - params.margin - S;
  if (hi_r < lo || hi_c < lo)
    throw ShapeError("generate_cabc: canvas too small for letter size");

  Rng rng(params.seed);
  CabcInstance inst;
  inst.same = rng.coin();
  inst.template_a = int(rng.uniform_int(templates.size()));
  inst.template_b = int(rng.uniform_int(templates.size()));

  BinaryImage la, lb;
  for (int attempt = 0;; ++attempt) {
    if (attempt > params.max_retries)
      throw BudgetError("generate_cabc: could not render non-empty letters");
    la = render_letter(templates[std::size_t(inst.template_a)], S, params.thickness,
                       params.distortion, params.pixel_noise, rng);
    lb = render_letter(templates[std::size_t(inst.template_b)], S, params.thickness,
                       params.distortion, params.pixel_noise, rng);
    if (la.count_on() >= 2 && lb.count_on() >= 2) break;
  }

  for (int attempt = 0;; ++attempt) {
    if (attempt > params.max_retries)
      throw BudgetError("generate_cabc: could not place letters apart");
    int ar = int(rng.uniform_int(lo, hi_r)), ac = int(rng.uniform_int(lo, hi_c));
    int br = int(rng.uniform_int(lo, hi_r)), bc = int(rng.uniform_int(lo, hi_c));
    if (std::max(std::abs(ar - br), std::abs(ac - bc)) >= S + params.separation) {
      inst.origin_a = {ar, ac};
      inst.origin_b = {br, bc};
      break;
    }
  }

  inst.image = BinaryImage(params.rows, params.cols);
  std::vector<std::pair<int, int>> pix_a, pix_b;
  auto blit = [&](const BinaryImage& letter, std::pair<int, int> origin,
                  std::vector<std::pair<int, int>>& pix) {
    for (int r = 0; r < letter.rows; ++r) {
      for (int c = 0; c < letter.cols; ++c) {
        if (!letter.at(r, c)) continue;
        inst.image.set(origin.first + r, origin.second + c, 1);
        pix.push_back({origin.first + r, origin.second + c});
      }
    }
  };
  blit(la, inst.origin_a, pix_a);
  blit(lb, inst.origin_b, pix_b);

  if (inst.same) {
    const auto& pix = rng.coin() ? pix_b : pix_a;
    std::size_t i1 = rng.uniform_int(pix.size());
    std::size_t i2 = rng.uniform_int(pix.size());
    while (pix.size() > 1 && i2 == i1) i2 = rng.uniform_int(pix.size());
    inst.marker_a = pix[i1];
    inst.marker_b = pix[i2];
  } else {
    inst.marker_a = pix_a[rng.uniform_int(pix_a.size())];
    inst.marker_b = pix_b[rng.uniform_int(pix_b.size())];
    if (rng.coin()) std::swap(inst.marker_a, inst.marker_b);
  }
  return inst;
}

std::string cabc_instance_to_json_string(const CabcInstance& inst) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["label"] = inst.same ? "same" : "different";
  j["markers"] = {{inst.marker_a.first, inst.marker_a.second},
                  {inst.marker_b.first, inst.marker_b.second}};
  j["templates"] = {inst.template_a, inst.template_b};
  j["origins"] = {{inst.origin_a.first, inst.origin_a.second},
                  {inst.origin_b.first, inst.origin_b.second}};
  return j.dump(2) + "\n";
}

CabcInstance cabc_instance_from_json_string(const std::string& text, BinaryImage image) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cabc instance: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw ParseError("cabc instance: unsupported format_version");
    CabcInstance inst;
    inst.image = std::move(image);
    const std::string label = j.at("label").get<std::string>();
    if (label != "same" && label != "different")
      throw ParseError("cabc instance: bad label");
    inst.same = label == "same";
    const auto& markers = j.at("markers");
    if (!markers.is_array() || markers.size() != 2)
      throw ParseError("cabc instance: need exactly two markers");
    inst.marker_a = {markers[0].at(0).get<int>(), markers[0].at(1).get<int>()};
    inst.marker_b = {markers[1].at(0).get<int>(), markers[1].at(1).get<int>()};
    const auto& tpl = j.at("templates");
    inst.template_a = tpl.at(0).get<int>();
    inst.template_b = tpl.at(1).get<int>();
    const auto& origins = j.at("origins");
    inst.origin_a = {origins[0].at(0).get<int>(), origins[0].at(1).get<int>()};
    inst.origin_b = {origins[1].at(0).get<int>(), origins[1].at(1).get<int>()};
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cabc instance: ") + e.what());
  }
}

}  // namespace mam
