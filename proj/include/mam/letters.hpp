#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mam/image.hpp"
#include "mam/util.hpp"

namespace mam {

// Stroke skeleton in the unit box, (row, col) coordinates.
struct LetterTemplate {
  std::string name;
  std::vector<std::vector<std::pair<double, double>>> strokes;  // polylines
};

const std::vector<LetterTemplate>& letter_templates();

// Rasterizes a template into a size x size image: control points are scaled,
// jittered by uniform(-distortion, distortion) * size per coordinate, segments
// drawn with a square brush of the given diameter, then each pixel flips with
// probability pixel_noise.
BinaryImage render_letter(const LetterTemplate& t, int size, int thickness,
                          double distortion, double pixel_noise, Rng& rng);

struct CabcGenParams {
  int rows = 64;
  int cols = 64;
  int letter_size = 24;
  int thickness = 3;
  double distortion = 0.05;
  double pixel_noise = 0.005;
  int separation = 4;  // min Chebyshev gap between letter boxes
  int margin = 1;
  int max_retries = 200;
  std::uint64_t seed = 0;
};

struct CabcInstance {
  BinaryImage image;
  std::pair<int, int> marker_a{0, 0};
  std::pair<int, int> marker_b{0, 0};
  bool same = false;
  int template_a = 0;
  int template_b = 0;
  std::pair<int, int> origin_a{0, 0};
  std::pair<int, int> origin_b{0, 0};
};

// Two distorted letters on one canvas, boxes separated by at least
// `separation`; markers are ON pixels of one letter (same) or one per letter
// (different). BudgetError when placement keeps failing.
CabcInstance generate_cabc(const CabcGenParams& params);

std::string cabc_instance_to_json_string(const CabcInstance& inst);
CabcInstance cabc_instance_from_json_string(const std::string& text, BinaryImage image);

}  // namespace mam
