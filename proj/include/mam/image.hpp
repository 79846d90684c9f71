#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mam {

struct BinaryImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0/1

  BinaryImage() = default;
  BinaryImage(int r, int c) : rows(r), cols(c), bits(std::size_t(r) * std::size_t(c), 0) {}

  bool in_bounds(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }
  std::uint8_t at(int r, int c) const { return bits[std::size_t(r) * cols + c]; }
  void set(int r, int c, std::uint8_t v) { bits[std::size_t(r) * cols + c] = v ? 1 : 0; }
  std::size_t count_on() const;
  bool operator==(const BinaryImage&) const = default;
};

// Plain PBM (P1): 1 = ON. Deterministic byte-for-byte writer.
BinaryImage read_pbm(const std::string& path);
void write_pbm(const std::string& path, const BinaryImage& img);
std::string pbm_to_string(const BinaryImage& img);
BinaryImage pbm_from_string(const std::string& text);

}  // namespace mam
