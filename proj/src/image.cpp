#include "mam/image.hpp"

#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mam/util.hpp"

namespace mam {

std::size_t BinaryImage::count_on() const {
  return std::accumulate(bits.begin(), bits.end(), std::size_t(0));
}

namespace {

// Skips whitespace and '#' comments, returns next token.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(char(c));
    while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
      tok.push_back(char(in.get()));
    }
    return true;
  }
  return false;
}

BinaryImage parse_pbm(std::istream& in, const std::string& what) {
  std::string tok;
  if (!next_token(in, tok) || tok != "P1") {
    throw ParseError(what + ": expected PBM magic P1");
  }
  auto read_int = [&](const char* name) {
    if (!next_token(in, tok)) throw ParseError(what + ": missing " + name);
    try {
      std::size_t pos = 0;
      int v = std::stoi(tok, &pos);
      if (pos != tok.size() || v <= 0) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(what + ": bad " + std::string(name) + " '" + tok + "'");
    }
  };
  int cols = read_int("width");
  int rows = read_int("height");
  BinaryImage img(rows, cols);
  // P1 allows digits to be packed without separators.
  std::size_t filled = 0;
  int c;
  while (filled < img.bits.size() && (c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    if (c == '0' || c == '1') {
      img.bits[filled++] = std::uint8_t(c - '0');
    } else {
      throw ParseError(what + ": unexpected character in raster");
    }
  }
  if (filled != img.bits.size()) throw ParseError(what + ": truncated raster");
  return img;
}

}  // namespace

BinaryImage read_pbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return parse_pbm(in, path);
}

BinaryImage pbm_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_pbm(in, "pbm string");
}

std::string pbm_to_string(const BinaryImage& img) {
  std::ostringstream out;
  out << "P1\n" << img.cols << " " << img.rows << "\n";
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      if (c) out << ' ';
      out << int(img.at(r, c));
    }
    out << '\n';
  }
  return out.str();
}

void write_pbm(const std::string& path, const BinaryImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << pbm_to_string(img);
}

}  // namespace mam
