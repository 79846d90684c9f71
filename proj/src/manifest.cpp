#include "mam/manifest.hpp"

#include <fstream>
#include <sstream>

#include "mam/util.hpp"

namespace mam {

nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed;
  j["input_hashes"] = m.input_hashes;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1)
      throw ParseError("manifest: unsupported format_version");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.parameters = j.at("parameters");
    m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("input_hashes"))
      m.input_hashes = j.at("input_hashes").get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

std::string hash_bytes(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)fnv1a64(bytes));
  return buf;
}

std::string hash_file(const std::string& path) { return hash_bytes(read_text_file(path)); }

nlohmann::json timing_json(long long wall_clock_ms, int threads) {
  nlohmann::json j;
  j["wall_clock_ms"] = wall_clock_ms;
  j["threads"] = threads;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << text;
}

}  // namespace mam
