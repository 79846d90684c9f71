#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mam {

// Reproduction record embedded in every CLI output. Deliberately excludes
// wall-clock and worker count so a rerun from the manifest, with any
// --threads value, emits byte-identical files; timing goes to a side record.
struct RunManifest {
  std::string command;            // e.g. "pathfinder gen"
  std::vector<std::string> argv;  // canonical flags that reproduce the run
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_hashes;  // label -> fnv1a64 hex
};

nlohmann::json manifest_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

std::string hash_bytes(std::string_view bytes);  // fnv1a64, fixed-width hex
std::string hash_file(const std::string& path);

nlohmann::json timing_json(long long wall_clock_ms, int threads);

std::string read_text_file(const std::string& path);  // ParseError when unreadable
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mam
