#pragma once

#include <string>

#include <json.hpp>

#include "mam/graph.hpp"

namespace mam {

inline constexpr int kFormatVersion = 1;

// Interchange format (format_version 1):
//   {"format_version": 1,
//    "variables": [{"id": int, "kind": "part|attention|pixel|weight", "label": str}],
//    "factors":   [{"type": "unary", "var": id, "log_pot": [off, on]} |
//                  {"type": "table", "vars": [...], "log_pots": [...]} |
//                  {"type": "mam_hof", "part_var": id, "groups": [[...]],
//                   "patterns": [[0/1,...]], "potentials": [...]} |
//                  {"type": "or", "pixel_var": id, "parents": [...],
//                   "log_pi01": v, "log_pi10": v}]}
// Table log_pots index joint states big-endian in declaration order. The
// sentinel is encoded as the string "-inf".
nlohmann::json graph_to_json(const FactorGraph& g);
FactorGraph graph_from_json(const nlohmann::json& j);

// Evidence: {"<variable id>": log-odds}. Missing variables default to 0.
nlohmann::json evidence_to_json(const Evidence& e);
Evidence evidence_from_json(const nlohmann::json& j, std::size_t num_variables);

// Log-potential encoding shared by other serializers.
nlohmann::json log_value_to_json(double v);
double log_value_from_json(const nlohmann::json& j);

// File helpers (throw ParseError on unreadable/invalid input).
nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

FactorGraph load_graph(const std::string& path);
void save_graph(const std::string& path, const FactorGraph& g);

}  // namespace mam
