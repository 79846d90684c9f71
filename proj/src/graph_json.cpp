#include "mam/graph_json.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mam/util.hpp"

namespace mam {

using nlohmann::json;

json log_value_to_json(double v) {
  if (is_neg_inf(v)) return json("-inf");
  if (!std::isfinite(v)) throw ShapeError("cannot serialize non-finite log potential");
  return json(v);
}

double log_value_from_json(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "-inf") return kNegInf;
    throw ParseError("bad log potential string: " + s);
  }
  if (!j.is_number()) throw ParseError("log potential must be a number or \"-inf\"");
  return j.get<double>();
}

namespace {

VariableId id_from_json(const json& j) {
  if (!j.is_number_integer()) throw ParseError("variable id must be an integer");
  return VariableId(j.get<std::int32_t>());
}

json ids_to_json(const std::vector<VariableId>& ids) {
  json a = json::array();
  for (VariableId v : ids) a.push_back(v.value);
  return a;
}

std::vector<VariableId> ids_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected an id array");
  std::vector<VariableId> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(id_from_json(e));
  return out;
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("missing field: ") + name);
  return *it;
}

}  // namespace

json graph_to_json(const FactorGraph& g) {
  json vars = json::array();
  for (const auto& v : g.variables()) {
    json jv;
    jv["id"] = v.id.value;
    jv["kind"] = to_string(v.kind);
    if (!v.label.empty()) jv["label"] = v.label;
    vars.push_back(std::move(jv));
  }
  json factors = json::array();
  for (std::size_t f = 0; f < g.num_factors(); ++f) {
    const auto& spec = g.factor(std::int32_t(f));
    json jf;
    if (const auto* u = std::get_if<UnaryFactor>(&spec)) {
      jf["type"] = "unary";
      jf["var"] = u->var.value;
      jf["log_pot"] = json::array({log_value_to_json(u->log_pot_off),
                                   log_value_to_json(u->log_pot_on)});
    } else if (const auto* t = std::get_if<TableFactor>(&spec)) {
      jf["type"] = "table";
      jf["vars"] = ids_to_json(t->vars);
      json pots = json::array();
      for (double p : t->log_pots) pots.push_back(log_value_to_json(p));
      jf["log_pots"] = std::move(pots);
    } else if (const auto* h = std::get_if<MamHofSpec>(&spec)) {
      jf["type"] = "mam_hof";
      jf["part_var"] = h->part_var.value;
      json groups = json::array();
      for (const auto& grp : h->groups) groups.push_back(ids_to_json(grp));
      jf["groups"] = std::move(groups);
      jf["patterns"] = h->patterns;
      json pots = json::array();
      for (double p : h->potentials) pots.push_back(log_value_to_json(p));
      jf["potentials"] = std::move(pots);
    } else {
      const auto& o = std::get<OrFactorSpec>(spec);
      jf["type"] = "or";
      jf["pixel_var"] = o.pixel_var.value;
      jf["parents"] = ids_to_json(o.parents);
      jf["log_pi01"] = log_value_to_json(o.log_pi01);
      jf["log_pi10"] = log_value_to_json(o.log_pi10);
    }
    factors.push_back(std::move(jf));
  }
  json out;
  out["format_version"] = kFormatVersion;
  out["variables"] = std::move(vars);
  out["factors"] = std::move(factors);
  return out;
}

FactorGraph graph_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("graph JSON must be an object");
  if (field(j, "format_version").get<int>() != kFormatVersion)
    throw ParseError("unsupported format_version");
  FactorGraph g;
  const auto& vars = field(j, "variables");
  if (!vars.is_array()) throw ParseError("variables must be an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto& jv = vars[i];
    if (id_from_json(field(jv, "id")).value != std::int32_t(i))
      throw ParseError("variable ids must be dense and in order");
    std::string label = jv.contains("label") ? jv["label"].get<std::string>() : std::string{};
    g.add_variable(var_kind_from_string(field(jv, "kind").get<std::string>()),
                   std::move(label));
  }
  const auto& factors = field(j, "factors");
  if (!factors.is_array()) throw ParseError("factors must be an array");
  for (const auto& jf : factors) {
    const std::string type = field(jf, "type").get<std::string>();
    try {
      if (type == "unary") {
        const auto& pots = field(jf, "log_pot");
        if (!pots.is_array() || pots.size() != 2) throw ParseError("unary log_pot must be [off, on]");
        g.add_factor(UnaryFactor{id_from_json(field(jf, "var")),
                                 log_value_from_json(pots[0]), log_value_from_json(pots[1])});
      } else if (type == "table") {
        TableFactor t;
        t.vars = ids_from_json(field(jf, "vars"));
        for (const auto& p : field(jf, "log_pots")) t.log_pots.push_back(log_value_from_json(p));
        g.add_factor(std::move(t));
      } else if (type == "mam_hof") {
        MamHofSpec h;
        h.part_var = id_from_json(field(jf, "part_var"));
        for (const auto& grp : field(jf, "groups")) h.groups.push_back(ids_from_json(grp));
        for (const auto& pat : field(jf, "patterns"))
          h.patterns.push_back(pat.get<std::vector<std::uint8_t>>());
        for (const auto& p : field(jf, "potentials"))
          h.potentials.push_back(log_value_from_json(p));
        g.add_factor(std::move(h));
      } else if (type == "or") {
        OrFactorSpec o;
        o.pixel_var = id_from_json(field(jf, "pixel_var"));
        o.parents = ids_from_json(field(jf, "parents"));
        o.log_pi01 = log_value_from_json(field(jf, "log_pi01"));
        o.log_pi10 = log_value_from_json(field(jf, "log_pi10"));
        g.add_factor(std::move(o));
      } else {
        throw ParseError("unknown factor type: " + type);
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad factor JSON: ") + e.what());
    }
  }
  return g;
}

json evidence_to_json(const Evidence& e) {
  json out = json::object();
  for (std::size_t v = 0; v < e.size(); ++v)
    if (e[v] != 0.0) out[std::to_string(v)] = log_value_to_json(e[v]);
  return out;
}

Evidence evidence_from_json(const json& j, std::size_t num_variables) {
  if (!j.is_object()) throw ParseError("evidence JSON must be an object");
  Evidence e(num_variables, 0.0);
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t v = 0;
    try {
      v = std::size_t(std::stoll(it.key()));
    } catch (...) {
      throw ParseError("evidence key is not a variable id: " + it.key());
    }
    if (v >= num_variables) throw ShapeError("evidence for unknown variable " + it.key());
    e[v] = log_value_from_json(it.value());
  }
  return e;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << '\n';
}

FactorGraph load_graph(const std::string& path) { return graph_from_json(load_json_file(path)); }

void save_graph(const std::string& path, const FactorGraph& g) {
  save_json_file(path, graph_to_json(g));
}

}  // namespace mam
