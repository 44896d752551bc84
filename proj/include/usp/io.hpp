#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "usp/core.hpp"
#include "usp/graphalg.hpp"
#include "usp/hom.hpp"
#include "usp/metrizability.hpp"
#include "usp/topology.hpp"

namespace usp {

inline constexpr const char* kSchemaVersion = "usp-json/1";

using json = nlohmann::json;

// Input error with a location such as "paths[2][1]".
struct ParseError : std::invalid_argument {
  std::string where;
  ParseError(std::string w, const std::string& msg) : std::invalid_argument(w + ": " + msg), where(std::move(w)) {}
};

inline json rational_json(const Rational& x) { return to_string(x); }

inline Rational rational_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(where, e.what());
  }
  throw ParseError(where, "expected a rational string \"p/q\" or an integer");
}

// {"nodes":[...]?, "paths":[[...],...], "weights":{"ace":"3/2",...}?}.
// Duplicate paths collapse and their weights add.
inline WeightedPathSystem system_from_json(const json& j, bool* weighted = nullptr) {
  if (!j.is_object()) throw ParseError("$", "expected an object");
  if (!j.contains("paths") || !j["paths"].is_array()) throw ParseError("paths", "missing or not an array");
  std::vector<std::vector<std::string>> named;
  const auto& jp = j["paths"];
  for (std::size_t i = 0; i < jp.size(); ++i) {
    std::string w = "paths[" + std::to_string(i) + "]";
    if (!jp[i].is_array() || jp[i].empty()) throw ParseError(w, "expected a nonempty array of node names");
    std::vector<std::string> p;
    for (std::size_t k = 0; k < jp[i].size(); ++k) {
      if (!jp[i][k].is_string() || jp[i][k].get<std::string>().empty())
        throw ParseError(w + "[" + std::to_string(k) + "]", "expected a nonempty node name");
      p.push_back(jp[i][k].get<std::string>());
    }
    named.push_back(std::move(p));
  }
  if (named.empty()) throw ParseError("paths", "a path system needs at least one path");
  auto base = PathSystem::from_named(named);
  if (j.contains("nodes")) {
    const auto& jn = j["nodes"];
    if (!jn.is_array()) throw ParseError("nodes", "expected an array");
    std::set<std::string> listed;
    for (std::size_t k = 0; k < jn.size(); ++k) {
      std::string w = "nodes[" + std::to_string(k) + "]";
      if (!jn[k].is_string()) throw ParseError(w, "expected a node name");
      if (!listed.insert(jn[k].get<std::string>()).second) throw ParseError(w, "duplicate node name");
    }
    for (const auto& n : base.names)
      if (!listed.count(n)) throw ParseError("nodes", "path node '" + n + "' is not listed");
    for (const auto& n : listed)
      if (!base.find(n)) throw ParseError("nodes", "node '" + n + "' lies on no path");
  }
  std::map<std::string, Rational> given;
  if (j.contains("weights")) {
    if (!j["weights"].is_object()) throw ParseError("weights", "expected an object");
    for (const auto& [k, v] : j["weights"].items()) {
      Rational x = rational_from_json(v, "weights." + k);
      if (x <= 0) throw ParseError("weights." + k, "weights must be positive");
      given[k] = x;
    }
  }
  if (weighted) *weighted = !given.empty();
  std::map<Path, Rational> w;
  std::set<std::string> used_keys;
  for (std::size_t i = 0; i < named.size(); ++i) {
    Path p;
    for (const auto& n : named[i]) p.push_back(base.id(n));
    std::string key = path_key(base.names, p);
    Rational x = 1;
    if (!given.empty()) {
      auto it = given.find(key);
      if (it == given.end()) throw ParseError("weights", "no weight for path " + key);
      x = it->second;
      used_keys.insert(key);
    }
    w[p] += x;
  }
  for (const auto& [k, x] : given)
    if (!used_keys.count(k)) throw ParseError("weights." + k, "weight for a path that is not in the system");
  return WeightedPathSystem::from_map(base.names, w);
}

inline WeightedPathSystem parse_system_text(const std::string& text, bool* weighted = nullptr) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed JSON");
  }
  return system_from_json(j, weighted);
}

inline WeightedPathSystem load_system_file(const std::string& path, bool* weighted = nullptr) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_system_text(ss.str(), weighted);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.where, std::string(e.what()).substr(e.where.size() + 2));
  }
}

inline json system_to_json(const PathSystem& s) {
  json j;
  json nodes = json::array();
  for (NodeId v : s.used_nodes()) nodes.push_back(s.names[v]);
  json paths = json::array();
  for (const auto& p : s.paths) paths.push_back(s.path_names(p));
  j["nodes"] = nodes;
  j["paths"] = paths;
  return j;
}

inline json system_to_json(const WeightedPathSystem& s) {
  json j = system_to_json(s.system);
  json w = json::object();
  for (std::size_t i = 0; i < s.size(); ++i) w[path_key(s.names(), s.paths()[i])] = rational_json(s.weights[i]);
  j["weights"] = w;
  return j;
}

inline json graph_to_json(const WeightedDigraph& g) {
  json edges = json::array();
  for (const auto& [e, w] : g.edges())
    edges.push_back(json::array({g.names()[e.first], g.names()[e.second], rational_json(w)}));
  json nodes = json::array();
  for (const auto& n : g.names()) nodes.push_back(n);
  return {{"nodes", nodes}, {"edges", edges}};
}

inline WeightedDigraph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) throw ParseError("nodes", "missing");
  std::vector<std::string> names;
  for (const auto& n : j["nodes"]) names.push_back(n.get<std::string>());
  std::map<std::string, NodeId> id;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!id.emplace(names[i], static_cast<NodeId>(i)).second) throw ParseError("nodes", "duplicate node name");
  WeightedDigraph g(static_cast<int>(names.size()), names);
  if (j.contains("edges")) {
    const auto& je = j["edges"];
    for (std::size_t k = 0; k < je.size(); ++k) {
      std::string w = "edges[" + std::to_string(k) + "]";
      if (!je[k].is_array() || je[k].size() != 3 || !je[k][0].is_string() || !je[k][1].is_string())
        throw ParseError(w, "expected [from, to, weight]");
      auto from = id.find(je[k][0].get<std::string>()), to = id.find(je[k][1].get<std::string>());
      if (from == id.end() || to == id.end()) throw ParseError(w, "unknown endpoint");
      g.set_weight(from->second, to->second, rational_from_json(je[k][2], w + "[2]"));
    }
  }
  return g;
}

inline json hom_to_json(const PathSystem& s1, const PathSystem& s2, const Homomorphism& h) {
  json phi = json::object(), rho = json::object();
  for (NodeId v : s1.used_nodes()) phi[s1.names[v]] = s2.names.at(h.phi.at(v));
  for (std::size_t i = 0; i < s1.size(); ++i)
    rho[path_key(s1.names, s1.paths[i])] = path_key(s2.names, s2.paths.at(h.rho.at(i)));
  return {{"phi", phi}, {"rho", rho}};
}

inline json manifold_to_json(const std::vector<std::string>& names, const ManifoldReport& r) {
  json j;
  j["is_manifold"] = r.is_manifold;
  j["boundaryless"] = r.boundaryless;
  j["orientable"] = r.orientable;
  j["components"] = r.components;
  j["V"] = r.V;
  j["E"] = r.E;
  j["F"] = r.F;
  j["euler_characteristic"] = r.euler_characteristic;
  j["genus"] = rational_json(r.genus);
  json cg = json::array();
  for (const auto& g : r.component_genus) cg.push_back(rational_json(g));
  j["component_genus"] = cg;
  j["locally_balanced"] = r.locally_balanced;
  j["globally_balanced"] = r.globally_balanced;
  j["colorful_cells"] = r.colorful_cells;
  j["gray_cells"] = r.gray_cells;
  j["glued_pairs"] = r.glued_pairs;
  json off = json::array(), deg = json::array();
  for (NodeId v : r.offending_vertices) off.push_back(names[v]);
  for (NodeId v : r.degenerate_vertices) deg.push_back(names[v]);
  j["offending_vertices"] = off;
  j["degenerate_vertices"] = deg;
  j["problems"] = r.problems;
  return j;
}

inline json certificate_to_json(const WeightedPathSystem& input, const WeightedPathSystem& cert) {
  json j = system_to_json(cert);
  j["boundary_check"] = boundary_system(cert) == boundary_system(input);
  auto f = classify(cert.system);
  j["flags"] = {{"semisimple", f.semisimple}, {"nontrivial", f.nontrivial}, {"skip_free", f.skip_free}};
  j["differs_from_input"] = cert.system.paths != input.system.paths;
  return j;
}

inline json decision_to_json(const Decision& d, bool timing = false) {
  json j;
  j["schema"] = kSchemaVersion;
  j["decision"] = to_string(d.tag);
  j["setting"] = to_string(d.setting);
  j["system"] = system_to_json(d.decided);
  if (!d.note.empty()) j["note"] = d.note;
  if (d.witness) j["witness"] = graph_to_json(*d.witness);
  if (d.certificate)
    j["certificate"] = certificate_to_json(WeightedPathSystem::unit(strip_trivial(d.decided)), *d.certificate);
  if (d.evidence.searched) {
    json e;
    e["budget_hit"] = d.evidence.budget_hit;
    if (d.evidence.gray_partner) {
      e["gray_partner"] = system_to_json(*d.evidence.gray_partner);
      if (d.evidence.manifold) e["manifold"] = manifold_to_json(d.decided.names, *d.evidence.manifold);
    }
    j["evidence"] = e;
  }
  json st = {{"lp_pivots", d.stats.lp_pivots},
             {"oracle_calls", d.stats.oracle_calls},
             {"witness_rounds", d.stats.witness_rounds}};
  if (timing) st["wall_ms"] = d.stats.wall_ms;
  j["stats"] = st;
  return j;
}

}  // namespace usp
