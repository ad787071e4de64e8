#pragma once

// Lattice spec files are JSON documents:
//
//   {
//     "beta": 1.0,
//     "nodes": [ {"id": "1", "role": "outcome1", "h": 0.0}, ... ],
//     "edges": [ {"a": "1", "b": "a", "j": 1.0}, ... ],
//     "cubic": [ {"nodes": ["3", "4", "7"], "c": 0.1} ],      (optional)
//     "c0": 0.0                                               (optional)
//   }
//
// Roles: outcome1, outcome2, analyzer_a, analyzer_b, hidden. "h" and "j" default
// to 0; "role" defaults to hidden. Unknown keys, unknown roles and duplicate ids
// are rejected. Node order in the file fixes the configuration bit order.

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bellising/error.hpp"
#include "bellising/lattice.hpp"

namespace bellising {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(ErrorKind::Parse, where + ": unknown key '" + key + "'");
  }
}

inline double number_or(const nlohmann::json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(ErrorKind::Parse, where + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline std::string string_at(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    fail(ErrorKind::Parse, where + ": '" + key + "' must be a string");
  }
  return obj.at(key).get<std::string>();
}

}  // namespace detail

inline LatticeSpec lattice_from_json(const nlohmann::json& doc) {
  using detail::number_or;
  using detail::string_at;
  if (!doc.is_object()) fail(ErrorKind::Parse, "lattice spec must be an object");
  detail::reject_unknown_keys(doc, {"beta", "nodes", "edges", "cubic", "c0", "name"}, "spec");
  LatticeSpec spec;
  if (!doc.contains("beta")) fail(ErrorKind::Parse, "spec: missing 'beta'");
  spec.beta = number_or(doc, "beta", 1.0, "spec");
  spec.c0 = number_or(doc, "c0", 0.0, "spec");
  if (!doc.contains("nodes") || !doc.at("nodes").is_array()) fail(ErrorKind::Parse, "spec: 'nodes' must be a list");
  std::size_t i = 0;
  for (const auto& n : doc.at("nodes")) {
    const std::string where = "nodes[" + std::to_string(i++) + "]";
    if (!n.is_object()) fail(ErrorKind::Parse, where + ": expected an object");
    detail::reject_unknown_keys(n, {"id", "role", "h"}, where);
    Node node;
    node.id = string_at(n, "id", where);
    if (n.contains("role")) {
      const auto r = parse_role(string_at(n, "role", where));
      if (!r) fail(ErrorKind::Parse, where + ": unknown role '" + n.at("role").get<std::string>() + "'");
      node.role = *r;
    }
    node.h = number_or(n, "h", 0.0, where);
    for (const auto& prev : spec.nodes) {
      if (prev.id == node.id) fail(ErrorKind::InvalidSpec, where + ": duplicate id '" + node.id + "'");
    }
    spec.nodes.push_back(std::move(node));
  }
  if (doc.contains("edges")) {
    if (!doc.at("edges").is_array()) fail(ErrorKind::Parse, "spec: 'edges' must be a list");
    i = 0;
    for (const auto& e : doc.at("edges")) {
      const std::string where = "edges[" + std::to_string(i++) + "]";
      if (!e.is_object()) fail(ErrorKind::Parse, where + ": expected an object");
      detail::reject_unknown_keys(e, {"a", "b", "j"}, where);
      spec.edges.push_back({string_at(e, "a", where), string_at(e, "b", where), number_or(e, "j", 0.0, where)});
    }
  }
  if (doc.contains("cubic")) {
    if (!doc.at("cubic").is_array()) fail(ErrorKind::Parse, "spec: 'cubic' must be a list");
    i = 0;
    for (const auto& t : doc.at("cubic")) {
      const std::string where = "cubic[" + std::to_string(i++) + "]";
      if (!t.is_object()) fail(ErrorKind::Parse, where + ": expected an object");
      detail::reject_unknown_keys(t, {"nodes", "c"}, where);
      if (!t.contains("nodes") || !t.at("nodes").is_array() || t.at("nodes").size() != 3) {
        fail(ErrorKind::Parse, where + ": 'nodes' must list three ids");
      }
      CubicTerm term;
      for (std::size_t k = 0; k < 3; ++k) {
        if (!t.at("nodes")[k].is_string()) fail(ErrorKind::Parse, where + ": node ids must be strings");
        term.nodes[k] = t.at("nodes")[k].get<std::string>();
      }
      term.c = number_or(t, "c", 0.0, where);
      spec.cubic.push_back(std::move(term));
    }
  }
  return spec;
}

inline nlohmann::json lattice_to_json(const LatticeSpec& spec) {
  nlohmann::json doc;
  doc["beta"] = spec.beta;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& n : spec.nodes) doc["nodes"].push_back({{"id", n.id}, {"role", to_string(n.role)}, {"h", n.h}});
  doc["edges"] = nlohmann::json::array();
  for (const auto& e : spec.edges) doc["edges"].push_back({{"a", e.a}, {"b", e.b}, {"j", e.j}});
  if (!spec.cubic.empty()) {
    doc["cubic"] = nlohmann::json::array();
    for (const auto& t : spec.cubic) {
      doc["cubic"].push_back({{"nodes", {t.nodes[0], t.nodes[1], t.nodes[2]}}, {"c", t.c}});
    }
  }
  if (spec.c0 != 0.0) doc["c0"] = spec.c0;
  return doc;
}

/// Parses a spec document. JSON syntax errors carry the byte offset.
inline LatticeSpec parse_lattice(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Parse, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return lattice_from_json(doc);
}

inline LatticeSpec load_lattice(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_lattice(ss.str());
  } catch (const Error& e) {
    fail(ErrorKind::Parse, path + ": " + e.what());
  }
}

}  // namespace bellising
