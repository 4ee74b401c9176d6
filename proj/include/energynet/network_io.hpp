#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "energynet/errors.hpp"
#include "energynet/network.hpp"

namespace energynet {

namespace detail {

inline VertexId vertex_from_json(const nlohmann::json& j, const char* where) {
  if (j.is_number_integer()) return VertexId{j.get<std::int64_t>()};
  if (j.is_string()) return VertexId{j.get<std::string>()};
  throw ValidationError(std::string(where) + ": vertex id must be an integer or a string, got " +
                        j.dump());
}

inline nlohmann::json vertex_to_json(const VertexId& id) {
  if (const auto* n = std::get_if<std::int64_t>(&id)) return *n;
  return std::get<std::string>(id);
}

}  // namespace detail

// Document schema: {"origin": id, "edges": [[a, b, weight], ...]} with each
// unordered pair appearing exactly once. Duplicate pairs are rejected even
// when the weights agree.
inline Network load_network(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("network document: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("network document: top level must be an object");
  if (!doc.contains("origin")) throw ValidationError("network document: missing field 'origin'");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw ValidationError("network document: missing array field 'edges'");

  NetworkBuilder builder;
  builder.origin(detail::vertex_from_json(doc["origin"], "origin"));

  std::set<std::pair<VertexId, VertexId>> seen;
  std::size_t line = 0;
  for (const auto& entry : doc["edges"]) {
    ++line;
    std::string where = "edges[" + std::to_string(line - 1) + "]";
    if (!entry.is_array() || entry.size() != 3)
      throw ValidationError(where + ": expected [id_a, id_b, weight]");
    VertexId a = detail::vertex_from_json(entry[0], where.c_str());
    VertexId b = detail::vertex_from_json(entry[1], where.c_str());
    if (!entry[2].is_number())
      throw ValidationError(where + ": weight must be a number, got " + entry[2].dump());
    double w = entry[2].get<double>();
    auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    if (!seen.insert(key).second)
      throw ValidationError(where + ": duplicate pair (" + to_string(a) + "," + to_string(b) +
                            "); each unordered pair must appear exactly once");
    builder.add_edge(a, b, w);
  }
  return builder.build();
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open network file: " + path);
  try {
    return load_network(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// Canonical serialization: edges sorted with the smaller id first, one entry
// per unordered pair. Structurally equal networks produce identical bytes.
inline std::string save_network(const Network& net) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [key, w] : net.directed_entries()) {
    if (key.first > key.second) continue;
    const VertexId& a = net.vertex_at(key.first);
    const VertexId& b = net.vertex_at(key.second);
    edges.push_back({detail::vertex_to_json(a), detail::vertex_to_json(b), w});
  }
  nlohmann::json doc;
  doc["edges"] = std::move(edges);
  doc["origin"] = detail::vertex_to_json(net.origin());
  return doc.dump(2) + "\n";
}

inline void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << save_network(net);
}

inline bool same_structure(const Network& a, const Network& b) {
  return a.vertices() == b.vertices() && a.origin() == b.origin() &&
         a.directed_entries() == b.directed_entries();
}

}  // namespace energynet
