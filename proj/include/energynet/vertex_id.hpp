#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <variant>

namespace energynet {

// Opaque vertex identifier: either an integer (geometric integers family)
// or a string (binary tree addresses like "", "0", "01"). The variant order
// gives a total order: all integer ids sort before all string ids.
using VertexId = std::variant<std::int64_t, std::string>;

inline std::string to_string(const VertexId& id) {
  if (const auto* n = std::get_if<std::int64_t>(&id)) return std::to_string(*n);
  return std::get<std::string>(id);
}

inline bool is_integer(const VertexId& id) {
  return std::holds_alternative<std::int64_t>(id);
}

// Parses an id from text: integral tokens become integer ids, everything
// else stays a string.
inline VertexId parse_vertex_id(const std::string& text) {
  if (!text.empty()) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc{} && ptr == last) return VertexId{value};
  }
  return VertexId{text};
}

}  // namespace energynet
