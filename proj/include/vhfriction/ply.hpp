#pragma once

// Minimal ASCII PLY reader. Handles arbitrary elements with scalar and list
// properties; everything is read as double. Binary formats are rejected.

#include "vhfriction/core.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace vhf::ply {

struct Property {
  std::string name;
  std::string type;        // scalar type, or the item type for lists
  bool is_list = false;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
  // Scalar-only elements: rows[i][p]. List properties land in lists[i].
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::vector<double>>> lists;

  std::optional<std::size_t> find(std::string_view prop) const {
    for (std::size_t i = 0; i < properties.size(); ++i)
      if (properties[i].name == prop) return i;
    return std::nullopt;
  }
};

struct Document {
  std::vector<Element> elements;

  const Element* find(std::string_view name) const {
    for (const auto& e : elements)
      if (e.name == name) return &e;
    return nullptr;
  }
};

namespace detail {

inline bool known_type(std::string_view t) {
  static constexpr std::string_view kTypes[] = {
      "char",  "uchar",  "short",   "ushort",  "int",     "uint",   "float",
      "double", "int8",  "uint8",   "int16",   "uint16",  "int32",  "uint32",
      "float32", "float64"};
  for (auto k : kTypes)
    if (k == t) return true;
  return false;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<double> to_double(std::string_view tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

}  // namespace detail

inline Document parse(std::istream& in) {
  using detail::split_ws;
  std::string line;
  std::size_t lineno = 0;

  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    return true;
  };

  if (!next_line() || split_ws(line).empty() || split_ws(line)[0] != "ply")
    throw ParseError("missing 'ply' magic", lineno == 0 ? 1 : lineno);

  Document doc;
  bool have_format = false;
  for (;;) {
    if (!next_line()) throw ParseError("unexpected end of header", lineno + 1);
    auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() != 3 || tok[1] != "ascii")
        throw ParseError("only 'format ascii 1.0' is supported", lineno);
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError("malformed element line", lineno);
      auto n = detail::to_double(tok[2]);
      if (!n || *n < 0 || *n != std::floor(*n))
        throw ParseError("bad element count", lineno);
      Element el;
      el.name = std::string(tok[1]);
      el.count = static_cast<std::size_t>(*n);
      doc.elements.push_back(std::move(el));
    } else if (tok[0] == "property") {
      if (doc.elements.empty()) throw ParseError("property before element", lineno);
      Property p;
      if (tok.size() == 5 && tok[1] == "list") {
        if (!detail::known_type(tok[2]) || !detail::known_type(tok[3]))
          throw ParseError("unknown list property type", lineno);
        p = Property{std::string(tok[4]), std::string(tok[3]), true};
      } else if (tok.size() == 3) {
        if (!detail::known_type(tok[1])) throw ParseError("unknown property type", lineno);
        p = Property{std::string(tok[2]), std::string(tok[1]), false};
      } else {
        throw ParseError("malformed property line", lineno);
      }
      doc.elements.back().properties.push_back(std::move(p));
    } else {
      throw ParseError("unrecognised header keyword '" + std::string(tok[0]) + "'", lineno);
    }
  }
  if (!have_format) throw ParseError("missing format line", lineno);

  for (auto& el : doc.elements) {
    bool has_list = false;
    for (const auto& p : el.properties) has_list |= p.is_list;
    el.rows.reserve(el.count);
    if (has_list) el.lists.reserve(el.count);
    for (std::size_t r = 0; r < el.count; ++r) {
      if (!next_line())
        throw ParseError("expected " + std::to_string(el.count) + " '" + el.name +
                             "' rows, file ended",
                         lineno + 1);
      auto tok = split_ws(line);
      std::size_t t = 0;
      std::vector<double> row;
      std::vector<std::vector<double>> lists;
      row.reserve(el.properties.size());
      for (const auto& p : el.properties) {
        if (t >= tok.size()) throw ParseError("too few values", lineno);
        auto v = detail::to_double(tok[t++]);
        if (!v) throw ParseError("invalid number '" + std::string(tok[t - 1]) + "'", lineno);
        if (!p.is_list) {
          if (!std::isfinite(*v)) throw ParseError("non-finite value", lineno);
          row.push_back(*v);
          continue;
        }
        if (*v < 0 || *v != std::floor(*v)) throw ParseError("bad list length", lineno);
        const auto n = static_cast<std::size_t>(*v);
        std::vector<double> items;
        items.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
          if (t >= tok.size()) throw ParseError("too few list values", lineno);
          auto item = detail::to_double(tok[t++]);
          if (!item || !std::isfinite(*item)) throw ParseError("invalid list value", lineno);
          items.push_back(*item);
        }
        row.push_back(static_cast<double>(n));
        lists.push_back(std::move(items));
      }
      if (t != tok.size()) throw ParseError("too many values", lineno);
      el.rows.push_back(std::move(row));
      if (has_list) el.lists.push_back(std::move(lists));
    }
  }
  return doc;
}

inline Document read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path);
  }
}

// Nine significant digits round-trip any float32 value.
inline std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace vhf::ply
