#ifndef FGEN_JSON_UTIL_HPP_INCLUDED
#define FGEN_JSON_UTIL_HPP_INCLUDED

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fgen/error.hpp"

namespace fgen {

using Json = nlohmann::ordered_json;

/// Rounds to 9 significant digits. Output documents carry rounded values so
/// that identical inputs serialize to identical bytes on every run.
inline double round_sig9(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return std::strtod(buf, nullptr);
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

namespace json_detail {

inline std::string where(std::string_view ctx, std::string_view key) {
  std::string out(ctx);
  if (!out.empty()) out += '.';
  out += key;
  return out;
}

}  // namespace json_detail

inline const Json& require(const Json& j, std::string_view key, std::string_view ctx) {
  if (!j.is_object()) throw ParseError("expected an object", std::string(ctx));
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError("missing required key '" + std::string(key) + "'",
                     json_detail::where(ctx, key));
  }
  return *it;
}

inline std::string require_string(const Json& j, std::string_view key, std::string_view ctx) {
  const Json& v = require(j, key, ctx);
  if (!v.is_string()) throw ParseError("expected a string", json_detail::where(ctx, key));
  return v.get<std::string>();
}

inline double require_number(const Json& j, std::string_view key, std::string_view ctx) {
  const Json& v = require(j, key, ctx);
  if (!v.is_number()) throw ParseError("expected a number", json_detail::where(ctx, key));
  return v.get<double>();
}

inline const Json& require_array(const Json& j, std::string_view key, std::string_view ctx) {
  const Json& v = require(j, key, ctx);
  if (!v.is_array()) throw ParseError("expected an array", json_detail::where(ctx, key));
  return v;
}

inline Json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed JSON in " + std::string(what) + ": " + e.what(), std::string(what));
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path + "'", path);
  out << text;
}

}  // namespace fgen

#endif  // FGEN_JSON_UTIL_HPP_INCLUDED
