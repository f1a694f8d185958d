#ifndef FGEN_REQUIREMENTS_HPP_INCLUDED
#define FGEN_REQUIREMENTS_HPP_INCLUDED

#include <algorithm>
#include <concepts>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgen/catalog.hpp"
#include "fgen/error.hpp"
#include "fgen/json_util.hpp"

namespace fgen {

enum class RequirementKind { Max, Min, Equals, OneOf };

inline std::string_view to_string(RequirementKind k) {
  switch (k) {
    case RequirementKind::Max: return "max";
    case RequirementKind::Min: return "min";
    case RequirementKind::Equals: return "equals";
    case RequirementKind::OneOf: return "oneOf";
  }
  return "max";
}

struct Requirement {
  std::string attributeKey;
  RequirementKind kind = RequirementKind::Max;
  std::optional<double> numericBound;
  std::optional<std::string> textValue;
  std::optional<std::set<std::string>> textSet;

  static Requirement max(std::string key, double bound) {
    return {std::move(key), RequirementKind::Max, bound, std::nullopt, std::nullopt};
  }
  static Requirement min(std::string key, double bound) {
    return {std::move(key), RequirementKind::Min, bound, std::nullopt, std::nullopt};
  }
  static Requirement equals(std::string key, std::string value) {
    return {std::move(key), RequirementKind::Equals, std::nullopt, std::move(value), std::nullopt};
  }
  static Requirement one_of(std::string key, std::set<std::string> values) {
    return {std::move(key), RequirementKind::OneOf, std::nullopt, std::nullopt, std::move(values)};
  }

  bool numeric() const { return kind == RequirementKind::Max || kind == RequirementKind::Min; }

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

/// Anything requirements can be checked against: images and services.
template <class T>
concept Alternative = requires(const T& a, std::string_view key) {
  { a.id } -> std::convertible_to<std::string>;
  { a.numeric_value(key) } -> std::same_as<std::optional<double>>;
  { a.text_value(key) } -> std::same_as<std::optional<std::string>>;
};

/// Shape check: Max/Min carry only a bound, Equals only a value, OneOf only a
/// non-empty set.
inline void validate_shape(const Requirement& r) {
  const bool ok = [&] {
    switch (r.kind) {
      case RequirementKind::Max:
      case RequirementKind::Min:
        return r.numericBound.has_value() && !r.textValue && !r.textSet;
      case RequirementKind::Equals:
        return !r.numericBound && r.textValue.has_value() && !r.textSet;
      case RequirementKind::OneOf:
        return !r.numericBound && !r.textValue && r.textSet && !r.textSet->empty();
    }
    return false;
  }();
  if (!ok)
    throw ValidationError("malformed " + std::string(to_string(r.kind)) + " requirement on '" +
                              r.attributeKey + "'",
                          r.attributeKey);
}

/// Rejects numeric requirements on non-numerical attributes and vice versa.
/// Keys unknown to `specs` pass; they are custom attributes.
inline void validate_requirements(std::span<const Requirement> reqs, const AttributeSpecs& specs) {
  for (const auto& r : reqs) {
    validate_shape(r);
    if (r.numeric() && specs.find_non_numerical(r.attributeKey))
      throw TypeMismatch("numeric requirement on non-numerical attribute '" + r.attributeKey + "'",
                         r.attributeKey);
    if (!r.numeric() && specs.find_numerical(r.attributeKey))
      throw TypeMismatch("text requirement on numerical attribute '" + r.attributeKey + "'",
                         r.attributeKey);
  }
}

/// Strict satisficing check. An absent attribute fails the requirement.
template <Alternative A>
bool check(const Requirement& r, const A& alternative) {
  if (r.numeric()) {
    auto v = alternative.numeric_value(r.attributeKey);
    if (!v) {
      if (alternative.text_value(r.attributeKey))
        throw TypeMismatch("numeric requirement on text attribute '" + r.attributeKey + "' of '" +
                               std::string(alternative.id) + "'",
                           r.attributeKey);
      return false;
    }
    return r.kind == RequirementKind::Max ? *v < *r.numericBound : *v > *r.numericBound;
  }
  auto v = alternative.text_value(r.attributeKey);
  if (!v) {
    if (alternative.numeric_value(r.attributeKey))
      throw TypeMismatch("text requirement on numerical attribute '" + r.attributeKey + "' of '" +
                             std::string(alternative.id) + "'",
                         r.attributeKey);
    return false;
  }
  if (r.kind == RequirementKind::Equals) return *v == *r.textValue;
  return r.textSet->contains(*v);
}

/// Indices of the requirements an alternative violates.
template <Alternative A>
std::vector<std::size_t> violated(std::span<const Requirement> reqs, const A& alternative) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < reqs.size(); ++k)
    if (!check(reqs[k], alternative)) out.push_back(k);
  return out;
}

struct FilterOutcome {
  std::vector<std::string> survivors;
  std::size_t relaxationLevel = 0;
  /// For each survivor, the requirement indices it violates.
  std::map<std::string, std::vector<std::size_t>> droppedSets;

  bool survives(std::string_view id) const {
    return std::binary_search(survivors.begin(), survivors.end(), id);
  }
};

/// Conjunctive filter with drop-k relaxation. Level k admits every
/// alternative that satisfies all requirements of some subset of size
/// |R| - k, which under union semantics is exactly "violates at most k". The
/// level rises until the survivor set is non-empty. With `relax` false the
/// level stays 0 and survivors may be empty.
template <Alternative A>
FilterOutcome filter(std::span<const Requirement> reqs, std::span<const A* const> alternatives,
                     bool relax = true) {
  std::vector<std::pair<const A*, std::vector<std::size_t>>> table;
  table.reserve(alternatives.size());
  std::size_t fewest = reqs.size();
  for (const A* a : alternatives) {
    auto v = violated(reqs, *a);
    fewest = std::min(fewest, v.size());
    table.emplace_back(a, std::move(v));
  }
  FilterOutcome out;
  if (table.empty()) return out;
  out.relaxationLevel = relax ? fewest : 0;
  for (auto& [a, v] : table) {
    if (v.size() > out.relaxationLevel) continue;
    out.survivors.push_back(a->id);
    out.droppedSets.emplace(a->id, std::move(v));
  }
  std::sort(out.survivors.begin(), out.survivors.end());
  return out;
}

/// Ids (sorted) of the alternatives violating at most `level` requirements.
template <Alternative A>
std::vector<std::string> survivors_at_level(std::span<const Requirement> reqs,
                                            std::span<const A* const> alternatives,
                                            std::size_t level) {
  std::vector<std::string> out;
  for (const A* a : alternatives)
    if (violated(reqs, *a).size() <= level) out.push_back(a->id);
  std::sort(out.begin(), out.end());
  return out;
}

template <Alternative A>
FilterOutcome filter(std::span<const Requirement> reqs, const std::vector<A>& alternatives,
                     bool relax = true) {
  std::vector<const A*> ptrs;
  ptrs.reserve(alternatives.size());
  for (const auto& a : alternatives) ptrs.push_back(&a);
  return filter<A>(reqs, std::span<const A* const>(ptrs), relax);
}

// ---------------------------------------------------------------------------
// JSON: {attr, kind: "max"|"min"|"equals"|"oneOf", value | values[]}

inline Requirement requirement_from_json(const Json& j) {
  const std::string key = require_string(j, "attr", "requirement");
  const std::string kind = require_string(j, "kind", "requirement[" + key + "]");
  const std::string ctx = "requirement[" + key + "]";
  if (kind == "max") return Requirement::max(key, require_number(j, "value", ctx));
  if (kind == "min") return Requirement::min(key, require_number(j, "value", ctx));
  if (kind == "equals") return Requirement::equals(key, require_string(j, "value", ctx));
  if (kind == "oneOf") {
    std::set<std::string> values;
    for (const auto& v : require_array(j, "values", ctx)) {
      if (!v.is_string()) throw ParseError("expected a string", ctx + ".values");
      values.insert(v.get<std::string>());
    }
    if (values.empty()) throw ValidationError("oneOf requirement with no values", ctx);
    return Requirement::one_of(key, std::move(values));
  }
  throw ParseError("unknown requirement kind '" + kind + "'", ctx + ".kind");
}

inline std::vector<Requirement> requirements_from_json(const Json& arr, std::string_view ctx) {
  if (!arr.is_array()) throw ParseError("expected an array", std::string(ctx));
  std::vector<Requirement> out;
  for (const auto& j : arr) out.push_back(requirement_from_json(j));
  return out;
}

inline Json to_json(const Requirement& r) {
  Json j;
  j["attr"] = r.attributeKey;
  j["kind"] = std::string(to_string(r.kind));
  if (r.numericBound) j["value"] = *r.numericBound;
  if (r.textValue) j["value"] = *r.textValue;
  if (r.textSet) {
    j["values"] = Json::array();
    for (const auto& v : *r.textSet) j["values"].push_back(v);
  }
  return j;
}

}  // namespace fgen

#endif  // FGEN_REQUIREMENTS_HPP_INCLUDED
