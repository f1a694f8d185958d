#ifndef FGEN_FORMATION_HPP_INCLUDED
#define FGEN_FORMATION_HPP_INCLUDED

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "fgen/error.hpp"
#include "fgen/json_util.hpp"

namespace fgen {

struct Component {
  std::string id;
  std::string feature;
  friend bool operator==(const Component&, const Component&) = default;
};

/// Expected traffic cost on one interconnection, all four figures attached to
/// the unordered link.
struct TrafficCostEstimate {
  std::string from;
  std::string to;
  double localReceive = 0.0;
  double localSend = 0.0;
  double internetReceive = 0.0;
  double internetSend = 0.0;
  friend bool operator==(const TrafficCostEstimate&, const TrafficCostEstimate&) = default;
};

struct CommittedSolution {
  std::string componentId;
  std::string imageId;
  std::string serviceId;
  double score = 0.0;
  friend bool operator==(const CommittedSolution&, const CommittedSolution&) = default;
};

class Formation {
 public:
  const std::vector<Component>& components() const { return components_; }
  /// Interconnections as (min, max) id pairs.
  const std::set<std::pair<std::string, std::string>>& interconnections() const { return links_; }
  const std::vector<TrafficCostEstimate>& traffic() const { return traffic_; }
  const std::map<std::string, CommittedSolution>& committed() const { return committed_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const Component* find(std::string_view id) const {
    for (const auto& c : components_)
      if (c.id == id) return &c;
    return nullptr;
  }
  bool is_committed(std::string_view id) const { return committed_.contains(std::string(id)); }
  bool connected(std::string_view a, std::string_view b) const {
    return links_.contains(canonical(std::string(a), std::string(b)));
  }
  /// Traffic estimate for a link; direction of the stored entry is irrelevant.
  const TrafficCostEstimate* traffic_for(std::string_view a, std::string_view b) const {
    for (const auto& t : traffic_)
      if ((t.from == a && t.to == b) || (t.from == b && t.to == a)) return &t;
    return nullptr;
  }

  void commit(CommittedSolution solution) {
    if (!find(solution.componentId))
      throw UnknownComponent("unknown component '" + solution.componentId + "'",
                             solution.componentId);
    committed_[solution.componentId] = std::move(solution);
  }

  friend bool operator==(const Formation& a, const Formation& b) {
    return a.components_ == b.components_ && a.links_ == b.links_ && a.traffic_ == b.traffic_ &&
           a.committed_ == b.committed_;
  }

  static std::pair<std::string, std::string> canonical(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
  }

 private:
  friend Formation define_formation(std::vector<Component>,
                                    std::vector<std::pair<std::string, std::string>>,
                                    std::vector<TrafficCostEstimate>);

  std::vector<Component> components_;
  std::set<std::pair<std::string, std::string>> links_;
  std::vector<TrafficCostEstimate> traffic_;
  std::map<std::string, CommittedSolution> committed_;
  std::vector<std::string> warnings_;
};

/// Builds a validated formation with nothing committed. Interconnected pairs
/// without a traffic estimate get an all-zero estimate and a warning.
inline Formation define_formation(std::vector<Component> components,
                                  std::vector<std::pair<std::string, std::string>> interconnections,
                                  std::vector<TrafficCostEstimate> traffic) {
  if (components.empty()) throw ValidationError("formation has no components", "components");
  Formation f;
  std::set<std::string> ids;
  for (const auto& c : components) {
    if (c.id.empty()) throw ValidationError("component with empty id", "components");
    if (!ids.insert(c.id).second)
      throw ValidationError("duplicate component id '" + c.id + "'", "components[" + c.id + "]");
    if (c.feature.empty())
      throw ValidationError("component '" + c.id + "' has no software feature",
                            "components[" + c.id + "].feature");
  }
  for (auto& [a, b] : interconnections) {
    for (const auto* end : {&a, &b})
      if (!ids.contains(*end))
        throw ValidationError("interconnection references unknown component '" + *end + "'",
                              "links[" + a + "," + b + "]");
    if (a == b) throw ValidationError("component '" + a + "' linked to itself", "links");
    f.links_.insert(Formation::canonical(a, b));
  }
  std::set<std::pair<std::string, std::string>> costed;
  for (const auto& t : traffic) {
    const std::string where = "links[" + t.from + "," + t.to + "]";
    if (!f.links_.contains(Formation::canonical(t.from, t.to)))
      throw ValidationError("traffic estimate for a pair that is not interconnected", where);
    for (double v : {t.localReceive, t.localSend, t.internetReceive, t.internetSend})
      if (!(v >= 0.0)) throw ValidationError("traffic cost must be non-negative", where);
    if (!costed.insert(Formation::canonical(t.from, t.to)).second)
      throw ValidationError("duplicate traffic estimate", where);
  }
  f.traffic_ = std::move(traffic);
  for (auto& t : f.traffic_)
    if (t.to < t.from) std::swap(t.from, t.to);
  for (const auto& [a, b] : f.links_) {
    if (!costed.contains({a, b})) {
      f.warnings_.push_back("no traffic estimate for link (" + a + ", " + b +
                            "); assuming zero costs");
      f.traffic_.push_back({a, b, 0.0, 0.0, 0.0, 0.0});
    }
  }
  std::sort(f.traffic_.begin(), f.traffic_.end(), [](const auto& x, const auto& y) {
    return std::tie(x.from, x.to) < std::tie(y.from, y.to);
  });
  f.components_ = std::move(components);
  return f;
}

struct RelatedCommitment {
  CommittedSolution neighbor;
  TrafficCostEstimate traffic;
};

/// Committed components linked to `componentId`, in neighbor-id order.
inline std::vector<RelatedCommitment> related_committed(const Formation& f,
                                                        std::string_view componentId) {
  if (!f.find(componentId))
    throw UnknownComponent("unknown component '" + std::string(componentId) + "'",
                           std::string(componentId));
  std::vector<RelatedCommitment> out;
  for (const auto& [id, solution] : f.committed()) {
    if (id == componentId || !f.connected(componentId, id)) continue;
    const auto* t = f.traffic_for(componentId, id);
    out.push_back({solution, t ? *t : TrafficCostEstimate{std::string(componentId), id}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON document: components[] {id, feature}, links[] {a, b, costs{...}}

inline Formation formation_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("formation document must be an object", "");
  std::vector<Component> components;
  for (const auto& c : require_array(doc, "components", ""))
    components.push_back({require_string(c, "id", "components[]"),
                          require_string(c, "feature", "components[]")});
  std::vector<std::pair<std::string, std::string>> links;
  std::vector<TrafficCostEstimate> traffic;
  if (doc.contains("links")) {
    for (const auto& l : require_array(doc, "links", "")) {
      auto a = require_string(l, "a", "links[]");
      auto b = require_string(l, "b", "links[]");
      links.emplace_back(a, b);
      if (l.contains("costs")) {
        const Json& c = l["costs"];
        const std::string ctx = "links[" + a + "," + b + "].costs";
        traffic.push_back({a, b, require_number(c, "localRecv", ctx),
                           require_number(c, "localSend", ctx), require_number(c, "inetRecv", ctx),
                           require_number(c, "inetSend", ctx)});
      }
    }
  }
  Formation f = define_formation(std::move(components), std::move(links), std::move(traffic));
  if (doc.contains("committed")) {
    for (const auto& c : require_array(doc, "committed", "")) {
      f.commit({require_string(c, "component", "committed[]"),
                require_string(c, "image", "committed[]"),
                require_string(c, "service", "committed[]"),
                c.contains("score") ? require_number(c, "score", "committed[]") : 0.0});
    }
  }
  return f;
}

inline Formation load_formation(const std::string& path) {
  return formation_from_json(read_json_file(path));
}

inline Json to_json(const Formation& f) {
  Json doc;
  doc["components"] = Json::array();
  for (const auto& c : f.components())
    doc["components"].push_back({{"id", c.id}, {"feature", c.feature}});
  doc["links"] = Json::array();
  for (const auto& [a, b] : f.interconnections()) {
    const auto* t = f.traffic_for(a, b);
    Json costs = {{"localRecv", t ? t->localReceive : 0.0},
                  {"localSend", t ? t->localSend : 0.0},
                  {"inetRecv", t ? t->internetReceive : 0.0},
                  {"inetSend", t ? t->internetSend : 0.0}};
    doc["links"].push_back({{"a", a}, {"b", b}, {"costs", std::move(costs)}});
  }
  if (!f.committed().empty()) {
    doc["committed"] = Json::array();
    for (const auto& [id, s] : f.committed())
      doc["committed"].push_back(
          {{"component", id}, {"image", s.imageId}, {"service", s.serviceId}, {"score", s.score}});
  }
  return doc;
}

}  // namespace fgen

#endif  // FGEN_FORMATION_HPP_INCLUDED
