#ifndef FGEN_AHP_HPP_INCLUDED
#define FGEN_AHP_HPP_INCLUDED

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fgen/catalog.hpp"
#include "fgen/error.hpp"
#include "fgen/json_util.hpp"

namespace fgen {

inline constexpr double kReciprocityTolerance = 1e-9;

/// Square reciprocal comparison matrix on the 1/9..9 scale.
class PairwiseMatrix {
 public:
  /// Validates diagonal, reciprocity and scale bounds.
  static PairwiseMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    if (n == 0) throw InvalidMatrix("comparison matrix is empty");
    PairwiseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw InvalidMatrix("comparison matrix is not square");
      for (std::size_t j = 0; j < n; ++j) m.entries_[i * n + j] = rows[i][j];
    }
    m.validate();
    return m;
  }

  static PairwiseMatrix uniform(std::size_t n) {
    PairwiseMatrix m(n);
    std::fill(m.entries_.begin(), m.entries_.end(), 1.0);
    return m;
  }

  /// Perfectly consistent matrix with entries w_i / w_j.
  static PairwiseMatrix from_weights(std::span<const double> w) {
    PairwiseMatrix m(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = 0; j < w.size(); ++j) m.entries_[i * w.size() + j] = w[i] / w[j];
    m.validate();
    return m;
  }

  std::size_t order() const { return order_; }
  double at(std::size_t i, std::size_t j) const { return entries_[i * order_ + j]; }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(order_, std::vector<double>(order_));
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = 0; j < order_; ++j) out[i][j] = at(i, j);
    return out;
  }

  PairwiseMatrix principal_submatrix(std::span<const std::size_t> keep) const {
    PairwiseMatrix m(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t j = 0; j < keep.size(); ++j)
        m.entries_[i * keep.size() + j] = at(keep[i], keep[j]);
    return m;
  }

  friend bool operator==(const PairwiseMatrix&, const PairwiseMatrix&) = default;

 private:
  explicit PairwiseMatrix(std::size_t n) : order_(n), entries_(n * n, 1.0) {}

  void validate() const {
    constexpr double lo = 1.0 / 9.0 - 1e-12;
    constexpr double hi = 9.0 + 1e-12;
    for (std::size_t i = 0; i < order_; ++i) {
      if (std::abs(at(i, i) - 1.0) > kReciprocityTolerance)
        throw InvalidMatrix("diagonal entry " + std::to_string(i) + " is not 1");
      for (std::size_t j = 0; j < order_; ++j) {
        const double v = at(i, j);
        if (!std::isfinite(v) || v < lo || v > hi)
          throw InvalidMatrix("entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside the 1/9..9 scale");
        if (std::abs(v - 1.0 / at(j, i)) > kReciprocityTolerance)
          throw InvalidMatrix("entries (" + std::to_string(i) + "," + std::to_string(j) +
                              ") and (" + std::to_string(j) + "," + std::to_string(i) +
                              ") are not reciprocal");
      }
    }
  }

  std::size_t order_;
  std::vector<double> entries_;
};

/// True for the discrete judgments 1..9 and 1/2..1/9.
inline bool is_saaty_value(double v) {
  for (int k = 1; k <= 9; ++k)
    if (std::abs(v - k) <= 1e-9 || std::abs(v - 1.0 / k) <= 1e-9) return true;
  return false;
}

/// Stricter check for user-submitted matrices: every entry must be one of
/// the discrete scale values.
inline void validate_saaty_scale(const PairwiseMatrix& m) {
  for (std::size_t i = 0; i < m.order(); ++i)
    for (std::size_t j = 0; j < m.order(); ++j)
      if (!is_saaty_value(m.at(i, j)))
        throw InvalidMatrix("entry (" + std::to_string(i) + "," + std::to_string(j) +
                            ") is not a 1..9 scale judgment");
}

/// Priority weights as normalized row geometric means.
inline std::vector<double> derive_weights(const PairwiseMatrix& m) {
  const std::size_t n = m.order();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double logSum = 0.0;
    for (std::size_t j = 0; j < n; ++j) logSum += std::log(m.at(i, j));
    w[i] = std::exp(logSum / static_cast<double>(n));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return w;
}

/// Random consistency index by matrix order (Saaty; orders 11-15 from the
/// extended table).
inline double random_index(std::size_t n) {
  static constexpr std::array<double, 16> table = {0.0,  0.0,  0.0,  0.58, 0.90, 1.12,
                                                   1.24, 1.32, 1.41, 1.45, 1.49, 1.51,
                                                   1.54, 1.56, 1.57, 1.59};
  return n < table.size() ? table[n] : table.back();
}

inline double principal_eigenvalue_estimate(const PairwiseMatrix& m, std::span<const double> w) {
  const std::size_t n = m.order();
  double lambda = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += m.at(i, j) * w[j];
    lambda += row / w[i];
  }
  return lambda / static_cast<double>(n);
}

/// CR = CI / RI with lambda_max estimated from the derived weights. Orders
/// up to 2 are always consistent.
inline double consistency_ratio(const PairwiseMatrix& m) {
  const std::size_t n = m.order();
  if (n <= 2) return 0.0;
  const auto w = derive_weights(m);
  const double lambda = principal_eigenvalue_estimate(m, w);
  const double ci = (lambda - static_cast<double>(n)) / static_cast<double>(n - 1);
  return std::max(0.0, ci / random_index(n));
}

inline constexpr double kConsistencyThreshold = 0.1;

/// Distributive normalization: x_i / sum(x). All-zero input maps to 1/N.
inline std::vector<double> normalize_values(std::span<const double> values) {
  std::vector<double> out(values.size());
  double total = 0.0;
  for (double v : values) {
    if (v < 0.0) throw NegativeValue("cannot normalize a negative value");
    total += v;
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = total > 0.0 ? values[i] / total : 1.0 / static_cast<double>(values.size());
  return out;
}

inline std::map<std::string, double> normalize_criterion(
    std::span<const std::pair<std::string, double>> values) {
  std::vector<double> raw;
  raw.reserve(values.size());
  for (const auto& [id, v] : values) {
    if (v < 0.0) throw NegativeValue("negative criterion value for '" + id + "'", id);
    raw.push_back(v);
  }
  const auto norm = normalize_values(raw);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < values.size(); ++i) out[values[i].first] = norm[i];
  return out;
}

// ---------------------------------------------------------------------------
// Criteria hierarchies

struct CriteriaNode {
  std::string id;
  std::string label;
  std::vector<CriteriaNode> children;
  /// Set on leaves only.
  std::optional<std::string> attribute;
  Influence influence = Influence::None;

  bool is_leaf() const { return children.empty(); }
};

struct LeafCriterion {
  std::string criterionId;
  std::string attributeKey;
  Influence influence;
};

class CriteriaHierarchy {
 public:
  explicit CriteriaHierarchy(CriteriaNode root) : root_(std::move(root)) { validate(); }

  const CriteriaNode& root() const { return root_; }

  std::vector<LeafCriterion> leaves() const {
    std::vector<LeafCriterion> out;
    visit(root_, [&](const CriteriaNode& n) {
      if (n.is_leaf()) out.push_back({n.id, *n.attribute, n.influence});
    });
    return out;
  }

  std::vector<const CriteriaNode*> internal_nodes() const {
    std::vector<const CriteriaNode*> out;
    visit(root_, [&](const CriteriaNode& n) {
      if (!n.is_leaf()) out.push_back(&n);
    });
    return out;
  }

  std::size_t goal_count() const { return internal_nodes().size(); }

  const CriteriaNode* find(std::string_view id) const {
    const CriteriaNode* hit = nullptr;
    visit(root_, [&](const CriteriaNode& n) {
      if (n.id == id) hit = &n;
    });
    return hit;
  }

  /// Keeps only the listed leaves; goals left without children disappear.
  CriteriaHierarchy prune(const std::set<std::string>& keepLeaves) const {
    std::function<std::optional<CriteriaNode>(const CriteriaNode&)> rec =
        [&](const CriteriaNode& n) -> std::optional<CriteriaNode> {
      if (n.is_leaf()) return keepLeaves.contains(n.id) ? std::optional(n) : std::nullopt;
      CriteriaNode copy{n.id, n.label, {}, std::nullopt, Influence::None};
      for (const auto& c : n.children)
        if (auto kept = rec(c)) copy.children.push_back(std::move(*kept));
      if (copy.children.empty()) return std::nullopt;
      return copy;
    };
    auto pruned = rec(root_);
    if (!pruned) throw InvalidHierarchy("pruning removed every criterion", root_.id);
    return CriteriaHierarchy(std::move(*pruned));
  }

  /// Overrides leaf influences with the catalog's specs and rejects
  /// attributes whose influence is None.
  CriteriaHierarchy bind(const AttributeSpecs& specs) const {
    CriteriaNode copy = root_;
    std::function<void(CriteriaNode&)> rec = [&](CriteriaNode& n) {
      if (n.is_leaf()) {
        if (const auto* s = specs.find_numerical(*n.attribute)) n.influence = s->influence;
        if (specs.find_non_numerical(*n.attribute))
          throw InvalidHierarchy("criterion '" + n.id + "' uses non-numerical attribute '" +
                                     *n.attribute + "'",
                                 n.id);
      }
      for (auto& c : n.children) rec(c);
    };
    rec(copy);
    return CriteriaHierarchy(std::move(copy));
  }

 private:
  template <class F>
  static void visit(const CriteriaNode& n, F&& f) {
    f(n);
    for (const auto& c : n.children) visit(c, f);
  }

  void validate() const {
    std::set<std::string> ids;
    visit(root_, [&](const CriteriaNode& n) {
      if (n.id.empty()) throw InvalidHierarchy("criteria node with empty id");
      if (!ids.insert(n.id).second) throw InvalidHierarchy("duplicate node id '" + n.id + "'", n.id);
      if (n.is_leaf()) {
        if (!n.attribute)
          throw InvalidHierarchy("leaf '" + n.id + "' has no attribute", n.id);
        if (n.influence == Influence::None)
          throw InvalidHierarchy("leaf '" + n.id + "' maps to non-influential attribute '" +
                                     *n.attribute + "'",
                                 n.id);
      } else if (n.attribute) {
        throw InvalidHierarchy("goal '" + n.id + "' carries an attribute", n.id);
      }
    });
    if (root_.is_leaf()) throw InvalidHierarchy("root must be a goal", root_.id);
  }

  CriteriaNode root_;
};

namespace ahp_detail {

inline CriteriaNode leaf(std::string id, std::string_view attribute, Influence influence) {
  return {std::move(id), std::string(attribute), {}, std::string(attribute), influence};
}

inline CriteriaNode goal(std::string id, std::string label, std::vector<CriteriaNode> children) {
  return {std::move(id), std::move(label), std::move(children), std::nullopt, Influence::None};
}

}  // namespace ahp_detail

/// Image goals: every influential image attribute under its own goal.
inline CriteriaNode default_image_tree() {
  using namespace ahp_detail;
  using enum Influence;
  return goal("image", "VM image value",
              {goal("image-cost", "Cost", {leaf("license-price", attr::HourlyLicensePrice, Negative)}),
               goal("image-reputation", "Reputation", {leaf("popularity", attr::Popularity, Positive)}),
               goal("image-maturity", "Maturity", {leaf("age", attr::Age, Positive)})});
}

/// Service goals: three goals of five criteria each.
inline CriteriaNode default_service_tree() {
  using namespace ahp_detail;
  using enum Influence;
  return goal(
      "service", "Infrastructure service value",
      {goal("service-cost", "Cost",
            {leaf("cpu-price", attr::HourlyCpuPrice, Negative),
             leaf("network-send-price", attr::NetworkSendPrice, Negative),
             leaf("network-receive-price", attr::NetworkReceivePrice, Negative),
             leaf("internet-send-price", attr::InternetSendPrice, Negative),
             leaf("internet-receive-price", attr::InternetReceivePrice, Negative)}),
       goal("service-performance", "Performance",
            {leaf("cpu-performance", attr::CpuPerformance, Positive),
             leaf("ram-performance", attr::RamPerformance, Positive),
             leaf("disk-performance", attr::DiskPerformance, Positive),
             leaf("max-latency", attr::MaxLatency, Negative),
             leaf("avg-latency", attr::AvgLatency, Negative)}),
       goal("service-resources", "Resources & reliability",
            {leaf("cpu-cores", attr::CpuCores, Positive), leaf("ram-size", attr::RamSize, Positive),
             leaf("disk-size", attr::DiskSize, Positive), leaf("uptime", attr::Uptime, Positive),
             leaf("service-popularity", attr::ServicePopularity, Positive)})});
}

/// Single hierarchy whose two subtrees are the image and service trees.
inline CriteriaNode default_integrated_tree() {
  return ahp_detail::goal("combined", "Combined solution value",
                          {default_image_tree(), default_service_tree()});
}

inline CriteriaHierarchy default_image_hierarchy() { return CriteriaHierarchy(default_image_tree()); }
inline CriteriaHierarchy default_service_hierarchy() {
  return CriteriaHierarchy(default_service_tree());
}
inline CriteriaHierarchy default_integrated_hierarchy() {
  return CriteriaHierarchy(default_integrated_tree());
}

using MatrixSet = std::map<std::string, PairwiseMatrix>;

/// Equal comparisons for every goal.
inline MatrixSet uniform_matrices(const CriteriaHierarchy& h) {
  MatrixSet out;
  for (const auto* n : h.internal_nodes())
    out.emplace(n->id, PairwiseMatrix::uniform(n->children.size()));
  return out;
}

/// Carries matrices from `before` over to a pruned `after`, keeping the
/// judgments between surviving children.
inline MatrixSet restrict_matrices(const CriteriaHierarchy& before, const CriteriaHierarchy& after,
                                   const MatrixSet& matrices) {
  MatrixSet out;
  for (const auto* n : after.internal_nodes()) {
    const auto* old = before.find(n->id);
    auto it = matrices.find(n->id);
    if (!old || it == matrices.end()) continue;
    std::vector<std::size_t> keep;
    for (const auto& c : n->children)
      for (std::size_t k = 0; k < old->children.size(); ++k)
        if (old->children[k].id == c.id) keep.push_back(k);
    out.emplace(n->id, it->second.principal_submatrix(keep));
  }
  return out;
}

struct WeightVector {
  std::map<std::string, double> weights;

  double at(const std::string& id) const { return weights.at(id); }
  double sum() const {
    double s = 0.0;
    for (const auto& [_, w] : weights) s += w;
    return s;
  }
};

/// Global leaf weights: products of sibling weights along each root-to-leaf
/// path. Goals with a single child need no matrix.
inline WeightVector global_weights(const CriteriaHierarchy& h, const MatrixSet& matrices) {
  WeightVector out;
  std::function<void(const CriteriaNode&, double)> rec = [&](const CriteriaNode& n, double w) {
    if (n.is_leaf()) {
      out.weights[n.id] = w;
      return;
    }
    std::vector<double> local(1, 1.0);
    if (n.children.size() > 1) {
      auto it = matrices.find(n.id);
      if (it == matrices.end())
        throw MissingMatrix("goal '" + n.id + "' has no comparison matrix", n.id);
      if (it->second.order() != n.children.size())
        throw InvalidMatrix("matrix for '" + n.id + "' has order " +
                                std::to_string(it->second.order()) + " but the goal has " +
                                std::to_string(n.children.size()) + " children",
                            n.id);
      local = derive_weights(it->second);
    }
    for (std::size_t k = 0; k < n.children.size(); ++k) rec(n.children[k], w * local[k]);
  };
  rec(h.root(), 1.0);
  return out;
}

struct LeafWeight {
  std::string criterionId;
  std::string attributeKey;
  Influence influence;
  double weight;
};

inline std::vector<LeafWeight> leaf_weights(const CriteriaHierarchy& h, const MatrixSet& matrices) {
  const auto gw = global_weights(h, matrices);
  std::vector<LeafWeight> out;
  for (const auto& l : h.leaves())
    out.push_back({l.criterionId, l.attributeKey, l.influence, gw.at(l.criterionId)});
  return out;
}

/// Goals whose matrix exceeds the consistency threshold, as warnings.
inline std::vector<std::string> consistency_warnings(const MatrixSet& matrices) {
  std::vector<std::string> out;
  for (const auto& [id, m] : matrices) {
    const double cr = consistency_ratio(m);
    if (cr > kConsistencyThreshold) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "comparison matrix for '%s' is inconsistent (CR = %.3f)",
                    id.c_str(), cr);
      out.emplace_back(buf);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline PairwiseMatrix matrix_from_json(const Json& j, std::string_view ctx) {
  if (!j.is_array()) throw ParseError("matrix must be an array of rows", std::string(ctx));
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw ParseError("matrix row must be an array", std::string(ctx));
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw ParseError("matrix entry must be a number", std::string(ctx));
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  try {
    return PairwiseMatrix::from_rows(rows);
  } catch (const InvalidMatrix& e) {
    throw InvalidMatrix(e.what(), std::string(ctx));
  }
}

inline Json to_json(const PairwiseMatrix& m) {
  Json j = Json::array();
  for (const auto& r : m.rows()) j.push_back(r);
  return j;
}

/// Node: {id, label?, attribute?, influence?, children?}
inline CriteriaNode criteria_node_from_json(const Json& j) {
  CriteriaNode n;
  n.id = require_string(j, "id", "hierarchy");
  n.label = j.contains("label") ? require_string(j, "label", n.id) : n.id;
  if (j.contains("children")) {
    for (const auto& c : require_array(j, "children", n.id))
      n.children.push_back(criteria_node_from_json(c));
  }
  if (j.contains("attribute")) n.attribute = require_string(j, "attribute", n.id);
  if (j.contains("influence")) {
    auto inf = parse_influence(require_string(j, "influence", n.id));
    if (!inf) throw ParseError("unknown influence", n.id + ".influence");
    n.influence = *inf;
  } else if (n.attribute) {
    if (const auto* s = builtin_attribute_specs().image.find_numerical(*n.attribute))
      n.influence = s->influence;
    else if (const auto* s2 = builtin_attribute_specs().service.find_numerical(*n.attribute))
      n.influence = s2->influence;
  }
  return n;
}

inline Json to_json(const CriteriaNode& n) {
  Json j;
  j["id"] = n.id;
  j["label"] = n.label;
  if (n.attribute) {
    j["attribute"] = *n.attribute;
    j["influence"] = std::string(to_string(n.influence));
  } else {
    j["children"] = Json::array();
    for (const auto& c : n.children) j["children"].push_back(to_json(c));
  }
  return j;
}

}  // namespace fgen

#endif  // FGEN_AHP_HPP_INCLUDED
