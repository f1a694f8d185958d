#ifndef FGEN_COMBINATION_HPP_INCLUDED
#define FGEN_COMBINATION_HPP_INCLUDED

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fgen/ahp.hpp"
#include "fgen/catalog.hpp"
#include "fgen/error.hpp"
#include "fgen/evaluation.hpp"
#include "fgen/formation.hpp"

namespace fgen {

enum class CombineOperator { Sum, Product };

inline std::string_view to_string(CombineOperator op) {
  return op == CombineOperator::Sum ? "sum" : "product";
}

struct CombinationPolicy {
  CombineOperator op = CombineOperator::Sum;
  double wImage = 0.5;
  double wService = 0.5;
  bool applyNetworkDelta = true;

  void validate() const {
    if (!(wImage > 0.0) || !(wService > 0.0) || std::abs(wImage + wService - 1.0) > 1e-9)
      throw ValidationError("combination weights must be positive and sum to 1", "policy");
  }

  /// Weights from the engineer's single image-vs-service comparison.
  static CombinationPolicy from_comparison(const PairwiseMatrix& m, CombineOperator op,
                                           bool applyNetworkDelta) {
    if (m.order() != 2) throw InvalidMatrix("image/service comparison must be 2x2", "policy");
    const auto w = derive_weights(m);
    return {op, w[0], w[1], applyNetworkDelta};
  }
};

struct CombinedSolution {
  std::string imageId;
  std::string serviceId;
  double imageScore = 0.0;
  double serviceScore = 0.0;
  double networkDelta = 0.0;
  double normalizedDelta = 1.0;
  double combinedRaw = 0.0;
  double combinedScore = 0.0;
  bool feasible = false;
};

struct CombinationResult {
  /// Feasible pairs by descending score, ties by (image, service); then
  /// infeasible pairs by (image, service).
  std::vector<CombinedSolution> ranked;
  std::vector<std::string> warnings;

  const CombinedSolution* find(std::string_view image, std::string_view service) const {
    for (const auto& c : ranked)
      if (c.imageId == image && c.serviceId == service) return &c;
    return nullptr;
  }
  std::size_t feasible_count() const {
    return static_cast<std::size_t>(
        std::count_if(ranked.begin(), ranked.end(), [](const auto& c) { return c.feasible; }));
  }
};

/// Commitments of linked neighbors, resolved to catalog indices.
struct NeighborPlacement {
  std::size_t image;
  std::size_t service;
  TrafficCostEstimate traffic;
};

inline std::vector<NeighborPlacement> neighbor_placements(const Formation& formation,
                                                          std::string_view componentId,
                                                          const Catalog& catalog) {
  std::vector<NeighborPlacement> out;
  for (const auto& rc : related_committed(formation, componentId)) {
    auto i = catalog.image_index(rc.neighbor.imageId);
    auto s = catalog.service_index(rc.neighbor.serviceId);
    if (!i || !s)
      throw ValidationError("component '" + rc.neighbor.componentId +
                                "' is committed to ids absent from the catalog",
                            rc.neighbor.componentId);
    out.push_back({*i, *s, rc.traffic});
  }
  return out;
}

inline double network_delta(std::span<const NeighborPlacement> neighbors,
                            const CloudService& candidate, const Catalog& catalog) {
  double delta = 0.0;
  for (const auto& n : neighbors) {
    const auto& placed = catalog.services()[n.service];
    if (placed.providerId == candidate.providerId && placed.location == candidate.location)
      delta += n.traffic.localReceive + n.traffic.localSend;
    else
      delta += n.traffic.internetReceive + n.traffic.internetSend;
  }
  return delta;
}

/// Extra traffic cost of placing `componentId` on `candidate`: local costs
/// toward committed neighbors sharing provider and location, internet costs
/// toward all others. Zero while no linked neighbor is committed.
inline double network_delta(const Formation& formation, std::string_view componentId,
                            const CloudService& candidate, const Catalog& catalog) {
  const auto neighbors = neighbor_placements(formation, componentId, catalog);
  return network_delta(std::span<const NeighborPlacement>(neighbors), candidate, catalog);
}

/// delta / sum, floored at 1 / (count * 10^6). All-zero input maps to 1.
inline std::vector<double> normalize_deltas(std::span<const double> deltas) {
  double total = 0.0;
  for (double d : deltas) {
    if (d < 0.0) throw NegativeValue("negative network delta");
    total += d;
  }
  std::vector<double> out(deltas.size(), 1.0);
  if (total > 0.0) {
    const double floor = degenerate_floor(deltas.size());
    for (std::size_t k = 0; k < deltas.size(); ++k) out[k] = std::max(deltas[k] / total, floor);
  }
  return out;
}

template <class Key>
std::map<Key, double> normalize_deltas(const std::map<Key, double>& deltas) {
  std::vector<double> v;
  v.reserve(deltas.size());
  for (const auto& [_, d] : deltas) v.push_back(d);
  const auto norm = normalize_deltas(std::span<const double>(v));
  std::map<Key, double> out;
  std::size_t k = 0;
  for (const auto& [key, _] : deltas) out.emplace(key, norm[k++]);
  return out;
}

// ---------------------------------------------------------------------------
// Stages of combine(). They are public so the benchmark can time each one.

/// Candidate pairs: requirement survivors of both rankings.
struct PairGrid {
  std::vector<const ScoredAlternative*> images;
  std::vector<const ScoredAlternative*> services;
  std::vector<std::size_t> imageIdx;
  std::vector<std::size_t> serviceIdx;
};

inline PairGrid pair_grid(const EvaluationResult& images, const EvaluationResult& services,
                          const Catalog& catalog) {
  PairGrid g;
  for (const auto& a : images.ranked) {
    if (!a.requirementOk) continue;
    auto idx = catalog.image_index(a.id);
    if (!idx) throw ValidationError("unknown image '" + a.id + "'", a.id);
    g.images.push_back(&a);
    g.imageIdx.push_back(*idx);
  }
  for (const auto& s : services.ranked) {
    if (!s.requirementOk) continue;
    auto idx = catalog.service_index(s.id);
    if (!idx) throw ValidationError("unknown service '" + s.id + "'", s.id);
    g.services.push_back(&s);
    g.serviceIdx.push_back(*idx);
  }
  return g;
}

/// Row-major images x services mask: deployable, and compatible with every
/// committed linked neighbor.
inline std::vector<char> feasibility_mask(const PairGrid& grid, const Catalog& catalog,
                                          std::span<const NeighborPlacement> neighbors) {
  const std::size_t m = grid.imageIdx.size();
  const std::size_t n = grid.serviceIdx.size();
  std::vector<char> imageOk(m, 1);
  std::vector<char> serviceOk(n, 1);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& nb : neighbors)
      if (!catalog.images_compatible(grid.imageIdx[i], nb.image)) imageOk[i] = 0;
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& nb : neighbors)
      if (!catalog.services_compatible(grid.serviceIdx[s], nb.service)) serviceOk[s] = 0;
  std::vector<char> mask(m * n, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t s = 0; s < n; ++s)
      mask[i * n + s] = static_cast<char>(imageOk[i] && serviceOk[s] &&
                                          catalog.deployable(grid.imageIdx[i], grid.serviceIdx[s]));
  return mask;
}

/// Network delta per candidate service.
inline std::vector<double> service_deltas(const PairGrid& grid, const Catalog& catalog,
                                          std::span<const NeighborPlacement> neighbors) {
  std::vector<double> out(grid.serviceIdx.size(), 0.0);
  for (std::size_t s = 0; s < out.size(); ++s)
    out[s] = network_delta(neighbors, catalog.services()[grid.serviceIdx[s]], catalog);
  return out;
}

inline void rank_combined(std::vector<CombinedSolution>& v) {
  std::sort(v.begin(), v.end(), [](const CombinedSolution& a, const CombinedSolution& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.feasible && a.combinedRaw != b.combinedRaw) return a.combinedRaw > b.combinedRaw;
    if (a.imageId != b.imageId) return a.imageId < b.imageId;
    return a.serviceId < b.serviceId;
  });
}

/// Scores a table of pairs whose scores, deltas and feasibility are already
/// known. Deltas are normalized over the feasible pairs.
inline CombinationResult score_pair_table(std::vector<CombinedSolution> pairs,
                                          const CombinationPolicy& policy) {
  policy.validate();
  std::vector<double> feasibleDeltas;
  for (const auto& p : pairs)
    if (p.feasible) feasibleDeltas.push_back(p.networkDelta);
  const auto norm = normalize_deltas(std::span<const double>(feasibleDeltas));
  double total = 0.0;
  for (double d : feasibleDeltas) total += d;
  const double floor = degenerate_floor(feasibleDeltas.size());

  CombinationResult result;
  double best = 0.0;
  std::size_t k = 0;
  for (auto& p : pairs) {
    if (p.feasible) {
      p.normalizedDelta = norm[k++];
    } else {
      p.normalizedDelta = total > 0.0 ? std::max(p.networkDelta / total, floor) : 1.0;
      p.combinedRaw = 0.0;
      continue;
    }
    const double divisor = policy.applyNetworkDelta ? p.normalizedDelta : 1.0;
    const double value = policy.op == CombineOperator::Sum
                             ? policy.wImage * p.imageScore + policy.wService * p.serviceScore
                             : p.imageScore * p.serviceScore;
    p.combinedRaw = value / divisor;
    best = std::max(best, p.combinedRaw);
  }
  for (auto& p : pairs) p.combinedScore = p.feasible && best > 0.0 ? p.combinedRaw / best : 0.0;
  rank_combined(pairs);
  result.ranked = std::move(pairs);
  return result;
}

inline CombinationResult score_pairs(const PairGrid& grid, std::span<const char> mask,
                                     std::span<const double> deltas, const Catalog& catalog,
                                     const CombinationPolicy& policy) {
  const std::size_t n = grid.services.size();
  std::vector<CombinedSolution> pairs;
  pairs.reserve(grid.images.size() * n);
  for (std::size_t i = 0; i < grid.images.size(); ++i) {
    for (std::size_t s = 0; s < n; ++s) {
      CombinedSolution c;
      c.imageId = catalog.images()[grid.imageIdx[i]].id;
      c.serviceId = catalog.services()[grid.serviceIdx[s]].id;
      c.imageScore = grid.images[i]->score;
      c.serviceScore = grid.services[s]->score;
      c.networkDelta = deltas[s];
      c.feasible = mask[i * n + s] != 0;
      pairs.push_back(std::move(c));
    }
  }
  return score_pair_table(std::move(pairs), policy);
}

/// Pairs every surviving image with every surviving service, marks the
/// infeasible ones (score 0) and ranks the rest by the weighted combined
/// value divided by the normalized network delta.
inline CombinationResult combine(const EvaluationResult& images, const EvaluationResult& services,
                                 const Formation& formation, std::string_view componentId,
                                 const Catalog& catalog, const CombinationPolicy& policy) {
  policy.validate();
  const auto neighbors = neighbor_placements(formation, componentId, catalog);
  const auto grid = pair_grid(images, services, catalog);
  const auto mask = feasibility_mask(grid, catalog, neighbors);
  const auto deltas = service_deltas(grid, catalog, neighbors);
  auto result = score_pairs(grid, mask, deltas, catalog, policy);
  if (result.feasible_count() == 0)
    throw NoFeasibleCombination("no feasible image/service combination for component '" +
                                    std::string(componentId) + "'",
                                std::string(componentId));
  return result;
}

inline const CombinedSolution& best_combination(std::span<const CombinedSolution> ranked) {
  if (ranked.empty() || !ranked.front().feasible)
    throw NoFeasibleCombination("no feasible combination");
  return ranked.front();
}

inline const CombinedSolution& best_combination(const CombinationResult& r) {
  return best_combination(r.ranked);
}

// ---------------------------------------------------------------------------
// Integrated variant: one hierarchy over image and service criteria.

enum class LeafSide { Image, Service };

struct IntegratedLeaf {
  LeafWeight leaf;
  LeafSide side;
};

/// Leaves of an integrated hierarchy whose root has an "image" and a
/// "service" subtree.
inline std::vector<IntegratedLeaf> integrated_leaf_weights(const CriteriaHierarchy& h,
                                                           const MatrixSet& matrices) {
  const auto gw = global_weights(h, matrices);
  std::vector<IntegratedLeaf> out;
  bool sawImage = false;
  bool sawService = false;
  for (const auto& child : h.root().children) {
    LeafSide side;
    if (child.id == "image") {
      side = LeafSide::Image;
      sawImage = true;
    } else if (child.id == "service") {
      side = LeafSide::Service;
      sawService = true;
    } else {
      throw InvalidHierarchy("integrated hierarchy children must be 'image' and 'service'",
                             child.id);
    }
    CriteriaHierarchy sub(child);
    for (const auto& l : sub.leaves())
      out.push_back({{l.criterionId, l.attributeKey, l.influence, gw.at(l.criterionId)}, side});
  }
  if (!sawImage || !sawService)
    throw InvalidHierarchy("integrated hierarchy needs both an image and a service subtree",
                           h.root().id);
  return out;
}

/// Scores feasible pairs directly with one multiplicative index over image
/// and service leaves, then applies the network-delta division.
inline CombinationResult integrated_evaluate(const Catalog& catalog,
                                             std::span<const std::string> survivorImages,
                                             std::span<const std::string> survivorServices,
                                             std::span<const IntegratedLeaf> leaves,
                                             const Formation& formation,
                                             std::string_view componentId,
                                             bool applyNetworkDelta = true) {
  const auto neighbors = neighbor_placements(formation, componentId, catalog);
  PairGrid grid;
  std::vector<ScoredAlternative> placeholderI(survivorImages.size());
  std::vector<ScoredAlternative> placeholderS(survivorServices.size());
  for (std::size_t i = 0; i < survivorImages.size(); ++i) {
    auto idx = catalog.image_index(survivorImages[i]);
    if (!idx) throw ValidationError("unknown image '" + survivorImages[i] + "'", survivorImages[i]);
    grid.imageIdx.push_back(*idx);
    grid.images.push_back(&placeholderI[i]);
  }
  for (std::size_t s = 0; s < survivorServices.size(); ++s) {
    auto idx = catalog.service_index(survivorServices[s]);
    if (!idx)
      throw ValidationError("unknown service '" + survivorServices[s] + "'", survivorServices[s]);
    grid.serviceIdx.push_back(*idx);
    grid.services.push_back(&placeholderS[s]);
  }
  const auto mask = feasibility_mask(grid, catalog, neighbors);
  const auto deltas = service_deltas(grid, catalog, neighbors);

  std::vector<std::pair<std::size_t, std::size_t>> feasible;
  const std::size_t n = grid.serviceIdx.size();
  for (std::size_t i = 0; i < grid.imageIdx.size(); ++i)
    for (std::size_t s = 0; s < n; ++s)
      if (mask[i * n + s]) feasible.emplace_back(i, s);
  if (feasible.empty())
    throw NoFeasibleCombination("no feasible image/service combination for component '" +
                                    std::string(componentId) + "'",
                                std::string(componentId));

  std::vector<LeafWeight> plain;
  for (const auto& l : leaves) plain.push_back(l.leaf);
  std::vector<std::vector<std::optional<double>>> table(feasible.size());
  for (std::size_t r = 0; r < feasible.size(); ++r) {
    const auto& img = catalog.images()[grid.imageIdx[feasible[r].first]];
    const auto& svc = catalog.services()[grid.serviceIdx[feasible[r].second]];
    for (const auto& l : leaves)
      table[r].push_back(l.side == LeafSide::Image ? img.numeric_value(l.leaf.attributeKey)
                                                   : svc.numeric_value(l.leaf.attributeKey));
  }
  const auto norm = normalize_table(table, plain.size());

  std::vector<double> pairDeltas;
  for (const auto& [i, s] : feasible) pairDeltas.push_back(deltas[s]);
  const auto normDeltas = normalize_deltas(std::span<const double>(pairDeltas));

  CombinationResult result;
  double best = 0.0;
  bool degenerate = false;
  for (std::size_t r = 0; r < feasible.size(); ++r) {
    CombinedSolution c;
    c.imageId = catalog.images()[grid.imageIdx[feasible[r].first]].id;
    c.serviceId = catalog.services()[grid.serviceIdx[feasible[r].second]].id;
    c.networkDelta = pairDeltas[r];
    c.normalizedDelta = normDeltas[r];
    c.feasible = true;
    const auto terms = multiplicative_index(plain, norm[r], feasible.size());
    degenerate = degenerate || terms.degenerate;
    c.combinedRaw = terms.value() / (applyNetworkDelta ? c.normalizedDelta : 1.0);
    best = std::max(best, c.combinedRaw);
    result.ranked.push_back(std::move(c));
  }
  for (auto& c : result.ranked) c.combinedScore = best > 0.0 ? c.combinedRaw / best : 0.0;
  rank_combined(result.ranked);
  if (degenerate) result.warnings.push_back("negative criteria sum to zero; denominator floored");
  return result;
}

inline Json to_json(const CombinationPolicy& p) {
  Json j;
  j["operator"] = std::string(to_string(p.op));
  j["wImage"] = round_sig9(p.wImage);
  j["wService"] = round_sig9(p.wService);
  j["networkDelta"] = p.applyNetworkDelta;
  return j;
}

inline Json to_json(const CombinedSolution& c) {
  Json j;
  j["image"] = c.imageId;
  j["service"] = c.serviceId;
  j["score"] = round_sig9(c.combinedScore);
  j["raw"] = round_sig9(c.combinedRaw);
  j["imageScore"] = round_sig9(c.imageScore);
  j["serviceScore"] = round_sig9(c.serviceScore);
  j["delta"] = round_sig9(c.networkDelta);
  j["normalizedDelta"] = round_sig9(c.normalizedDelta);
  j["feasible"] = c.feasible;
  return j;
}

}  // namespace fgen

#endif  // FGEN_COMBINATION_HPP_INCLUDED
