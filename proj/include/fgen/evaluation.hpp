#ifndef FGEN_EVALUATION_HPP_INCLUDED
#define FGEN_EVALUATION_HPP_INCLUDED

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgen/ahp.hpp"
#include "fgen/catalog.hpp"
#include "fgen/error.hpp"
#include "fgen/requirements.hpp"

namespace fgen {

struct ScoredAlternative {
  std::string id;
  double rawScore = 0.0;
  double score = 0.0;
  bool requirementOk = false;
  std::size_t relaxationLevel = 0;
  std::vector<std::string> warnings;
};

struct EvaluationResult {
  /// Survivors by descending score (ties by id), then non-survivors by id.
  std::vector<ScoredAlternative> ranked;
  std::size_t relaxationLevel = 0;
  std::vector<std::string> warnings;
};

/// Floor applied to a vanishing denominator: 1 / (count * 10^6).
inline double degenerate_floor(std::size_t count) {
  return 1.0 / (static_cast<double>(std::max<std::size_t>(count, 1)) * 1e6);
}

struct IndexTerms {
  double numerator = 1.0;
  double denominator = 1.0;
  bool degenerate = false;

  double value() const { return numerator / denominator; }
};

/// Multiplicative index over normalized leaf values: weighted positive sum
/// divided by weighted negative sum. A side with no selected leaves counts
/// as 1; a negative sum below the floor is raised to it.
inline IndexTerms multiplicative_index(std::span<const LeafWeight> leaves,
                                       std::span<const double> normalized,
                                       std::size_t alternativeCount) {
  IndexTerms t;
  bool anyPositive = false;
  bool anyNegative = false;
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    if (leaves[k].influence == Influence::Positive) {
      anyPositive = true;
      pos += leaves[k].weight * normalized[k];
    } else if (leaves[k].influence == Influence::Negative) {
      anyNegative = true;
      neg += leaves[k].weight * normalized[k];
    }
  }
  if (anyPositive) t.numerator = pos;
  if (anyNegative) {
    const double floor = degenerate_floor(alternativeCount);
    if (neg < floor) {
      neg = floor;
      t.degenerate = true;
    }
    t.denominator = neg;
  }
  return t;
}

/// Column-wise normalization of a rows x leaves table of optional values.
/// Absent values normalize to 0; if no present value is positive, present
/// entries get 1/rows.
inline std::vector<std::vector<double>> normalize_table(
    const std::vector<std::vector<std::optional<double>>>& table, std::size_t leafCount) {
  const std::size_t rows = table.size();
  std::vector<std::vector<double>> out(rows, std::vector<double>(leafCount, 0.0));
  for (std::size_t k = 0; k < leafCount; ++k) {
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (!table[r][k]) continue;
      if (*table[r][k] < 0.0) throw NegativeValue("negative criterion value");
      total += *table[r][k];
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (!table[r][k]) continue;
      out[r][k] = total > 0.0 ? *table[r][k] / total : 1.0 / static_cast<double>(rows);
    }
  }
  return out;
}

inline void rank_scored(std::vector<ScoredAlternative>& v) {
  std::sort(v.begin(), v.end(), [](const ScoredAlternative& a, const ScoredAlternative& b) {
    if (a.requirementOk != b.requirementOk) return a.requirementOk;
    if (a.requirementOk && a.rawScore != b.rawScore) return a.rawScore > b.rawScore;
    return a.id < b.id;
  });
}

/// Scores the requirement survivors among `candidates` with the
/// multiplicative index; everything else scores 0. Scores are raw values
/// divided by the best raw value.
template <Alternative A>
EvaluationResult evaluate_alternatives(std::span<const A* const> candidates,
                                       const FilterOutcome& outcome,
                                       std::span<const LeafWeight> leaves) {
  EvaluationResult result;
  result.relaxationLevel = outcome.relaxationLevel;

  std::vector<const A*> survivors;
  for (const A* a : candidates)
    if (outcome.survives(a->id)) survivors.push_back(a);

  std::vector<std::vector<std::optional<double>>> table(survivors.size());
  std::vector<std::vector<std::string>> missing(survivors.size());
  for (std::size_t r = 0; r < survivors.size(); ++r) {
    table[r].reserve(leaves.size());
    for (const auto& leaf : leaves) {
      auto v = survivors[r]->numeric_value(leaf.attributeKey);
      if (!v) missing[r].push_back(leaf.attributeKey);
      table[r].push_back(v);
    }
  }
  const auto norm = normalize_table(table, leaves.size());

  double best = 0.0;
  for (std::size_t r = 0; r < survivors.size(); ++r) {
    ScoredAlternative s;
    s.id = survivors[r]->id;
    s.requirementOk = true;
    s.relaxationLevel = outcome.relaxationLevel;
    const auto terms = multiplicative_index(leaves, norm[r], survivors.size());
    s.rawScore = terms.value();
    if (terms.degenerate)
      s.warnings.push_back("negative criteria sum to zero; denominator floored");
    for (const auto& key : missing[r]) s.warnings.push_back("attribute '" + key + "' absent");
    best = std::max(best, s.rawScore);
    result.ranked.push_back(std::move(s));
  }
  for (auto& s : result.ranked) s.score = best > 0.0 ? s.rawScore / best : 0.0;
  if (!survivors.empty() && !(best > 0.0))
    result.warnings.push_back("every surviving alternative has a zero raw score");

  for (const A* a : candidates) {
    if (outcome.survives(a->id)) continue;
    ScoredAlternative s;
    s.id = a->id;
    s.relaxationLevel = outcome.relaxationLevel;
    result.ranked.push_back(std::move(s));
  }
  rank_scored(result.ranked);
  if (outcome.relaxationLevel > 0) {
    result.warnings.push_back("requirements relaxed: survivors may violate up to " +
                              std::to_string(outcome.relaxationLevel) + " requirement(s)");
  }
  return result;
}

namespace evaluation_detail {

template <class T, class Find>
std::vector<const T*> resolve(std::span<const std::string> ids, Find find, const char* what) {
  std::vector<const T*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const T* p = find(id);
    if (!p) throw ValidationError(std::string("unknown ") + what + " '" + id + "'", id);
    out.push_back(p);
  }
  return out;
}

}  // namespace evaluation_detail

inline EvaluationResult evaluate_images(const Catalog& catalog,
                                        std::span<const std::string> candidateIds,
                                        const FilterOutcome& outcome,
                                        std::span<const LeafWeight> leaves) {
  auto ptrs = evaluation_detail::resolve<VmImage>(
      candidateIds, [&](const std::string& id) { return catalog.find_image(id); }, "image");
  return evaluate_alternatives<VmImage>(std::span<const VmImage* const>(ptrs), outcome, leaves);
}

inline EvaluationResult evaluate_services(const Catalog& catalog,
                                          std::span<const std::string> candidateIds,
                                          const FilterOutcome& outcome,
                                          std::span<const LeafWeight> leaves) {
  auto ptrs = evaluation_detail::resolve<CloudService>(
      candidateIds, [&](const std::string& id) { return catalog.find_service(id); }, "service");
  return evaluate_alternatives<CloudService>(std::span<const CloudService* const>(ptrs), outcome,
                                             leaves);
}

inline const ScoredAlternative& best(std::span<const ScoredAlternative> ranked) {
  if (ranked.empty()) throw EmptyRanking("ranking is empty");
  return ranked.front();
}

inline const ScoredAlternative& best(const EvaluationResult& r) { return best(r.ranked); }

inline Json to_json(const ScoredAlternative& s) {
  Json j;
  j["id"] = s.id;
  j["score"] = round_sig9(s.score);
  j["raw"] = round_sig9(s.rawScore);
  j["requirementOk"] = s.requirementOk;
  j["relaxationLevel"] = s.relaxationLevel;
  j["warnings"] = s.warnings;
  return j;
}

inline Json to_json(const EvaluationResult& r) {
  Json j;
  j["relaxationLevel"] = r.relaxationLevel;
  j["alternatives"] = Json::array();
  for (const auto& s : r.ranked) j["alternatives"].push_back(to_json(s));
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace fgen

#endif  // FGEN_EVALUATION_HPP_INCLUDED
