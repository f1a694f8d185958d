#ifndef FGEN_ENGINE_HPP_INCLUDED
#define FGEN_ENGINE_HPP_INCLUDED

// Single-component decision pipeline: requirement filtering, image and
// service scoring, and combination (or the integrated variant).

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgen/ahp.hpp"
#include "fgen/catalog.hpp"
#include "fgen/combination.hpp"
#include "fgen/evaluation.hpp"
#include "fgen/formation.hpp"
#include "fgen/json_util.hpp"
#include "fgen/requirements.hpp"
#include "fgen/timing.hpp"

namespace fgen {

enum class EvaluationMode { Stepwise, Integrated };

inline std::string_view to_string(EvaluationMode m) {
  return m == EvaluationMode::Stepwise ? "stepwise" : "integrated";
}

struct HierarchyChoice {
  CriteriaHierarchy hierarchy;
  MatrixSet matrices;

  void validate() const {
    for (const auto* n : hierarchy.internal_nodes()) {
      if (n->children.size() < 2) continue;
      auto it = matrices.find(n->id);
      if (it == matrices.end())
        throw MissingMatrix("goal '" + n->id + "' has no comparison matrix", n->id);
      if (it->second.order() != n->children.size())
        throw InvalidMatrix("matrix for '" + n->id + "' does not match its children", n->id);
    }
  }
};

inline HierarchyChoice uniform_choice(CriteriaHierarchy h) {
  auto m = uniform_matrices(h);
  return {std::move(h), std::move(m)};
}

struct PreferenceProfile {
  std::vector<Requirement> imageRequirements;
  std::vector<Requirement> serviceRequirements;
  HierarchyChoice image = uniform_choice(default_image_hierarchy());
  HierarchyChoice service = uniform_choice(default_service_hierarchy());
  HierarchyChoice integrated = uniform_choice(default_integrated_hierarchy());
  CombinationPolicy policy;
  EvaluationMode mode = EvaluationMode::Stepwise;
  bool relaxServiceRequirements = true;

  void validate() const {
    policy.validate();
    if (mode == EvaluationMode::Stepwise) {
      image.validate();
      service.validate();
    } else {
      integrated.validate();
    }
    for (const auto& r : imageRequirements) validate_shape(r);
    for (const auto& r : serviceRequirements) validate_shape(r);
  }
};

struct EvaluationOutcome {
  std::string componentId;
  EvaluationMode mode = EvaluationMode::Stepwise;
  CombinationPolicy policy;
  std::vector<std::string> candidateImages;
  FilterOutcome imageFilter;
  FilterOutcome serviceFilter;
  /// Empty in integrated mode.
  EvaluationResult images;
  EvaluationResult services;
  CombinationResult combinations;
  std::vector<std::string> warnings;
};

/// Images whose software feature matches the component's (case-insensitive).
inline std::vector<std::string> candidate_images(const Catalog& catalog, std::string_view feature) {
  std::vector<std::string> out;
  for (const auto& img : catalog.images())
    if (iequals(img.feature, feature)) out.push_back(img.id);
  return out;
}

inline EvaluationOutcome evaluate_component(const Catalog& catalog, const Formation& formation,
                                            std::string_view componentId,
                                            const PreferenceProfile& profile,
                                            PhaseTimer* timer = nullptr) {
  const Component* component = formation.find(componentId);
  if (!component)
    throw UnknownComponent("unknown component '" + std::string(componentId) + "'",
                           std::string(componentId));
  profile.validate();

  EvaluationOutcome out;
  out.componentId = component->id;
  out.mode = profile.mode;
  out.policy = profile.policy;
  out.candidateImages = candidate_images(catalog, component->feature);
  if (out.candidateImages.empty())
    out.warnings.push_back("no image provides feature '" + component->feature + "'");

  std::vector<const VmImage*> imagePool;
  for (const auto& id : out.candidateImages) imagePool.push_back(catalog.find_image(id));
  std::vector<const CloudService*> servicePool;
  for (const auto& s : catalog.services()) servicePool.push_back(&s);
  std::vector<std::string> serviceIds;
  for (const auto& s : catalog.services()) serviceIds.push_back(s.id);

  timed(timer, Phase::Filter, [&] {
    validate_requirements(profile.imageRequirements, catalog.image_specs());
    validate_requirements(profile.serviceRequirements, catalog.service_specs());
    out.imageFilter = filter<VmImage>(profile.imageRequirements,
                                      std::span<const VmImage* const>(imagePool), true);
    out.serviceFilter = filter<CloudService>(profile.serviceRequirements,
                                             std::span<const CloudService* const>(servicePool),
                                             profile.relaxServiceRequirements);
  });
  if (out.imageFilter.relaxationLevel > 0)
    out.warnings.push_back("image requirements relaxed to level " +
                           std::to_string(out.imageFilter.relaxationLevel));
  if (out.serviceFilter.relaxationLevel > 0)
    out.warnings.push_back("service requirements relaxed to level " +
                           std::to_string(out.serviceFilter.relaxationLevel));

  if (profile.mode == EvaluationMode::Stepwise) {
    timed(timer, Phase::Evaluate, [&] {
      const auto imageHierarchy = profile.image.hierarchy.bind(catalog.image_specs());
      const auto serviceHierarchy = profile.service.hierarchy.bind(catalog.service_specs());
      const auto imageLeaves = leaf_weights(imageHierarchy, profile.image.matrices);
      const auto serviceLeaves = leaf_weights(serviceHierarchy, profile.service.matrices);
      out.images = evaluate_images(catalog, out.candidateImages, out.imageFilter, imageLeaves);
      out.services = evaluate_services(catalog, serviceIds, out.serviceFilter, serviceLeaves);
    });
    for (const auto& w : consistency_warnings(profile.image.matrices)) out.warnings.push_back(w);
    for (const auto& w : consistency_warnings(profile.service.matrices))
      out.warnings.push_back(w);

    const auto neighbors = timed(timer, Phase::NetworkCosts, [&] {
      return neighbor_placements(formation, componentId, catalog);
    });
    PairGrid grid;
    std::vector<char> mask;
    timed(timer, Phase::Feasibility, [&] {
      grid = pair_grid(out.images, out.services, catalog);
      mask = feasibility_mask(grid, catalog, neighbors);
    });
    const auto deltas =
        timed(timer, Phase::NetworkCosts, [&] { return service_deltas(grid, catalog, neighbors); });
    out.combinations = timed(timer, Phase::Combine, [&] {
      return score_pairs(grid, mask, deltas, catalog, profile.policy);
    });
    if (out.combinations.feasible_count() == 0)
      throw NoFeasibleCombination("no feasible image/service combination for component '" +
                                      out.componentId + "'",
                                  out.componentId);
  } else {
    const auto leaves = timed(timer, Phase::Evaluate, [&] {
      auto bound = profile.integrated.hierarchy.bind(catalog.image_specs())
                       .bind(catalog.service_specs());
      return integrated_leaf_weights(bound, profile.integrated.matrices);
    });
    for (const auto& w : consistency_warnings(profile.integrated.matrices))
      out.warnings.push_back(w);
    out.combinations = timed(timer, Phase::Combine, [&] {
      return integrated_evaluate(catalog, out.imageFilter.survivors, out.serviceFilter.survivors,
                                 leaves, formation, componentId,
                                 profile.policy.applyNetworkDelta);
    });
  }
  for (const auto& w : out.images.warnings) out.warnings.push_back("images: " + w);
  for (const auto& w : out.services.warnings) out.warnings.push_back("services: " + w);
  for (const auto& w : out.combinations.warnings) out.warnings.push_back("combinations: " + w);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace engine_detail {

inline Json filter_json(const FilterOutcome& f) {
  Json j;
  j["relaxationLevel"] = f.relaxationLevel;
  j["survivors"] = f.survivors;
  Json dropped = Json::object();
  for (const auto& [id, v] : f.droppedSets)
    if (!v.empty()) dropped[id] = v;
  j["violations"] = std::move(dropped);
  return j;
}

}  // namespace engine_detail

/// Result document. `top` limits the number of combinations listed.
inline Json to_json(const EvaluationOutcome& o, std::optional<std::size_t> top = std::nullopt) {
  Json j;
  j["component"] = o.componentId;
  j["mode"] = std::string(to_string(o.mode));
  j["policy"] = to_json(o.policy);
  j["candidateImages"] = o.candidateImages;
  j["filters"] = {{"images", engine_detail::filter_json(o.imageFilter)},
                  {"services", engine_detail::filter_json(o.serviceFilter)}};
  if (o.mode == EvaluationMode::Stepwise) {
    j["images"] = to_json(o.images);
    j["services"] = to_json(o.services);
  }
  j["combinations"] = Json::array();
  std::size_t k = 0;
  for (const auto& c : o.combinations.ranked) {
    if (top && k++ >= *top) break;
    j["combinations"].push_back(to_json(c));
  }
  j["feasibleCount"] = o.combinations.feasible_count();
  j["warnings"] = o.warnings;
  return j;
}

namespace engine_detail {

inline HierarchyChoice choice_from_json(const Json* j, CriteriaNode defaultTree,
                                        std::string_view ctx) {
  CriteriaHierarchy h(j && j->contains("tree") ? criteria_node_from_json((*j)["tree"])
                                               : std::move(defaultTree));
  if (j && j->contains("select")) {
    std::set<std::string> keep;
    for (const auto& v : require_array(*j, "select", ctx)) {
      if (!v.is_string()) throw ParseError("leaf ids must be strings", std::string(ctx));
      keep.insert(v.get<std::string>());
    }
    for (const auto& id : keep) {
      const auto* n = h.find(id);
      if (!n || !n->is_leaf())
        throw ValidationError("selected criterion '" + id + "' is not a leaf", std::string(ctx));
    }
    h = h.prune(keep);
  }
  MatrixSet matrices;
  if (j && j->contains("matrices")) {
    const Json& mj = (*j)["matrices"];
    if (!mj.is_object()) throw ParseError("matrices must be an object", std::string(ctx));
    for (const auto& [id, m] : mj.items()) {
      const auto* node = h.find(id);
      if (!node || node->is_leaf())
        throw ValidationError("matrix given for unknown goal '" + id + "'",
                              std::string(ctx) + ".matrices." + id);
      auto matrix = matrix_from_json(m, std::string(ctx) + ".matrices." + id);
      try {
        validate_saaty_scale(matrix);
      } catch (const InvalidMatrix& e) {
        throw InvalidMatrix(e.what(), std::string(ctx) + ".matrices." + id);
      }
      matrices.emplace(id, std::move(matrix));
    }
  }
  const bool fillEqual = j && j->contains("fillEqual") && (*j)["fillEqual"].get<bool>();
  if (fillEqual || !j || (!j->contains("matrices") && !j->contains("tree"))) {
    for (auto& [id, m] : uniform_matrices(h)) matrices.try_emplace(id, std::move(m));
  }
  HierarchyChoice choice{std::move(h), std::move(matrices)};
  choice.validate();
  return choice;
}

}  // namespace engine_detail

/// Preferences document. A hierarchy section may carry a custom `tree`, a
/// `select` list of kept leaf ids, per-goal `matrices` on the discrete 1..9
/// scale, and `fillEqual` to default missing matrices to equal judgments. An
/// absent section means the default hierarchy with equal judgments.
inline PreferenceProfile profile_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("preferences must be an object", "preferences");
  PreferenceProfile p;
  if (j.contains("imageRequirements"))
    p.imageRequirements = requirements_from_json(j["imageRequirements"], "imageRequirements");
  if (j.contains("serviceRequirements"))
    p.serviceRequirements = requirements_from_json(j["serviceRequirements"], "serviceRequirements");
  if (j.contains("relaxServiceRequirements"))
    p.relaxServiceRequirements = j["relaxServiceRequirements"].get<bool>();
  if (j.contains("mode")) {
    const auto mode = require_string(j, "mode", "preferences");
    if (mode == "stepwise") p.mode = EvaluationMode::Stepwise;
    else if (mode == "integrated") p.mode = EvaluationMode::Integrated;
    else throw ParseError("unknown mode '" + mode + "'", "preferences.mode");
  }
  auto section = [&](const char* key) -> const Json* {
    return j.contains(key) ? &j[key] : nullptr;
  };
  p.image = engine_detail::choice_from_json(section("imageHierarchy"), default_image_tree(),
                                            "imageHierarchy");
  p.service = engine_detail::choice_from_json(section("serviceHierarchy"), default_service_tree(),
                                              "serviceHierarchy");
  p.integrated = engine_detail::choice_from_json(section("integratedHierarchy"),
                                                 default_integrated_tree(), "integratedHierarchy");
  if (j.contains("combination")) {
    const Json& c = j["combination"];
    CombineOperator op = CombineOperator::Sum;
    if (c.contains("operator")) {
      const auto name = require_string(c, "operator", "combination");
      if (name == "sum") op = CombineOperator::Sum;
      else if (name == "product") op = CombineOperator::Product;
      else throw ParseError("unknown operator '" + name + "'", "combination.operator");
    }
    const bool delta = c.contains("networkDelta") ? c["networkDelta"].get<bool>() : true;
    if (c.contains("comparison")) {
      auto m = matrix_from_json(c["comparison"], "combination.comparison");
      validate_saaty_scale(m);
      p.policy = CombinationPolicy::from_comparison(m, op, delta);
    } else {
      p.policy.op = op;
      p.policy.applyNetworkDelta = delta;
      if (c.contains("wImage")) p.policy.wImage = require_number(c, "wImage", "combination");
      if (c.contains("wService")) p.policy.wService = require_number(c, "wService", "combination");
    }
  }
  p.validate();
  return p;
}

}  // namespace fgen

#endif  // FGEN_ENGINE_HPP_INCLUDED
