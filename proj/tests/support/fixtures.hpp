#ifndef FGEN_TESTS_FIXTURES_HPP_INCLUDED
#define FGEN_TESTS_FIXTURES_HPP_INCLUDED

// Random catalogs, formations and preference documents. Each fixture is
// produced twice from the same draws: as JSON documents for the engine and
// as plain oracle structures.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fgen/catalog.hpp"
#include "fgen/engine.hpp"
#include "fgen/formation.hpp"
#include "fgen/json_util.hpp"
#include "oracle.hpp"

namespace fixtures {

using fgen::Json;

struct AttrDef {
  std::string key;
  int sign;  // +1 benefit, -1 cost, 0 not a criterion
  double lo;
  double hi;
};

// Influences as published for the two attribute tables.
inline const std::vector<AttrDef>& image_attrs() {
  static const std::vector<AttrDef> v = {
      {"Hourly License Price", -1, 0.0, 2.0}, {"Popularity", +1, 0.0, 100.0},
      {"Age", +1, 0.0, 4000.0},               {"OS Version", 0, 1.0, 12.0},
      {"Software Version", 0, 1.0, 30.0}};
  return v;
}

inline const std::vector<AttrDef>& service_attrs() {
  static const std::vector<AttrDef> v = {
      {"Hourly CPU Price", -1, 0.01, 3.0},    {"Network Send Price", -1, 0.0, 0.05},
      {"Network Receive Price", -1, 0.0, 0.05}, {"Internet Send Price", -1, 0.0, 0.3},
      {"Internet Receive Price", -1, 0.0, 0.3}, {"CPU Performance", +1, 1e9, 1e11},
      {"CPU Cores", +1, 1.0, 32.0},            {"RAM Performance", +1, 1e9, 1e11},
      {"RAM Size", +1, 1e9, 1e12},             {"Disk Performance", +1, 1e8, 1e10},
      {"Disk Size", +1, 1e10, 1e13},           {"Max. Latency", -1, 1.0, 500.0},
      {"Avg. Latency", -1, 1.0, 200.0},        {"Uptime", +1, 90.0, 100.0},
      {"Service Popularity", +1, 0.0, 100.0}};
  return v;
}

inline const std::vector<std::string>& features() {
  static const std::vector<std::string> v = {"Web Server", "Database", "Application Server"};
  return v;
}
inline const std::vector<std::string>& systems() {
  static const std::vector<std::string> v = {"Linux", "Windows"};
  return v;
}
inline const std::vector<std::string>& countries() {
  static const std::vector<std::string> v = {"Germany", "USA"};
  return v;
}

/// Reciprocal matrix with random discrete judgments above the diagonal.
inline std::vector<std::vector<double>> random_saaty(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 1.0));
  std::uniform_int_distribution<int> d(1, 9);
  std::bernoulli_distribution flip(0.5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = d(rng);
      m[i][j] = flip(rng) ? v : 1.0 / v;
      m[j][i] = 1.0 / m[i][j];
    }
  return m;
}

inline Json matrix_json(const std::vector<std::vector<double>>& m) {
  Json j = Json::array();
  for (const auto& r : m) j.push_back(r);
  return j;
}

struct Fixture {
  Json catalog;
  Json formation;
  Json prefs;
  std::string component;
  oracle::World world;
  oracle::Prefs oprefs;
};

struct Options {
  std::size_t maxImages = 10;
  std::size_t maxServices = 10;
  std::size_t maxComponents = 4;
  double integratedShare = 0.3;
};

namespace detail {

inline double draw_value(std::mt19937_64& rng, const AttrDef& a) {
  std::uniform_real_distribution<double> u(a.lo, a.hi);
  std::bernoulli_distribution zero(0.08);
  if (a.sign < 0 && zero(rng)) return 0.0;
  return u(rng);
}

/// Random hierarchy over `pool` rooted at `rootId`; leaves get ids
/// prefix-k. Returns the JSON tree, the matrices, and the oracle mirror.
inline void random_tree(std::mt19937_64& rng, const std::vector<AttrDef>& pool,
                        const std::string& rootId, const std::string& prefix, Json& tree,
                        Json& matrices, oracle::Goal& goal) {
  std::vector<AttrDef> usable;
  for (const auto& a : pool)
    if (a.sign != 0) usable.push_back(a);
  std::shuffle(usable.begin(), usable.end(), rng);
  const std::size_t count = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(6, usable.size()))(rng);
  usable.resize(count);
  const std::size_t groups = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, count))(rng);

  auto leafJson = [&](std::size_t k) {
    return Json{{"id", prefix + std::to_string(k)}, {"attribute", usable[k].key}};
  };
  auto leafGoal = [&](std::size_t k) {
    oracle::Goal g;
    g.id = prefix + std::to_string(k);
    g.attr = usable[k].key;
    g.sign = usable[k].sign;
    return g;
  };

  tree = {{"id", rootId}, {"children", Json::array()}};
  goal = {};
  goal.id = rootId;
  if (groups == 1) {
    for (std::size_t k = 0; k < count; ++k) {
      tree["children"].push_back(leafJson(k));
      goal.children.push_back(leafGoal(k));
    }
  } else {
    std::vector<std::vector<std::size_t>> members(groups);
    for (std::size_t k = 0; k < count; ++k) members[k < groups ? k : std::uniform_int_distribution<std::size_t>(0, groups - 1)(rng)].push_back(k);
    for (std::size_t g = 0; g < groups; ++g) {
      const std::string gid = prefix + "g" + std::to_string(g);
      Json gj = {{"id", gid}, {"children", Json::array()}};
      oracle::Goal og;
      og.id = gid;
      for (auto k : members[g]) {
        gj["children"].push_back(leafJson(k));
        og.children.push_back(leafGoal(k));
      }
      if (members[g].size() > 1) {
        og.matrix = random_saaty(rng, members[g].size());
        matrices[gid] = matrix_json(og.matrix);
      }
      tree["children"].push_back(gj);
      goal.children.push_back(og);
    }
  }
  if (goal.children.size() > 1) {
    goal.matrix = random_saaty(rng, goal.children.size());
    matrices[rootId] = matrix_json(goal.matrix);
  }
}

inline std::vector<oracle::Req> random_reqs(std::mt19937_64& rng, const std::vector<AttrDef>& attrs,
                                            const std::vector<std::pair<std::string, std::vector<std::string>>>& texts,
                                            Json& out) {
  std::vector<oracle::Req> reqs;
  out = Json::array();
  const int n = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int k = 0; k < n; ++k) {
    oracle::Req r;
    if (std::bernoulli_distribution(0.7)(rng)) {
      const auto& a = attrs[std::uniform_int_distribution<std::size_t>(0, attrs.size() - 1)(rng)];
      r.attr = a.key;
      r.kind = std::bernoulli_distribution(0.5)(rng) ? oracle::Kind::Max : oracle::Kind::Min;
      r.bound = std::uniform_real_distribution<double>(a.lo, a.hi)(rng);
      out.push_back({{"attr", r.attr}, {"kind", r.kind == oracle::Kind::Max ? "max" : "min"}, {"value", r.bound}});
    } else {
      const auto& [key, values] = texts[std::uniform_int_distribution<std::size_t>(0, texts.size() - 1)(rng)];
      r.attr = key;
      if (std::bernoulli_distribution(0.5)(rng)) {
        r.kind = oracle::Kind::Equals;
        r.value = values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)];
        out.push_back({{"attr", key}, {"kind", "equals"}, {"value", r.value}});
      } else {
        r.kind = oracle::Kind::OneOf;
        for (const auto& v : values)
          if (std::bernoulli_distribution(0.5)(rng)) r.values.insert(v);
        if (r.values.empty()) r.values.insert(values.front());
        out.push_back({{"attr", key}, {"kind", "oneOf"}, {"values", std::vector<std::string>(r.values.begin(), r.values.end())}});
      }
    }
    reqs.push_back(std::move(r));
  }
  return reqs;
}

}  // namespace detail

inline Fixture random_fixture(std::mt19937_64& rng, const Options& opt = {}) {
  auto uint = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto pick = [&](const std::vector<std::string>& v) { return v[uint(0, v.size() - 1)]; };

  Fixture fx;
  auto& w = fx.world;

  // Formation.
  const std::size_t l = uint(1, opt.maxComponents);
  Json comps = Json::array();
  std::vector<std::string> compIds;
  for (std::size_t k = 0; k < l; ++k) {
    const std::string id = "c" + std::to_string(k + 1);
    const std::string feature = features()[uint(0, 1)];
    comps.push_back({{"id", id}, {"feature", feature}});
    compIds.push_back(id);
    w.componentFeature[id] = feature;
  }
  Json links = Json::array();
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j) {
      if (!coin(0.7)) continue;
      oracle::Traffic t;
      std::uniform_real_distribution<double> c(0.0, 5.0);
      t.localRecv = coin(0.15) ? 0.0 : c(rng);
      t.localSend = c(rng);
      t.inetRecv = c(rng) * 3;
      t.inetSend = coin(0.15) ? 0.0 : c(rng) * 3;
      links.push_back({{"a", compIds[i]},
                       {"b", compIds[j]},
                       {"costs", {{"localRecv", t.localRecv}, {"localSend", t.localSend},
                                  {"inetRecv", t.inetRecv}, {"inetSend", t.inetSend}}}});
      w.links[{compIds[i], compIds[j]}] = t;
      w.links[{compIds[j], compIds[i]}] = t;
    }

  // Catalog.
  const std::size_t m = uint(1, opt.maxImages);
  const std::size_t n = uint(1, opt.maxServices);
  const std::vector<std::string> providers = {"p1", "p2", "p3"};
  Json cat;
  cat["providers"] = Json::array();
  for (const auto& p : providers) cat["providers"].push_back({{"id", p}, {"name", p}});
  cat["images"] = Json::array();
  for (std::size_t k = 0; k < m; ++k) {
    oracle::Item it;
    it.id = "i" + std::to_string(k + 1);
    const std::string feature = k < 2 ? features()[k] : features()[uint(0, 2)];
    it.text["Software Feature"] = feature;
    it.text["Operating System (OS)"] = pick(systems());
    Json num = Json::object();
    for (const auto& a : image_attrs()) {
      if (coin(0.04)) continue;
      it.num[a.key] = detail::draw_value(rng, a);
      num[a.key] = it.num[a.key];
    }
    cat["images"].push_back({{"id", it.id},
                             {"feature", feature},
                             {"numerical", num},
                             {"nonNumerical", {{"Operating System (OS)", it.text["Operating System (OS)"]}}}});
    w.imageFeature[it.id] = feature;
    w.images.push_back(std::move(it));
  }
  cat["services"] = Json::array();
  for (std::size_t k = 0; k < n; ++k) {
    oracle::Item it;
    it.id = "s" + std::to_string(k + 1);
    it.provider = providers[uint(0, 1 + (coin(0.5) ? 1 : 0))];
    it.location = pick(countries());
    it.text["Provider"] = it.provider;
    it.text["Location Country"] = it.location;
    Json num = Json::object();
    for (const auto& a : service_attrs()) {
      if (coin(0.04)) continue;
      it.num[a.key] = detail::draw_value(rng, a);
      num[a.key] = it.num[a.key];
    }
    cat["services"].push_back({{"id", it.id}, {"provider", it.provider}, {"location", it.location}, {"numerical", num}});
    w.services.push_back(std::move(it));
  }
  const double pD = std::uniform_real_distribution<double>(0.4, 1.0)(rng);
  const double pE = std::uniform_real_distribution<double>(0.4, 1.0)(rng);
  const double pF = std::uniform_real_distribution<double>(0.4, 1.0)(rng);
  Json D = Json::array(), E = Json::array(), F = Json::array();
  for (const auto& a : w.images)
    for (const auto& s : w.services)
      if (coin(pD)) {
        D.push_back({a.id, s.id});
        w.deploy.insert({a.id, s.id});
      }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (coin(pE)) {
        E.push_back({w.images[i].id, w.images[j].id});
        w.imageCompat.insert({w.images[i].id, w.images[j].id});
        w.imageCompat.insert({w.images[j].id, w.images[i].id});
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(pF)) {
        F.push_back({w.services[i].id, w.services[j].id});
        w.serviceCompat.insert({w.services[i].id, w.services[j].id});
        w.serviceCompat.insert({w.services[j].id, w.services[i].id});
      }
  cat["compat"] = {{"imageService", D}, {"imageImage", E}, {"serviceService", F}};
  fx.catalog = std::move(cat);

  // Commit some components to arbitrary catalog entries, keep one open.
  const std::size_t target = uint(0, l - 1);
  fx.component = compIds[target];
  Json committed = Json::array();
  for (std::size_t k = 0; k < l; ++k) {
    if (k == target || !coin(0.6)) continue;
    const auto& img = w.images[uint(0, m - 1)];
    const auto& svc = w.services[uint(0, n - 1)];
    committed.push_back({{"component", compIds[k]}, {"image", img.id}, {"service", svc.id}});
    w.committed[compIds[k]] = {img.id, svc.id};
  }
  fx.formation = {{"components", comps}, {"links", links}};
  if (!committed.empty()) fx.formation["committed"] = committed;

  // Preferences.
  auto& p = fx.oprefs;
  Json prefs = Json::object();
  Json reqs;
  p.imageReqs = detail::random_reqs(rng, image_attrs(), {{"Operating System (OS)", systems()}}, reqs);
  prefs["imageRequirements"] = reqs;
  p.serviceReqs = detail::random_reqs(
      rng, service_attrs(), {{"Provider", providers}, {"Location Country", countries()}}, reqs);
  prefs["serviceRequirements"] = reqs;
  p.relaxServices = coin(0.7);
  prefs["relaxServiceRequirements"] = p.relaxServices;

  p.integrated = coin(opt.integratedShare);
  if (p.integrated) {
    Json itree, imats = Json::object(), stree, smats = Json::object();
    oracle::Goal ig, sg;
    detail::random_tree(rng, image_attrs(), "image", "li", itree, imats, ig);
    detail::random_tree(rng, service_attrs(), "service", "ls", stree, smats, sg);
    p.integratedGoal.id = "combined";
    p.integratedGoal.children = {ig, sg};
    p.integratedGoal.matrix = random_saaty(rng, 2);
    Json mats = imats;
    for (auto& [k, v] : smats.items()) mats[k] = v;
    mats["combined"] = matrix_json(p.integratedGoal.matrix);
    prefs["mode"] = "integrated";
    prefs["integratedHierarchy"] = {
        {"tree", {{"id", "combined"}, {"children", Json::array({itree, stree})}}},
        {"matrices", mats}};
  } else {
    Json itree, imats = Json::object(), stree, smats = Json::object();
    detail::random_tree(rng, image_attrs(), "image", "li", itree, imats, p.imageGoal);
    detail::random_tree(rng, service_attrs(), "service", "ls", stree, smats, p.serviceGoal);
    prefs["mode"] = "stepwise";
    prefs["imageHierarchy"] = {{"tree", itree}, {"matrices", imats}};
    prefs["serviceHierarchy"] = {{"tree", stree}, {"matrices", smats}};
  }
  p.product = coin(0.3);
  p.applyDelta = coin(0.8);
  const auto cmp = random_saaty(rng, 2);
  p.wImage = std::sqrt(cmp[0][1]) / (std::sqrt(cmp[0][1]) + std::sqrt(cmp[1][0]));
  p.wService = 1.0 - p.wImage;
  prefs["combination"] = {{"operator", p.product ? "product" : "sum"},
                          {"comparison", matrix_json(cmp)},
                          {"networkDelta", p.applyDelta}};
  fx.prefs = std::move(prefs);
  return fx;
}

}  // namespace fixtures

#endif  // FGEN_TESTS_FIXTURES_HPP_INCLUDED
