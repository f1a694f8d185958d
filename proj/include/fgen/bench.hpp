#ifndef FGEN_BENCH_HPP_INCLUDED
#define FGEN_BENCH_HPP_INCLUDED

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fgen/catalog.hpp"
#include "fgen/engine.hpp"
#include "fgen/error.hpp"
#include "fgen/formation.hpp"
#include "fgen/json_util.hpp"
#include "fgen/timing.hpp"

namespace fgen::bench {

inline constexpr double kLowTrafficCost = 0.01;
inline constexpr double kHighTrafficCost = 0.25;
inline constexpr std::string_view kSyntheticFeature = "Application Server";

struct BenchConfig {
  std::vector<std::size_t> imageCounts{10, 20, 40};
  std::vector<std::size_t> serviceCounts{10, 20, 40};
  std::vector<std::size_t> componentCounts{3};
  std::size_t providerCount = 3;
  std::uint64_t seed = 42;
  std::size_t repetitions = 5;
  bool fullD = true;
  /// Cross every image count with every service count instead of pairing
  /// them position by position.
  bool cartesian = false;

  void validate() const {
    if (imageCounts.empty() || serviceCounts.empty() || componentCounts.empty())
      throw ValidationError("benchmark grid is empty", "bench");
    for (auto v : {&imageCounts, &serviceCounts, &componentCounts})
      for (auto x : *v)
        if (x == 0) throw ValidationError("benchmark counts must be positive", "bench");
    if (providerCount == 0) throw ValidationError("provider count must be positive", "bench");
    if (repetitions < 3) throw ValidationError("at least 3 repetitions are required", "bench");
    if (!cartesian && imageCounts.size() != serviceCounts.size())
      throw ValidationError("image and service count lists differ in length", "bench");
  }

  std::vector<std::pair<std::size_t, std::size_t>> grid() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (cartesian) {
      for (auto m : imageCounts)
        for (auto n : serviceCounts) out.emplace_back(m, n);
    } else {
      for (std::size_t k = 0; k < imageCounts.size(); ++k)
        out.emplace_back(imageCounts[k], serviceCounts[k]);
    }
    return out;
  }
};

struct SyntheticWorld {
  Catalog catalog;
  Formation formation;
  /// Provider each component was assigned to.
  std::vector<std::string> componentProviders;
};

/// Random catalog and fully interconnected formation. Numeric attributes are
/// drawn uniformly inside their ranges (unbounded ranges use fixed plausible
/// caps). Links between components on the same provider cost
/// kLowTrafficCost per direction, other links kHighTrafficCost.
inline SyntheticWorld generate_synthetic(std::size_t images, std::size_t services,
                                         std::size_t components, std::size_t providers,
                                         std::uint64_t seed, bool fullD = true) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto label = [](char prefix, std::size_t k) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%c%04zu", prefix, k + 1);
    return std::string(buf);
  };

  std::vector<Provider> ps;
  for (std::size_t k = 0; k < providers; ++k)
    ps.push_back({"p" + std::to_string(k + 1), "Provider " + std::to_string(k + 1)});

  static const std::vector<std::string> formats{"Xen", "VMWare", "KVM"};
  static const std::vector<std::string> systems{"Linux", "Windows"};
  static const std::vector<std::string> languages{"Java", "Perl", "Ruby"};
  static const std::vector<std::string> countries{"Germany", "Australia", "USA"};

  std::vector<VmImage> imgs;
  for (std::size_t k = 0; k < images; ++k) {
    VmImage img;
    img.id = label('a', k);
    img.feature = std::string(kSyntheticFeature);
    img.numerical = {{std::string(attr::HourlyLicensePrice), uniform(0.0, 1.0)},
                     {std::string(attr::Popularity), uniform(0.0, 100.0)},
                     {std::string(attr::Age), uniform(0.0, 3650.0)},
                     {std::string(attr::OsVersion), uniform(1.0, 20.0)},
                     {std::string(attr::SoftwareVersion), uniform(1.0, 20.0)}};
    img.nonNumerical = {{std::string(attr::VirtualizationFormat), formats[pick(formats.size())]},
                        {std::string(attr::OperatingSystem), systems[pick(systems.size())]},
                        {std::string(attr::ImplementationLanguage), languages[pick(languages.size())]},
                        {std::string(attr::Software), "Synthetic App Server"}};
    imgs.push_back(std::move(img));
  }

  std::vector<CloudService> svcs;
  for (std::size_t k = 0; k < services; ++k) {
    CloudService s;
    s.id = label('s', k);
    s.providerId = ps[pick(ps.size())].id;
    s.location = countries[pick(countries.size())];
    s.numerical = {{std::string(attr::HourlyCpuPrice), uniform(0.01, 2.0)},
                   {std::string(attr::NetworkSendPrice), uniform(0.0, 1e-9)},
                   {std::string(attr::NetworkReceivePrice), uniform(0.0, 1e-9)},
                   {std::string(attr::InternetSendPrice), uniform(0.0, 0.2)},
                   {std::string(attr::InternetReceivePrice), uniform(0.0, 1e-9)},
                   {std::string(attr::CpuPerformance), uniform(1e9, 1e11)},
                   {std::string(attr::CpuCores), std::floor(uniform(1.0, 33.0))},
                   {std::string(attr::RamPerformance), uniform(1e9, 1e11)},
                   {std::string(attr::RamSize), uniform(8e9, 2e12)},
                   {std::string(attr::DiskPerformance), uniform(1e8, 1e10)},
                   {std::string(attr::DiskSize), uniform(8e10, 8e13)},
                   {std::string(attr::MaxLatency), uniform(1.0, 500.0)},
                   {std::string(attr::AvgLatency), uniform(1.0, 200.0)},
                   {std::string(attr::Uptime), uniform(0.0, 100.0)},
                   {std::string(attr::ServicePopularity), uniform(0.0, 100.0)}};
    svcs.push_back(std::move(s));
  }

  CompatibilitySets compat;
  for (const auto& a : imgs) {
    bool any = false;
    for (const auto& s : svcs) {
      if (fullD || std::bernoulli_distribution(0.5)(rng)) {
        compat.imageService.emplace(a.id, s.id);
        any = true;
      }
    }
    if (!any && !svcs.empty()) compat.imageService.emplace(a.id, svcs[pick(svcs.size())].id);
  }
  for (std::size_t i = 0; i < imgs.size(); ++i)
    for (std::size_t j = i + 1; j < imgs.size(); ++j)
      compat.imageImage.emplace(imgs[i].id, imgs[j].id);
  for (std::size_t i = 0; i < svcs.size(); ++i)
    for (std::size_t j = i + 1; j < svcs.size(); ++j)
      compat.serviceService.emplace(svcs[i].id, svcs[j].id);

  std::vector<Component> comps;
  std::vector<std::string> assigned;
  for (std::size_t k = 0; k < components; ++k) {
    comps.push_back({"c" + std::to_string(k + 1), std::string(kSyntheticFeature)});
    assigned.push_back(ps[pick(ps.size())].id);
  }
  std::vector<std::pair<std::string, std::string>> links;
  std::vector<TrafficCostEstimate> traffic;
  for (std::size_t i = 0; i < components; ++i) {
    for (std::size_t j = i + 1; j < components; ++j) {
      const double c = assigned[i] == assigned[j] ? kLowTrafficCost : kHighTrafficCost;
      links.emplace_back(comps[i].id, comps[j].id);
      traffic.push_back({comps[i].id, comps[j].id, c, c, c, c});
    }
  }
  return {Catalog::build(std::move(ps), std::move(imgs), std::move(svcs), std::move(compat)),
          define_formation(std::move(comps), std::move(links), std::move(traffic)),
          std::move(assigned)};
}

/// Stepwise migration of every component in formation order, committing the
/// top-ranked pair each time.
inline std::vector<CommittedSolution> migrate_top(const Catalog& catalog, Formation formation,
                                                  const PreferenceProfile& profile,
                                                  PhaseTimer* timer = nullptr) {
  std::vector<CommittedSolution> out;
  for (const auto& c : formation.components()) {
    const auto outcome = evaluate_component(catalog, formation, c.id, profile, timer);
    const auto& top = best_combination(outcome.combinations);
    CommittedSolution s{c.id, top.imageId, top.serviceId, top.combinedScore};
    formation.commit(s);
    out.push_back(std::move(s));
  }
  return out;
}

struct BenchRecord {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t l = 0;
  /// One of the Phase names, or "Total".
  std::string phase;
  std::size_t repetition = 0;
  std::int64_t elapsedNs = 0;
};

inline constexpr std::string_view kTotalPhase = "Total";

/// Times a full migration per grid point and repetition. A warm-up run per
/// grid point is discarded.
inline std::vector<BenchRecord> run_scaling(const BenchConfig& config) {
  config.validate();
  std::vector<BenchRecord> records;
  const PreferenceProfile profile;
  for (const auto& [m, n] : config.grid()) {
    for (auto l : config.componentCounts) {
      const auto world =
          generate_synthetic(m, n, l, config.providerCount, config.seed, config.fullD);
      (void)migrate_top(world.catalog, world.formation, profile);
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        PhaseTimer timer;
        const auto start = std::chrono::steady_clock::now();
        (void)migrate_top(world.catalog, world.formation, profile, &timer);
        const auto total = std::chrono::duration_cast<std::chrono::nanoseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        for (auto p : kAllPhases)
          records.push_back({m, n, l, std::string(to_string(p)), rep, timer.elapsed_ns(p)});
        records.push_back({m, n, l, std::string(kTotalPhase), rep, total});
      }
    }
  }
  return records;
}

inline std::string to_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "m,n,l,phase,repetition,elapsed_ns\n";
  for (const auto& r : records)
    out << r.m << ',' << r.n << ',' << r.l << ',' << r.phase << ',' << r.repetition << ','
        << r.elapsedNs << '\n';
  return out.str();
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (f.intercept + f.slope * x[k]);
    ssr += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

struct PointSummary {
  std::size_t m = 0, n = 0, l = 0;
  double medianTotalNs = 0.0;
  std::map<std::string, double> medianPhaseNs;

  std::string dominant_phase() const {
    std::string best;
    double most = -1.0;
    for (const auto& [p, v] : medianPhaseNs)
      if (v > most) {
        most = v;
        best = p;
      }
    return best;
  }
};

inline std::vector<PointSummary> summarize(const std::vector<BenchRecord>& records) {
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::map<std::string, std::vector<double>>>
      grouped;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> order;
  for (const auto& r : records) {
    auto key = std::make_tuple(r.m, r.n, r.l);
    if (!grouped.contains(key)) order.push_back(key);
    grouped[key][r.phase].push_back(static_cast<double>(r.elapsedNs));
  }
  std::vector<PointSummary> out;
  for (const auto& key : order) {
    PointSummary p;
    std::tie(p.m, p.n, p.l) = key;
    for (const auto& [phase, values] : grouped[key]) {
      if (phase == kTotalPhase) p.medianTotalNs = median(values);
      else p.medianPhaseNs[phase] = median(values);
    }
    out.push_back(std::move(p));
  }
  return out;
}

struct ScalingReport {
  std::vector<PointSummary> points;
  /// Median total time against m*n at the first component count.
  std::optional<LinearFit> sizeFit;
  /// Slope of log(time) against log(m*n); 1 means linear growth in m*n.
  std::optional<double> logLogExponent;
  /// Median total time against l at the first (m, n) point.
  std::optional<LinearFit> componentFit;
};

inline ScalingReport analyze(const std::vector<BenchRecord>& records) {
  ScalingReport rep;
  rep.points = summarize(records);
  if (rep.points.empty()) return rep;
  const auto l0 = rep.points.front().l;
  std::vector<double> x, y, lx, ly;
  for (const auto& p : rep.points) {
    if (p.l != l0) continue;
    x.push_back(static_cast<double>(p.m * p.n));
    y.push_back(p.medianTotalNs);
    lx.push_back(std::log(static_cast<double>(p.m * p.n)));
    ly.push_back(std::log(std::max(p.medianTotalNs, 1.0)));
  }
  if (std::set<double>(x.begin(), x.end()).size() >= 2) {
    rep.sizeFit = fit_linear(x, y);
    rep.logLogExponent = fit_linear(lx, ly).slope;
  }
  const auto m0 = rep.points.front().m;
  const auto n0 = rep.points.front().n;
  std::vector<double> cx, cy;
  for (const auto& p : rep.points) {
    if (p.m != m0 || p.n != n0) continue;
    cx.push_back(static_cast<double>(p.l));
    cy.push_back(p.medianTotalNs);
  }
  if (std::set<double>(cx.begin(), cx.end()).size() >= 2) rep.componentFit = fit_linear(cx, cy);
  return rep;
}

inline Json to_json(const LinearFit& f) {
  return {{"intercept", round_sig9(f.intercept)}, {"slope", round_sig9(f.slope)}, {"r2", round_sig9(f.r2)}};
}

inline Json to_json(const ScalingReport& r) {
  Json j;
  j["points"] = Json::array();
  for (const auto& p : r.points) {
    Json pj;
    pj["m"] = p.m;
    pj["n"] = p.n;
    pj["l"] = p.l;
    pj["medianTotalNs"] = round_sig9(p.medianTotalNs);
    pj["medianPhaseNs"] = Json::object();
    for (const auto& [k, v] : p.medianPhaseNs) pj["medianPhaseNs"][k] = round_sig9(v);
    pj["dominantPhase"] = p.dominant_phase();
    j["points"].push_back(std::move(pj));
  }
  j["sizeFit"] = r.sizeFit ? to_json(*r.sizeFit) : Json();
  j["logLogExponent"] = r.logLogExponent ? Json(round_sig9(*r.logLogExponent)) : Json();
  j["componentFit"] = r.componentFit ? to_json(*r.componentFit) : Json();
  return j;
}

}  // namespace fgen::bench

#endif  // FGEN_BENCH_HPP_INCLUDED
