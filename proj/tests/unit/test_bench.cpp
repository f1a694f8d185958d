#include <gtest/gtest.h>

#include <sstream>

#include "fgen/bench.hpp"

using namespace fgen;
using namespace fgen::bench;

TEST(Bench, SameSeedSameWorld) {
  const auto a = generate_synthetic(12, 7, 3, 2, 99);
  const auto b = generate_synthetic(12, 7, 3, 2, 99);
  const auto c = generate_synthetic(12, 7, 3, 2, 100);
  EXPECT_EQ(to_json(a.catalog).dump(), to_json(b.catalog).dump());
  EXPECT_EQ(to_json(a.formation).dump(), to_json(b.formation).dump());
  EXPECT_NE(to_json(a.catalog).dump(), to_json(c.catalog).dump());
}

TEST(Bench, SyntheticShape) {
  const auto w = generate_synthetic(10, 6, 3, 3, 1);
  EXPECT_EQ(w.catalog.images().size(), 10u);
  EXPECT_EQ(w.catalog.services().size(), 6u);
  EXPECT_EQ(w.formation.components().size(), 3u);
  EXPECT_EQ(w.formation.interconnections().size(), 3u);
  for (const auto& s : w.catalog.services()) {
    const double up = s.numerical.at(std::string(attr::Uptime));
    EXPECT_GE(up, 0.0);
    EXPECT_LE(up, 100.0);
  }
  for (const auto& a : w.catalog.images()) {
    const double pop = a.numerical.at(std::string(attr::Popularity));
    EXPECT_GE(pop, 0.0);
    EXPECT_LE(pop, 100.0);
  }
  const auto one = generate_synthetic(4, 4, 1, 1, 1);
  EXPECT_TRUE(one.formation.interconnections().empty());
}

TEST(Bench, LinkCostsFollowProviderAssignment) {
  const auto w = generate_synthetic(5, 5, 4, 2, 3);
  for (const auto& t : w.formation.traffic()) {
    std::size_t i = std::stoul(t.from.substr(1)) - 1, j = std::stoul(t.to.substr(1)) - 1;
    const double want = w.componentProviders[i] == w.componentProviders[j] ? kLowTrafficCost
                                                                           : kHighTrafficCost;
    EXPECT_EQ(t.localSend, want);
    EXPECT_EQ(t.internetReceive, want);
  }
}

TEST(Bench, PartialDeployabilityKeepsEveryImageDeployable) {
  const auto w = generate_synthetic(20, 10, 2, 2, 5, false);
  for (const auto& a : w.catalog.images()) {
    bool any = false;
    for (std::size_t s = 0; s < w.catalog.services().size(); ++s)
      any = any || w.catalog.deployable(*w.catalog.image_index(a.id), s);
    EXPECT_TRUE(any) << a.id;
  }
}

TEST(Bench, MigrateTopCommitsEveryComponent) {
  const auto w = generate_synthetic(8, 8, 3, 2, 4);
  const auto out = migrate_top(w.catalog, w.formation, PreferenceProfile{});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].componentId, "c1");
  EXPECT_DOUBLE_EQ(out[0].score, 1.0);
}

TEST(Bench, CsvSchema) {
  BenchConfig cfg;
  cfg.imageCounts = {3, 6};
  cfg.serviceCounts = {3, 6};
  cfg.componentCounts = {2};
  cfg.repetitions = 3;
  const auto records = run_scaling(cfg);
  EXPECT_EQ(records.size(), 2u * 3u * (kAllPhases.size() + 1));
  const auto csv = to_csv(records);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "m,n,l,phase,repetition,elapsed_ns");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
    ++rows;
  }
  EXPECT_EQ(rows, records.size());
}

TEST(Bench, ConfigValidation) {
  BenchConfig cfg;
  cfg.repetitions = 2;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.repetitions = 3;
  cfg.serviceCounts = {10};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.cartesian = true;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.grid().size(), 3u);
  cfg.imageCounts = {0};
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Bench, MedianAndFit) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(median({}), 0.0);
  const auto f = fit_linear({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  const auto noisy = fit_linear({1, 2, 3, 4}, {1, 3, 2, 4});
  EXPECT_NEAR(noisy.slope, 0.8, 1e-12);
  EXPECT_NEAR(noisy.r2, 0.64, 1e-12);
}

TEST(Bench, AnalyzeBuildsFits) {
  std::vector<BenchRecord> records;
  auto add = [&](std::size_t m, std::size_t l, double ns) {
    for (std::size_t r = 0; r < 3; ++r) {
      records.push_back({m, m, l, std::string(kTotalPhase), r, static_cast<std::int64_t>(ns)});
      records.push_back({m, m, l, "Combine", r, static_cast<std::int64_t>(ns * 0.6)});
      records.push_back({m, m, l, "Filter", r, static_cast<std::int64_t>(ns * 0.1)});
    }
  };
  for (std::size_t m : {10, 20, 40}) add(m, 3, 100.0 * m * m);
  for (std::size_t l : {1, 2}) add(10, l, 1e4 * l);
  const auto rep = analyze(records);
  ASSERT_TRUE(rep.sizeFit.has_value());
  EXPECT_NEAR(rep.sizeFit->r2, 1.0, 1e-9);
  EXPECT_NEAR(*rep.logLogExponent, 1.0, 1e-9);
  ASSERT_TRUE(rep.componentFit.has_value());
  EXPECT_EQ(rep.points.front().dominant_phase(), "Combine");
  const auto j = to_json(rep);
  EXPECT_EQ(j["points"].size(), 5u);
}

TEST(Bench, SmallScalingRunGrowsWithSize) {
  BenchConfig cfg;
  cfg.imageCounts = {5, 40};
  cfg.serviceCounts = {5, 40};
  cfg.componentCounts = {3};
  cfg.repetitions = 3;
  const auto rep = analyze(run_scaling(cfg));
  ASSERT_EQ(rep.points.size(), 2u);
  EXPECT_LT(rep.points[0].medianTotalNs, rep.points[1].medianTotalNs);
}
