#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>

#include "builders.hpp"
#include "fgen/requirements.hpp"

using namespace fgen;
using builders::image;

namespace {

const std::string kLicense = "Hourly License Price";
const std::string kOs = "Operating System (OS)";

std::vector<const VmImage*> ptrs(const std::vector<VmImage>& v) {
  std::vector<const VmImage*> out;
  for (const auto& a : v) out.push_back(&a);
  return out;
}

}  // namespace

TEST(Requirements, MaxIsStrict) {
  const auto r = Requirement::max(kLicense, 0.50);
  EXPECT_TRUE(check(r, image("a", "W", {{kLicense, 0.30}})));
  EXPECT_FALSE(check(r, image("a", "W", {{kLicense, 0.50}})));
  EXPECT_FALSE(check(r, image("a", "W", {{kLicense, 0.70}})));
}

TEST(Requirements, MinIsStrict) {
  const auto r = Requirement::min("Popularity", 40);
  EXPECT_TRUE(check(r, image("a", "W", {{"Popularity", 40.5}})));
  EXPECT_FALSE(check(r, image("a", "W", {{"Popularity", 40}})));
}

TEST(Requirements, TextKinds) {
  const auto win = image("a", "W", {}, {{kOs, "Windows"}});
  EXPECT_FALSE(check(Requirement::one_of(kOs, {"Linux"}), win));
  EXPECT_TRUE(check(Requirement::one_of(kOs, {"Linux", "Windows"}), win));
  EXPECT_TRUE(check(Requirement::equals(kOs, "Windows"), win));
  EXPECT_TRUE(check(Requirement::equals("Software Feature", "W"), win));
}

TEST(Requirements, MissingAttributeFailsClosed) {
  const auto bare = image("a", "W");
  EXPECT_FALSE(check(Requirement::max(kLicense, 10), bare));
  EXPECT_FALSE(check(Requirement::min(kLicense, -1), bare));
  EXPECT_FALSE(check(Requirement::equals(kOs, "Linux"), bare));
}

TEST(Requirements, TypeMismatchIsReported) {
  const auto specs = builtin_attribute_specs().image;
  const std::vector<Requirement> bad = {Requirement::max(kOs, 1.0)};
  EXPECT_THROW(validate_requirements(bad, specs), TypeMismatch);
  const std::vector<Requirement> bad2 = {Requirement::equals(kLicense, "cheap")};
  EXPECT_THROW(validate_requirements(bad2, specs), TypeMismatch);
  const auto custom = image("a", "W", {}, {{"Tier", "gold"}});
  EXPECT_THROW((void)check(Requirement::max("Tier", 1), custom), TypeMismatch);
}

TEST(Requirements, MalformedShapeIsValidationError) {
  Requirement r = Requirement::max(kLicense, 1);
  r.textValue = "x";
  EXPECT_THROW(validate_shape(r), ValidationError);
  EXPECT_THROW(validate_shape(Requirement::one_of(kOs, {})), ValidationError);
}

TEST(Requirements, StrictFilterKeepsFullySatisfying) {
  std::vector<VmImage> imgs = {image("A", "W", {{kLicense, 0.1}}, {{kOs, "Linux"}}),
                               image("B", "W", {{kLicense, 0.9}}, {{kOs, "Linux"}}),
                               image("C", "W", {{kLicense, 0.1}}, {{kOs, "Windows"}})};
  const std::vector<Requirement> reqs = {Requirement::max(kLicense, 0.5),
                                         Requirement::equals(kOs, "Linux")};
  const auto out = filter(reqs, imgs);
  EXPECT_EQ(out.survivors, std::vector<std::string>{"A"});
  EXPECT_EQ(out.relaxationLevel, 0u);
}

TEST(Requirements, RelaxationUsesUnionOfDropOneSubsets) {
  std::vector<VmImage> imgs = {image("B", "W", {{kLicense, 0.9}}, {{kOs, "Linux"}}),
                               image("C", "W", {{kLicense, 0.1}}, {{kOs, "Windows"}}),
                               image("D", "W", {{kLicense, 0.9}}, {{kOs, "Windows"}})};
  const std::vector<Requirement> reqs = {Requirement::max(kLicense, 0.5),
                                         Requirement::equals(kOs, "Linux")};
  const auto out = filter(reqs, imgs);
  EXPECT_EQ(out.relaxationLevel, 1u);
  EXPECT_EQ(out.survivors, (std::vector<std::string>{"B", "C"}));
  EXPECT_EQ(out.droppedSets.at("B"), std::vector<std::size_t>{0});
  EXPECT_EQ(out.droppedSets.at("C"), std::vector<std::size_t>{1});
}

TEST(Requirements, RelaxationTerminatesWhereBruteForceSays) {
  // Four images, all violating both requirements in different ways.
  std::vector<VmImage> imgs = {image("a", "W", {{kLicense, 0.9}}, {{kOs, "Windows"}}),
                               image("b", "W", {{kLicense, 0.5}}, {{kOs, "Solaris"}}),
                               image("c", "W", {}, {{kOs, "Windows"}}),
                               image("d", "W", {{kLicense, 2.0}})};
  const std::vector<Requirement> reqs = {Requirement::max(kLicense, 0.5),
                                         Requirement::equals(kOs, "Linux")};
  // Enumerate every subset of requirements to drop; the level is the size of
  // the smallest subset whose removal lets some image pass.
  std::size_t expected = reqs.size() + 1;
  for (unsigned mask = 0; mask < (1u << reqs.size()); ++mask) {
    std::vector<Requirement> kept;
    for (std::size_t k = 0; k < reqs.size(); ++k)
      if (!(mask & (1u << k))) kept.push_back(reqs[k]);
    bool any = false;
    for (const auto& img : imgs) {
      bool ok = true;
      for (const auto& r : kept) ok = ok && check(r, img);
      any = any || ok;
    }
    if (any) expected = std::min<std::size_t>(expected, std::popcount(mask));
  }
  const auto out = filter(reqs, imgs);
  EXPECT_EQ(expected, 2u);
  EXPECT_EQ(out.relaxationLevel, expected);
  EXPECT_EQ(out.survivors.size(), 4u);
  for (const auto& id : out.survivors) EXPECT_EQ(out.droppedSets.at(id).size(), 2u);
}

TEST(Requirements, EmptyRequirementsKeepEverything) {
  std::vector<VmImage> imgs = {image("x", "W"), image("y", "W")};
  const auto out = filter(std::vector<Requirement>{}, imgs);
  EXPECT_EQ(out.survivors.size(), 2u);
  EXPECT_EQ(out.relaxationLevel, 0u);
}

TEST(Requirements, NoRelaxWhenDisabled) {
  std::vector<VmImage> imgs = {image("x", "W", {{kLicense, 3.0}})};
  const std::vector<Requirement> reqs = {Requirement::max(kLicense, 1)};
  const auto p = ptrs(imgs);
  const auto out = filter<VmImage>(reqs, std::span<const VmImage* const>(p), false);
  EXPECT_TRUE(out.survivors.empty());
  EXPECT_EQ(out.relaxationLevel, 0u);
}

TEST(Requirements, LevelsAreNestedOnRandomInput) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int round = 0; round < 100; ++round) {
    std::vector<VmImage> imgs;
    for (int k = 0; k < 6; ++k)
      imgs.push_back(image("i" + std::to_string(k), "W", {{kLicense, u(rng)}, {"Popularity", 100 * u(rng)}}));
    std::vector<Requirement> reqs = {Requirement::max(kLicense, u(rng)),
                                     Requirement::min("Popularity", 100 * u(rng)),
                                     Requirement::max(kLicense, u(rng))};
    const auto p = ptrs(imgs);
    std::span<const VmImage* const> view(p);
    for (std::size_t k = 0; k < reqs.size(); ++k) {
      const auto lo = survivors_at_level<VmImage>(reqs, view, k);
      const auto hi = survivors_at_level<VmImage>(reqs, view, k + 1);
      EXPECT_TRUE(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
    }
    const auto out = filter<VmImage>(reqs, view);
    EXPECT_LE(out.relaxationLevel, reqs.size());
    EXPECT_FALSE(out.survivors.empty());
    EXPECT_EQ(out.survivors, survivors_at_level<VmImage>(reqs, view, out.relaxationLevel));
    if (out.relaxationLevel > 0)
      EXPECT_TRUE(survivors_at_level<VmImage>(reqs, view, out.relaxationLevel - 1).empty());
  }
}

TEST(Requirements, JsonRoundTrip) {
  const Json doc = Json::parse(R"json([
    {"attr": "Hourly License Price", "kind": "max", "value": 0.5},
    {"attr": "Operating System (OS)", "kind": "oneOf", "values": ["BSD", "Linux"]}])json");
  const auto reqs = requirements_from_json(doc, "r");
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_EQ(reqs[0], Requirement::max(kLicense, 0.5));
  EXPECT_EQ(to_json(reqs[1]).dump(), doc[1].dump());
  EXPECT_THROW((void)requirement_from_json(Json{{"attr", "x"}, {"kind", "between"}}), ParseError);
}
