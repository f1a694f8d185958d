#include <gtest/gtest.h>

#include <algorithm>

#include "builders.hpp"
#include "fgen/catalog.hpp"

using namespace fgen;
using builders::image;
using builders::service;

namespace {

Json small_catalog_doc() {
  Json doc;
  doc["providers"] = {{{"id", "aws"}}, {{"id", "rs"}}};
  doc["images"] = Json::array();
  for (const char* id : {"a1", "a2", "a3"})
    doc["images"].push_back({{"id", id},
                             {"feature", "Web Server"},
                             {"numerical", {{"Popularity", 50.0}, {"Hourly License Price", 0.1}}}});
  doc["services"] = Json::array();
  for (const char* id : {"s1", "s2", "s3"})
    doc["services"].push_back({{"id", id},
                               {"provider", id[1] == '1' ? "aws" : "rs"},
                               {"location", "USA"},
                               {"numerical", {{"Uptime", 99.9}}}});
  Json d = Json::array();
  for (const char* a : {"a1", "a2", "a3"})
    for (const char* s : {"s1", "s2", "s3"}) d.push_back({a, s});
  doc["compat"] = {{"imageService", d}};
  return doc;
}

}  // namespace

TEST(Catalog, LoadsCountsFromDocument) {
  const auto c = catalog_from_json(small_catalog_doc());
  EXPECT_EQ(c.providers().size(), 2u);
  EXPECT_EQ(c.images().size(), 3u);
  EXPECT_EQ(c.services().size(), 3u);
  EXPECT_EQ(c.compat().imageService.size(), 9u);
  EXPECT_TRUE(c.deployable(*c.image_index("a2"), *c.service_index("s3")));
}

TEST(Catalog, PopularityAboveHundredIsRejectedWithLocation) {
  auto doc = small_catalog_doc();
  doc["images"][1]["numerical"]["Popularity"] = 150.0;
  try {
    (void)catalog_from_json(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("a2"), std::string::npos);
    EXPECT_NE(e.detail().find("Popularity"), std::string::npos);
  }
}

TEST(Catalog, UnknownProviderIsRejected) {
  auto doc = small_catalog_doc();
  doc["services"][0]["provider"] = "px";
  EXPECT_THROW((void)catalog_from_json(doc), ValidationError);
}

TEST(Catalog, DuplicateIdsAndDanglingCompatAreRejected) {
  auto dup = small_catalog_doc();
  dup["images"][2]["id"] = "a1";
  EXPECT_THROW((void)catalog_from_json(dup), ValidationError);
  auto dangling = small_catalog_doc();
  dangling["compat"]["imageImage"] = Json::array({Json::array({"a1", "zz"})});
  EXPECT_THROW((void)catalog_from_json(dangling), ValidationError);
}

TEST(Catalog, MalformedDocumentsAreParseErrors) {
  auto doc = small_catalog_doc();
  doc["images"][0]["numerical"]["Popularity"] = "high";
  EXPECT_THROW((void)catalog_from_json(doc), ParseError);
  EXPECT_THROW((void)catalog_from_json(Json::array()), ParseError);
  EXPECT_THROW((void)parse_json_text("{not json", "x"), ParseError);
}

TEST(Catalog, TextValueOnNumericalKeyIsRejected) {
  auto doc = small_catalog_doc();
  doc["images"][0]["nonNumerical"] = {{"Popularity", "high"}};
  EXPECT_THROW((void)catalog_from_json(doc), ValidationError);
}

TEST(Catalog, AbsentBuiltinsAndUnknownKeysOnlyWarn) {
  auto doc = small_catalog_doc();
  doc["images"][0]["numerical"]["Carbon Footprint"] = 3.0;
  const auto c = catalog_from_json(doc);
  const auto& w = c.warnings();
  EXPECT_TRUE(std::any_of(w.begin(), w.end(), [](const std::string& s) {
    return s.find("Carbon Footprint") != std::string::npos;
  }));
  EXPECT_TRUE(std::any_of(w.begin(), w.end(), [](const std::string& s) {
    return s.find("'Age' absent") != std::string::npos;
  }));
}

TEST(Catalog, BuiltinSpecsFollowPublishedTables) {
  const auto& specs = builtin_attribute_specs();
  const auto* license = specs.image.find_numerical("Hourly License Price");
  ASSERT_NE(license, nullptr);
  EXPECT_EQ(license->influence, Influence::Negative);
  EXPECT_EQ(license->metric, "$/h");
  const auto* uptime = specs.service.find_numerical("Uptime");
  ASSERT_NE(uptime, nullptr);
  EXPECT_EQ(uptime->influence, Influence::Positive);
  EXPECT_EQ(uptime->range.lower, 0.0);
  EXPECT_EQ(uptime->range.upper, 100.0);
  EXPECT_NE(specs.image.find_non_numerical("Operating System (OS)"), nullptr);
  EXPECT_EQ(specs.image.find_numerical("OS Version")->influence, Influence::None);
}

TEST(Catalog, CompatibilityIsSymmetricAndReflexive) {
  std::vector<VmImage> imgs = {image("a", "Web Server"), image("b", "Web Server"),
                               image("c", "Web Server")};
  std::vector<CloudService> svcs = {service("s", "p", "USA"), service("t", "p", "USA")};
  CompatibilitySets compat;
  compat.imageImage.emplace("b", "a");
  compat.serviceService.emplace("t", "s");
  const auto cat = Catalog::build(builders::providers({"p"}), imgs, svcs, compat);
  const auto a = *cat.image_index("a"), b = *cat.image_index("b"), c = *cat.image_index("c");
  EXPECT_TRUE(cat.images_compatible(a, b));
  EXPECT_TRUE(cat.images_compatible(b, a));
  EXPECT_TRUE(cat.images_compatible(c, c));
  EXPECT_FALSE(cat.images_compatible(a, c));
  EXPECT_TRUE(cat.services_compatible(*cat.service_index("s"), *cat.service_index("t")));
  EXPECT_FALSE(cat.deployable(a, *cat.service_index("s")));
  EXPECT_EQ(cat.compat().imageImage.count({"a", "b"}), 1u);
}

TEST(Catalog, JsonRoundTripIsLossless) {
  const auto c = catalog_from_json(small_catalog_doc());
  const auto again = catalog_from_json(to_json(c));
  EXPECT_TRUE(c == again);
  EXPECT_EQ(to_json(c).dump(), to_json(again).dump());
}

TEST(Catalog, ServiceTextValuesExposeProviderAndLocation) {
  const auto s = service("s", "aws", "Germany");
  EXPECT_EQ(s.text_value("Provider"), "aws");
  EXPECT_EQ(s.text_value("Location Country"), "Germany");
  const auto a = image("a", "Database");
  EXPECT_EQ(a.text_value("Software Feature"), "Database");
  EXPECT_FALSE(a.numeric_value("Age").has_value());
}
