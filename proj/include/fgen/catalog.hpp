#ifndef FGEN_CATALOG_HPP_INCLUDED
#define FGEN_CATALOG_HPP_INCLUDED

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fgen/error.hpp"
#include "fgen/json_util.hpp"

namespace fgen {

/// Built-in attribute keys.
namespace attr {
inline constexpr std::string_view HourlyLicensePrice = "Hourly License Price";
inline constexpr std::string_view Popularity = "Popularity";
inline constexpr std::string_view Age = "Age";
inline constexpr std::string_view OsVersion = "OS Version";
inline constexpr std::string_view SoftwareVersion = "Software Version";

inline constexpr std::string_view VirtualizationFormat = "Virtualization Format";
inline constexpr std::string_view OperatingSystem = "Operating System (OS)";
inline constexpr std::string_view ImplementationLanguage = "Implementation Language";
inline constexpr std::string_view SoftwareFeature = "Software Feature";
inline constexpr std::string_view Software = "Software";

inline constexpr std::string_view HourlyCpuPrice = "Hourly CPU Price";
inline constexpr std::string_view NetworkSendPrice = "Network Send Price";
inline constexpr std::string_view NetworkReceivePrice = "Network Receive Price";
inline constexpr std::string_view InternetSendPrice = "Internet Send Price";
inline constexpr std::string_view InternetReceivePrice = "Internet Receive Price";
inline constexpr std::string_view CpuPerformance = "CPU Performance";
inline constexpr std::string_view CpuCores = "CPU Cores";
inline constexpr std::string_view RamPerformance = "RAM Performance";
inline constexpr std::string_view RamSize = "RAM Size";
inline constexpr std::string_view DiskPerformance = "Disk Performance";
inline constexpr std::string_view DiskSize = "Disk Size";
inline constexpr std::string_view MaxLatency = "Max. Latency";
inline constexpr std::string_view AvgLatency = "Avg. Latency";
inline constexpr std::string_view Uptime = "Uptime";
inline constexpr std::string_view ServicePopularity = "Service Popularity";

inline constexpr std::string_view Provider = "Provider";
inline constexpr std::string_view LocationCountry = "Location Country";
}  // namespace attr

enum class Influence { Positive, Negative, None };
enum class Variability { Static, Dynamic };

inline std::string_view to_string(Influence i) {
  switch (i) {
    case Influence::Positive: return "positive";
    case Influence::Negative: return "negative";
    case Influence::None: return "none";
  }
  return "none";
}

inline std::optional<Influence> parse_influence(std::string_view s) {
  if (iequals(s, "positive")) return Influence::Positive;
  if (iequals(s, "negative")) return Influence::Negative;
  if (iequals(s, "none")) return Influence::None;
  return std::nullopt;
}

/// Closed lower bound; upper bound is closed when finite, open at infinity.
struct ValueRange {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v >= lower && v <= upper; }
  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

struct NumericalAttributeSpec {
  std::string key;
  Influence influence = Influence::None;
  Variability variability = Variability::Static;
  std::string metric;
  ValueRange range;
};

struct NonNumericalAttributeSpec {
  std::string key;
  std::optional<std::set<std::string>> allowedValues;
};

struct AttributeSpecs {
  std::vector<NumericalAttributeSpec> numerical;
  std::vector<NonNumericalAttributeSpec> nonNumerical;

  const NumericalAttributeSpec* find_numerical(std::string_view key) const {
    for (const auto& s : numerical)
      if (s.key == key) return &s;
    return nullptr;
  }
  const NonNumericalAttributeSpec* find_non_numerical(std::string_view key) const {
    for (const auto& s : nonNumerical)
      if (s.key == key) return &s;
    return nullptr;
  }
};

struct BuiltinSpecs {
  AttributeSpecs image;
  AttributeSpecs service;
};

/// The image and service attribute tables, with influence, variability and
/// metric exactly as published. OS/Software Version carry influence None and
/// therefore never become scoring criteria.
inline const BuiltinSpecs& builtin_attribute_specs() {
  static const BuiltinSpecs specs = [] {
    const ValueRange unbounded{};
    const ValueRange percent{0.0, 100.0};
    auto num = [](std::string_view key, Influence inf, Variability var, std::string metric,
                  ValueRange range) {
      return NumericalAttributeSpec{std::string(key), inf, var, std::move(metric), range};
    };
    auto text = [](std::string_view key) {
      return NonNumericalAttributeSpec{std::string(key), std::nullopt};
    };
    using enum Influence;
    using enum Variability;
    BuiltinSpecs s;
    s.image.numerical = {
        num(attr::HourlyLicensePrice, Negative, Dynamic, "$/h", unbounded),
        num(attr::Popularity, Positive, Dynamic, "%", percent),
        num(attr::Age, Positive, Dynamic, "Days", unbounded),
        num(attr::OsVersion, None, Static, "Version", unbounded),
        num(attr::SoftwareVersion, None, Static, "Version", unbounded),
    };
    s.image.nonNumerical = {text(attr::VirtualizationFormat), text(attr::OperatingSystem),
                            text(attr::ImplementationLanguage), text(attr::SoftwareFeature),
                            text(attr::Software)};
    s.service.numerical = {
        num(attr::HourlyCpuPrice, Negative, Dynamic, "$/h", unbounded),
        num(attr::NetworkSendPrice, Negative, Dynamic, "$/B", unbounded),
        num(attr::NetworkReceivePrice, Negative, Dynamic, "$/B", unbounded),
        num(attr::InternetSendPrice, Negative, Dynamic, "$/h", unbounded),
        num(attr::InternetReceivePrice, Negative, Dynamic, "$/B", unbounded),
        num(attr::CpuPerformance, Positive, Dynamic, "Flops", unbounded),
        num(attr::CpuCores, Positive, Dynamic, "Cores", unbounded),
        num(attr::RamPerformance, Positive, Dynamic, "Flops", unbounded),
        num(attr::RamSize, Positive, Dynamic, "Bit", unbounded),
        num(attr::DiskPerformance, Positive, Dynamic, "Flops", unbounded),
        num(attr::DiskSize, Positive, Dynamic, "Bit", unbounded),
        num(attr::MaxLatency, Negative, Dynamic, "ms", unbounded),
        num(attr::AvgLatency, Negative, Dynamic, "ms", unbounded),
        num(attr::Uptime, Positive, Dynamic, "%", percent),
        num(attr::ServicePopularity, Positive, Dynamic, "%", percent),
    };
    s.service.nonNumerical = {text(attr::Provider), text(attr::LocationCountry)};
    return s;
  }();
  return specs;
}

struct Provider {
  std::string id;
  std::string name;
  friend bool operator==(const Provider&, const Provider&) = default;
};

struct VmImage {
  std::string id;
  std::string feature;
  std::map<std::string, double> numerical;
  std::map<std::string, std::string> nonNumerical;

  std::optional<double> numeric_value(std::string_view key) const {
    auto it = numerical.find(std::string(key));
    if (it == numerical.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::string> text_value(std::string_view key) const {
    if (key == attr::SoftwareFeature) return feature;
    auto it = nonNumerical.find(std::string(key));
    if (it == nonNumerical.end()) return std::nullopt;
    return it->second;
  }
  friend bool operator==(const VmImage&, const VmImage&) = default;
};

struct CloudService {
  std::string id;
  std::string providerId;
  std::string location;
  std::map<std::string, double> numerical;
  std::map<std::string, std::string> nonNumerical;

  std::optional<double> numeric_value(std::string_view key) const {
    auto it = numerical.find(std::string(key));
    if (it == numerical.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::string> text_value(std::string_view key) const {
    if (key == attr::Provider) return providerId;
    if (key == attr::LocationCountry) return location;
    auto it = nonNumerical.find(std::string(key));
    if (it == nonNumerical.end()) return std::nullopt;
    return it->second;
  }
  friend bool operator==(const CloudService&, const CloudService&) = default;
};

using IdPair = std::pair<std::string, std::string>;

/// imageService holds ordered (image, service) pairs; the two inter-layer
/// relations hold unordered pairs stored as (min, max).
struct CompatibilitySets {
  std::set<IdPair> imageService;
  std::set<IdPair> imageImage;
  std::set<IdPair> serviceService;

  static IdPair canonical(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
  }
  friend bool operator==(const CompatibilitySets&, const CompatibilitySets&) = default;
};

/// Immutable world model. Construct through Catalog::build, which validates
/// every invariant and indexes the compatibility relations for O(1) lookup.
class Catalog {
 public:
  static Catalog build(std::vector<Provider> providers, std::vector<VmImage> images,
                       std::vector<CloudService> services, CompatibilitySets compat);

  const std::vector<Provider>& providers() const { return providers_; }
  const std::vector<VmImage>& images() const { return images_; }
  const std::vector<CloudService>& services() const { return services_; }
  const CompatibilitySets& compat() const { return compat_; }
  const AttributeSpecs& image_specs() const { return builtin_attribute_specs().image; }
  const AttributeSpecs& service_specs() const { return builtin_attribute_specs().service; }
  /// Non-fatal findings from construction (unknown keys, absent built-ins).
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::optional<std::size_t> image_index(std::string_view id) const {
    return lookup(imageIndex_, id);
  }
  std::optional<std::size_t> service_index(std::string_view id) const {
    return lookup(serviceIndex_, id);
  }
  const VmImage* find_image(std::string_view id) const {
    auto i = image_index(id);
    return i ? &images_[*i] : nullptr;
  }
  const CloudService* find_service(std::string_view id) const {
    auto i = service_index(id);
    return i ? &services_[*i] : nullptr;
  }
  const Provider* find_provider(std::string_view id) const {
    for (const auto& p : providers_)
      if (p.id == id) return &p;
    return nullptr;
  }

  bool deployable(std::size_t image, std::size_t service) const {
    return deploy_[image * services_.size() + service] != 0;
  }
  /// Identical ids are always compatible with themselves.
  bool images_compatible(std::size_t a, std::size_t b) const {
    return a == b || imageCompat_[a * images_.size() + b] != 0;
  }
  bool services_compatible(std::size_t a, std::size_t b) const {
    return a == b || serviceCompat_[a * services_.size() + b] != 0;
  }

  friend bool operator==(const Catalog& a, const Catalog& b) {
    return a.providers_ == b.providers_ && a.images_ == b.images_ &&
           a.services_ == b.services_ && a.compat_ == b.compat_;
  }

 private:
  using Index = std::unordered_map<std::string, std::size_t>;

  static std::optional<std::size_t> lookup(const Index& idx, std::string_view id) {
    auto it = idx.find(std::string(id));
    if (it == idx.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Provider> providers_;
  std::vector<VmImage> images_;
  std::vector<CloudService> services_;
  CompatibilitySets compat_;
  std::vector<std::string> warnings_;
  Index imageIndex_;
  Index serviceIndex_;
  std::vector<char> deploy_;
  std::vector<char> imageCompat_;
  std::vector<char> serviceCompat_;
};

namespace catalog_detail {

inline void check_numerical(const std::map<std::string, double>& values,
                            const std::map<std::string, std::string>& texts,
                            const AttributeSpecs& specs, const std::string& owner,
                            std::vector<std::string>& warnings) {
  for (const auto& [key, value] : values) {
    if (!std::isfinite(value))
      throw ValidationError(owner + ": attribute '" + key + "' is not finite", owner + "." + key);
    if (const auto* spec = specs.find_numerical(key)) {
      if (!spec->range.contains(value)) {
        throw ValidationError(owner + ": attribute '" + key + "' = " + std::to_string(value) +
                                  " is outside its value range",
                              owner + "." + key);
      }
    } else if (specs.find_non_numerical(key)) {
      throw ValidationError(owner + ": attribute '" + key + "' is non-numerical",
                            owner + "." + key);
    } else {
      warnings.push_back(owner + ": unknown numerical attribute '" + key + "'");
    }
  }
  for (const auto& [key, value] : texts) {
    if (const auto* spec = specs.find_non_numerical(key)) {
      if (spec->allowedValues && !spec->allowedValues->contains(value))
        throw ValidationError(owner + ": value '" + value + "' not allowed for '" + key + "'",
                              owner + "." + key);
    } else if (specs.find_numerical(key)) {
      throw ValidationError(owner + ": attribute '" + key + "' is numerical", owner + "." + key);
    } else {
      warnings.push_back(owner + ": unknown non-numerical attribute '" + key + "'");
    }
  }
  for (const auto& spec : specs.numerical) {
    if (!values.contains(spec.key))
      warnings.push_back(owner + ": built-in attribute '" + spec.key + "' absent");
  }
}

}  // namespace catalog_detail

inline Catalog Catalog::build(std::vector<Provider> providers, std::vector<VmImage> images,
                              std::vector<CloudService> services, CompatibilitySets compat) {
  Catalog c;
  std::set<std::string> providerIds;
  for (const auto& p : providers) {
    if (p.id.empty()) throw ValidationError("provider with empty id", "providers");
    if (!providerIds.insert(p.id).second)
      throw ValidationError("duplicate provider id '" + p.id + "'", "providers[" + p.id + "]");
  }
  const auto& specs = builtin_attribute_specs();
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    const std::string owner = "images[" + img.id + "]";
    if (img.id.empty()) throw ValidationError("image with empty id", "images");
    if (!c.imageIndex_.emplace(img.id, i).second)
      throw ValidationError("duplicate image id '" + img.id + "'", owner);
    if (img.feature.empty())
      throw ValidationError(owner + ": software feature missing", owner + ".feature");
    catalog_detail::check_numerical(img.numerical, img.nonNumerical, specs.image, owner,
                                    c.warnings_);
  }
  for (std::size_t j = 0; j < services.size(); ++j) {
    const auto& svc = services[j];
    const std::string owner = "services[" + svc.id + "]";
    if (svc.id.empty()) throw ValidationError("service with empty id", "services");
    if (!c.serviceIndex_.emplace(svc.id, j).second)
      throw ValidationError("duplicate service id '" + svc.id + "'", owner);
    if (!providerIds.contains(svc.providerId))
      throw ValidationError(owner + ": unknown provider '" + svc.providerId + "'",
                            owner + ".provider");
    catalog_detail::check_numerical(svc.numerical, svc.nonNumerical, specs.service, owner,
                                    c.warnings_);
  }

  const std::size_t m = images.size();
  const std::size_t n = services.size();
  c.deploy_.assign(m * n, 0);
  c.imageCompat_.assign(m * m, 0);
  c.serviceCompat_.assign(n * n, 0);
  auto need = [](const Index& idx, const std::string& id, const char* set) {
    auto it = idx.find(id);
    if (it == idx.end())
      throw ValidationError(std::string("compat.") + set + " references unknown id '" + id + "'",
                            std::string("compat.") + set);
    return it->second;
  };
  CompatibilitySets canon;
  for (const auto& [a, s] : compat.imageService) {
    c.deploy_[need(c.imageIndex_, a, "imageService") * n + need(c.serviceIndex_, s, "imageService")] = 1;
    canon.imageService.emplace(a, s);
  }
  for (const auto& [a, b] : compat.imageImage) {
    auto ia = need(c.imageIndex_, a, "imageImage");
    auto ib = need(c.imageIndex_, b, "imageImage");
    c.imageCompat_[ia * m + ib] = c.imageCompat_[ib * m + ia] = 1;
    canon.imageImage.insert(CompatibilitySets::canonical(a, b));
  }
  for (const auto& [a, b] : compat.serviceService) {
    auto sa = need(c.serviceIndex_, a, "serviceService");
    auto sb = need(c.serviceIndex_, b, "serviceService");
    c.serviceCompat_[sa * n + sb] = c.serviceCompat_[sb * n + sa] = 1;
    canon.serviceService.insert(CompatibilitySets::canonical(a, b));
  }

  c.providers_ = std::move(providers);
  c.images_ = std::move(images);
  c.services_ = std::move(services);
  c.compat_ = std::move(canon);
  return c;
}

// ---------------------------------------------------------------------------
// JSON document

namespace catalog_detail {

inline std::map<std::string, double> read_numbers(const Json& j, const std::string& ctx) {
  std::map<std::string, double> out;
  if (!j.is_object()) throw ParseError("expected an object", ctx);
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ParseError("expected a number", ctx + "." + k);
    out.emplace(k, v.get<double>());
  }
  return out;
}

inline std::map<std::string, std::string> read_texts(const Json& j, const std::string& ctx) {
  std::map<std::string, std::string> out;
  if (!j.is_object()) throw ParseError("expected an object", ctx);
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw ParseError("expected a string", ctx + "." + k);
    out.emplace(k, v.get<std::string>());
  }
  return out;
}

inline std::vector<IdPair> read_pairs(const Json& compat, std::string_view key) {
  std::vector<IdPair> out;
  const std::string ctx = "compat." + std::string(key);
  auto it = compat.find(key);
  if (it == compat.end()) return out;
  if (!it->is_array()) throw ParseError("expected an array", ctx);
  for (const auto& p : *it) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      throw ParseError("expected a pair of ids", ctx);
    out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  return out;
}

}  // namespace catalog_detail

inline Catalog catalog_from_json(const Json& doc) {
  using namespace catalog_detail;
  if (!doc.is_object()) throw ParseError("catalog document must be an object", "");
  std::vector<Provider> providers;
  for (const auto& p : require_array(doc, "providers", "")) {
    providers.push_back({require_string(p, "id", "providers[]"),
                         p.contains("name") ? require_string(p, "name", "providers[]") : ""});
  }
  std::vector<VmImage> images;
  for (const auto& j : require_array(doc, "images", "")) {
    VmImage img;
    img.id = require_string(j, "id", "images[]");
    const std::string ctx = "images[" + img.id + "]";
    img.feature = require_string(j, "feature", ctx);
    if (j.contains("numerical")) img.numerical = read_numbers(j["numerical"], ctx + ".numerical");
    if (j.contains("nonNumerical"))
      img.nonNumerical = read_texts(j["nonNumerical"], ctx + ".nonNumerical");
    images.push_back(std::move(img));
  }
  std::vector<CloudService> services;
  for (const auto& j : require_array(doc, "services", "")) {
    CloudService svc;
    svc.id = require_string(j, "id", "services[]");
    const std::string ctx = "services[" + svc.id + "]";
    svc.providerId = require_string(j, "provider", ctx);
    svc.location = require_string(j, "location", ctx);
    if (j.contains("numerical")) svc.numerical = read_numbers(j["numerical"], ctx + ".numerical");
    if (j.contains("nonNumerical"))
      svc.nonNumerical = read_texts(j["nonNumerical"], ctx + ".nonNumerical");
    services.push_back(std::move(svc));
  }
  CompatibilitySets compat;
  if (doc.contains("compat")) {
    const Json& cj = doc["compat"];
    if (!cj.is_object()) throw ParseError("expected an object", "compat");
    for (auto& p : read_pairs(cj, "imageService")) compat.imageService.insert(std::move(p));
    for (auto& p : read_pairs(cj, "imageImage")) compat.imageImage.insert(std::move(p));
    for (auto& p : read_pairs(cj, "serviceService")) compat.serviceService.insert(std::move(p));
  }
  return Catalog::build(std::move(providers), std::move(images), std::move(services),
                        std::move(compat));
}

inline Catalog load_catalog(const std::string& path) {
  return catalog_from_json(read_json_file(path));
}

inline Json to_json(const Catalog& c) {
  Json doc;
  doc["providers"] = Json::array();
  for (const auto& p : c.providers()) doc["providers"].push_back({{"id", p.id}, {"name", p.name}});
  doc["images"] = Json::array();
  for (const auto& img : c.images()) {
    Json j;
    j["id"] = img.id;
    j["feature"] = img.feature;
    j["numerical"] = Json::object();
    for (const auto& [k, v] : img.numerical) j["numerical"][k] = v;
    j["nonNumerical"] = Json::object();
    for (const auto& [k, v] : img.nonNumerical) j["nonNumerical"][k] = v;
    doc["images"].push_back(std::move(j));
  }
  doc["services"] = Json::array();
  for (const auto& svc : c.services()) {
    Json j;
    j["id"] = svc.id;
    j["provider"] = svc.providerId;
    j["location"] = svc.location;
    j["numerical"] = Json::object();
    for (const auto& [k, v] : svc.numerical) j["numerical"][k] = v;
    j["nonNumerical"] = Json::object();
    for (const auto& [k, v] : svc.nonNumerical) j["nonNumerical"][k] = v;
    doc["services"].push_back(std::move(j));
  }
  auto pairs = [](const std::set<IdPair>& s) {
    Json arr = Json::array();
    for (const auto& [a, b] : s) arr.push_back({a, b});
    return arr;
  };
  doc["compat"] = {{"imageService", pairs(c.compat().imageService)},
                   {"imageImage", pairs(c.compat().imageImage)},
                   {"serviceService", pairs(c.compat().serviceService)}};
  return doc;
}

}  // namespace fgen

#endif  // FGEN_CATALOG_HPP_INCLUDED
