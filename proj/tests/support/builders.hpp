#ifndef FGEN_TESTS_BUILDERS_HPP_INCLUDED
#define FGEN_TESTS_BUILDERS_HPP_INCLUDED

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fgen/catalog.hpp"
#include "fgen/formation.hpp"

namespace builders {

inline fgen::VmImage image(std::string id, std::string feature,
                           std::map<std::string, double> num = {},
                           std::map<std::string, std::string> text = {}) {
  return {std::move(id), std::move(feature), std::move(num), std::move(text)};
}

inline fgen::CloudService service(std::string id, std::string provider, std::string location,
                                  std::map<std::string, double> num = {}) {
  return {std::move(id), std::move(provider), std::move(location), std::move(num), {}};
}

/// Every image deployable on every service, all images and all services
/// mutually compatible.
inline fgen::CompatibilitySets everything(const std::vector<fgen::VmImage>& imgs,
                                          const std::vector<fgen::CloudService>& svcs) {
  fgen::CompatibilitySets c;
  for (const auto& a : imgs)
    for (const auto& s : svcs) c.imageService.emplace(a.id, s.id);
  for (const auto& a : imgs)
    for (const auto& b : imgs)
      if (a.id < b.id) c.imageImage.emplace(a.id, b.id);
  for (const auto& a : svcs)
    for (const auto& b : svcs)
      if (a.id < b.id) c.serviceService.emplace(a.id, b.id);
  return c;
}

inline std::vector<fgen::Provider> providers(std::initializer_list<const char*> ids) {
  std::vector<fgen::Provider> out;
  for (const char* id : ids) out.push_back({id, id});
  return out;
}

inline fgen::TrafficCostEstimate traffic(std::string a, std::string b, double lr, double ls,
                                         double ir, double is) {
  return {std::move(a), std::move(b), lr, ls, ir, is};
}

}  // namespace builders

#endif  // FGEN_TESTS_BUILDERS_HPP_INCLUDED
