#ifndef FGEN_API_HTTP_HPP_INCLUDED
#define FGEN_API_HTTP_HPP_INCLUDED

#include <map>
#include <string>

#include "httplib.h"

#include "fgen/api.hpp"

namespace fgen::api {

/// Routes every request on `server` to `service`. An `If-Match` header is
/// treated like a `version` field in the body.
inline void mount(httplib::Server& server, Service& service) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    std::string body = req.body;
    if (req.has_header("If-Match")) {
      Json doc = body.find_first_not_of(" \t\r\n") == std::string::npos
                     ? Json::object()
                     : Json::parse(body, nullptr, false);
      if (doc.is_object() && !doc.contains("version")) {
        std::string tag = req.get_header_value("If-Match");
        std::erase(tag, '"');
        try {
          doc["version"] = std::stoull(tag);
          body = doc.dump();
        } catch (const std::exception&) {
        }
      }
    }
    const Response r = service.handle(req.method, req.path, query, body);
    res.status = r.status;
    res.set_content(r.body.dump(2) + "\n", "application/json");
  };
  server.Get(R"(/.*)", forward);
  server.Post(R"(/.*)", forward);
  server.Put(R"(/.*)", forward);
}

}  // namespace fgen::api

#endif  // FGEN_API_HTTP_HPP_INCLUDED
