#ifndef FGEN_API_HPP_INCLUDED
#define FGEN_API_HPP_INCLUDED

// Transport-independent request handling for the HTTP service. The httplib
// binding in api_http.hpp only forwards method, path, query and body here.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fgen/catalog.hpp"
#include "fgen/engine.hpp"
#include "fgen/error.hpp"
#include "fgen/formation.hpp"
#include "fgen/json_util.hpp"
#include "fgen/session.hpp"

namespace fgen::api {

struct Response {
  int status = 200;
  Json body;
};

struct Config {
  std::chrono::seconds sessionTtl{std::chrono::hours(4)};
  /// When set, each session's event log is appended to <dir>/<id>.jsonl.
  std::optional<std::string> logDir;
  std::function<std::string()> newSessionId;
  MigrationSession::Clock clock = utc_now_iso8601;
};

inline int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return 400;
    case ErrorCode::UnknownComponent: return 404;
    case ErrorCode::AlreadyCommitted:
    case ErrorCode::NotEvaluated: return 409;
    default: return 422;
  }
}

inline Response error_response(int status, std::string_view code, const std::string& message,
                               const std::string& detail = {}) {
  return {status, {{"code", code}, {"message", message}, {"detail", detail}}};
}

inline Json image_json(const VmImage& img) {
  Json j;
  j["id"] = img.id;
  j["feature"] = img.feature;
  j["numerical"] = Json::object();
  for (const auto& [k, v] : img.numerical) j["numerical"][k] = v;
  j["nonNumerical"] = Json::object();
  for (const auto& [k, v] : img.nonNumerical) j["nonNumerical"][k] = v;
  return j;
}

inline Json service_json(const CloudService& s) {
  Json j;
  j["id"] = s.id;
  j["provider"] = s.providerId;
  j["location"] = s.location;
  j["numerical"] = Json::object();
  for (const auto& [k, v] : s.numerical) j["numerical"][k] = v;
  j["nonNumerical"] = Json::object();
  for (const auto& [k, v] : s.nonNumerical) j["nonNumerical"][k] = v;
  return j;
}

/// In-memory session store and request router. Requests for one session are
/// serialized by that session's mutex; every mutation bumps its version, and
/// writes carrying a stale `version` are rejected with 409.
class Service {
 public:
  explicit Service(std::shared_ptr<const Catalog> catalog, Config config = {})
      : catalog_(std::move(catalog)), config_(std::move(config)) {
    if (!catalog_) throw ValidationError("service started without a catalog", "catalog");
    if (!config_.newSessionId) {
      config_.newSessionId = [this] {
        std::random_device rd;
        std::uniform_int_distribution<std::uint64_t> d;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d(rd)));
        return std::string(buf);
      };
    }
  }

  Response handle(std::string_view method, std::string_view path,
                  const std::multimap<std::string, std::string>& query, std::string_view body) {
    try {
      return route(method, split(path), query, body);
    } catch (const Error& e) {
      return error_response(status_for(e.code()), to_string(e.code()), e.what(), e.detail());
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "ParseError", e.what());
    }
  }

  Response handle(std::string_view method, std::string_view path, std::string_view body = {}) {
    return handle(method, path, {}, body);
  }

  std::size_t session_count() {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

 private:
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<MigrationSession> session;
    std::uint64_t version = 1;
    std::chrono::steady_clock::time_point touched = std::chrono::steady_clock::now();
    std::size_t persisted = 0;
  };

  static std::vector<std::string> split(std::string_view path) {
    std::vector<std::string> out;
    std::size_t k = 0;
    while (k < path.size()) {
      while (k < path.size() && path[k] == '/') ++k;
      std::size_t e = k;
      while (e < path.size() && path[e] != '/') ++e;
      if (e > k) out.emplace_back(path.substr(k, e - k));
      k = e;
    }
    return out;
  }

  static Json parse_body(std::string_view body) {
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return Json::object();
    return parse_json_text(body, "request body");
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard lock(mutex_);
    sweep();
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return nullptr;
    return it->second;
  }

  void sweep() {
    const auto now = std::chrono::steady_clock::now();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      std::unique_lock entryLock(it->second->mutex, std::try_to_lock);
      if (entryLock.owns_lock() && now - it->second->touched > config_.sessionTtl)
        it = sessions_.erase(it);
      else
        ++it;
    }
  }

  void persist(Entry& e) {
    if (config_.logDir) {
      append_event_log(*config_.logDir + "/" + e.session->id() + ".jsonl", e.session->events(),
                       e.persisted);
    }
    e.persisted = e.session->events().size();
  }

  static std::optional<Response> check_version(const Entry& e, const Json& body) {
    if (body.is_object() && body.contains("version")) {
      const auto& v = body["version"];
      if (!v.is_number_integer() || v.get<std::uint64_t>() != e.version)
        return error_response(409, "VersionConflict",
                              "session was modified; current version is " +
                                  std::to_string(e.version),
                              "version");
    }
    return std::nullopt;
  }

  Json snapshot(const Entry& e) const {
    const auto& s = *e.session;
    Json j;
    j["sessionId"] = s.id();
    j["version"] = e.version;
    j["formation"] = to_json(s.formation());
    j["pendingComponent"] = s.pending() ? Json(*s.pending()) : Json();
    j["candidateImages"] = s.candidate_images();
    j["history"] = history_json(s);
    j["lastResults"] = s.last_results() ? to_json(*s.last_results()) : Json();
    j["warnings"] = s.warnings();
    return j;
  }

  Response route(std::string_view method, const std::vector<std::string>& seg,
                 const std::multimap<std::string, std::string>& query, std::string_view body) {
    if (seg.size() == 2 && seg[0] == "catalog" && method == "GET") {
      if (seg[1] == "images") {
        std::optional<std::string> feature;
        if (auto it = query.find("feature"); it != query.end() && !it->second.empty())
          feature = it->second;
        Json arr = Json::array();
        for (const auto& img : catalog_->images())
          if (!feature || iequals(img.feature, *feature)) arr.push_back(image_json(img));
        return {200, {{"images", std::move(arr)}}};
      }
      if (seg[1] == "services") {
        Json arr = Json::array();
        for (const auto& s : catalog_->services()) arr.push_back(service_json(s));
        return {200, {{"services", std::move(arr)}}};
      }
    }
    if (seg.size() == 1 && seg[0] == "sessions" && method == "POST") return create(body);
    if (seg.size() >= 2 && seg[0] == "sessions") {
      auto entry = find(seg[1]);
      if (!entry)
        return error_response(404, "UnknownSession", "no such session '" + seg[1] + "'", seg[1]);
      std::lock_guard lock(entry->mutex);
      entry->touched = std::chrono::steady_clock::now();
      if (seg.size() == 2 && method == "GET") return {200, snapshot(*entry)};
      if (seg.size() == 3 && seg[2] == "history" && method == "GET")
        return {200, {{"sessionId", seg[1]}, {"history", history_json(*entry->session)}}};
      if (seg.size() == 3 && seg[2] == "events" && method == "GET") {
        Json arr = Json::array();
        for (const auto& e : entry->session->events()) arr.push_back(to_json(e));
        return {200, {{"sessionId", seg[1]}, {"events", std::move(arr)}}};
      }
      if (seg.size() == 3 && seg[2] == "formation" && method == "PUT")
        return put_formation(*entry, parse_body(body));
      if (seg.size() == 5 && seg[2] == "components")
        return component_route(*entry, method, seg[3], seg[4], parse_body(body));
    }
    return error_response(404, "NotFound",
                          "no route for " + std::string(method) + " /" + join(seg), "");
  }

  static std::string join(const std::vector<std::string>& seg) {
    std::string out;
    for (std::size_t k = 0; k < seg.size(); ++k) out += (k ? "/" : "") + seg[k];
    return out;
  }

  Response create(std::string_view body) {
    const Json doc = parse_body(body);
    const Json& formationDoc = doc.contains("formation") ? doc["formation"] : doc;
    auto entry = std::make_shared<Entry>();
    const std::string id = config_.newSessionId();
    entry->session = std::make_unique<MigrationSession>(id, catalog_,
                                                        formation_from_json(formationDoc),
                                                        config_.clock);
    {
      std::lock_guard lock(mutex_);
      if (sessions_.contains(id))
        return error_response(409, "SessionExists", "session id already in use", id);
      sessions_.emplace(id, entry);
    }
    std::lock_guard lock(entry->mutex);
    persist(*entry);
    return {201,
            {{"sessionId", id},
             {"version", entry->version},
             {"warnings", entry->session->formation().warnings()}}};
  }

  Response put_formation(Entry& e, const Json& body) {
    if (auto conflict = check_version(e, body)) return *conflict;
    const Json& formationDoc = body.contains("formation") ? body["formation"] : body;
    e.session->redefine_formation(formation_from_json(formationDoc));
    ++e.version;
    persist(e);
    return {200, snapshot(e)};
  }

  Response component_route(Entry& e, std::string_view method, const std::string& component,
                           const std::string& action, const Json& body) {
    auto& s = *e.session;
    if (action == "select" && method == "POST") {
      if (auto conflict = check_version(e, body)) return *conflict;
      s.select_component(component);
      ++e.version;
      persist(e);
      return {200,
              {{"version", e.version},
               {"pendingComponent", component},
               {"candidateImages", s.candidate_images()},
               {"warnings", s.warnings()}}};
    }
    if (action == "preferences" && method == "PUT") {
      if (auto conflict = check_version(e, body)) return *conflict;
      const Json& prefs = body.contains("preferences") ? body["preferences"] : body;
      s.set_preferences(component, prefs);
      ++e.version;
      persist(e);
      return {200, {{"version", e.version}, {"component", component}}};
    }
    if (action == "evaluate" && method == "POST") {
      if (auto conflict = check_version(e, body)) return *conflict;
      if (s.pending() != component) {
        s.select_component(component);
        ++e.version;
      }
      const auto& outcome = body.contains("preferences") ? s.evaluate_pending(body["preferences"])
                                                         : s.evaluate_pending();
      Json result = to_json(outcome);
      persist(e);
      return {200, {{"version", e.version}, {"result", std::move(result)}}};
    }
    if (action == "commit" && method == "POST") {
      if (auto conflict = check_version(e, body)) return *conflict;
      if (s.pending() != component)
        throw NotEvaluated("component '" + component + "' is not the pending component",
                           component);
      const auto& committed = s.commit(require_string(body, "image", "commit"),
                                       require_string(body, "service", "commit"));
      ++e.version;
      persist(e);
      return {200,
              {{"version", e.version},
               {"committed",
                {{"component", committed.componentId},
                 {"image", committed.imageId},
                 {"service", committed.serviceId},
                 {"score", round_sig9(committed.score)}}},
               {"history", history_json(s)}}};
    }
    return error_response(404, "NotFound", "no route for component action '" + action + "'",
                          action);
  }

  std::shared_ptr<const Catalog> catalog_;
  Config config_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace fgen::api

#endif  // FGEN_API_HPP_INCLUDED
