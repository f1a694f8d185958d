#ifndef FGEN_SESSION_HPP_INCLUDED
#define FGEN_SESSION_HPP_INCLUDED

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fgen/catalog.hpp"
#include "fgen/engine.hpp"
#include "fgen/error.hpp"
#include "fgen/formation.hpp"
#include "fgen/json_util.hpp"

namespace fgen {

inline std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

namespace event {
inline constexpr std::string_view DefineFormation = "defineFormation";
inline constexpr std::string_view SelectComponent = "selectComponent";
inline constexpr std::string_view SetPreferences = "setPreferences";
inline constexpr std::string_view Evaluate = "evaluate";
inline constexpr std::string_view Commit = "commit";
}  // namespace event

struct SessionEvent {
  std::string type;
  Json payload;
  std::string at;
};

inline Json to_json(const SessionEvent& e) {
  Json j;
  j["type"] = e.type;
  j["payload"] = e.payload;
  j["at"] = e.at;
  return j;
}

inline SessionEvent session_event_from_json(const Json& j) {
  return {require_string(j, "type", "event"), require(j, "payload", "event"),
          j.contains("at") ? require_string(j, "at", "event") : std::string{}};
}

struct HistoryEntry {
  std::string componentId;
  CommittedSolution solution;
  std::string at;
};

/// One engineer's migration: the formation, what has been committed, the
/// component under consideration and its latest results. Every mutation is
/// appended to an event log that `replay_session` can re-execute.
class MigrationSession {
 public:
  using Clock = std::function<std::string()>;

  MigrationSession(std::string sessionId, std::shared_ptr<const Catalog> catalog,
                   Formation formation, Clock clock = utc_now_iso8601)
      : id_(std::move(sessionId)), catalog_(std::move(catalog)), clock_(std::move(clock)) {
    install_formation(std::move(formation));
  }

  const std::string& id() const { return id_; }
  const Catalog& catalog() const { return *catalog_; }
  std::shared_ptr<const Catalog> catalog_ptr() const { return catalog_; }
  const Formation& formation() const { return formation_; }
  const std::optional<std::string>& pending() const { return pending_; }
  const std::vector<std::string>& candidate_images() const { return candidates_; }
  const std::optional<EvaluationOutcome>& last_results() const { return last_; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  const std::vector<SessionEvent>& events() const { return events_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Stored preferences document for a component, if any.
  const Json* preferences(std::string_view componentId) const {
    auto it = preferences_.find(std::string(componentId));
    return it == preferences_.end() ? nullptr : &it->second;
  }

  /// Replaces the formation; only allowed before the first commit.
  void redefine_formation(Formation formation) {
    if (!history_.empty())
      throw ValidationError("formation cannot change after components were committed",
                            "formation");
    pending_.reset();
    last_.reset();
    candidates_.clear();
    preferences_.clear();
    install_formation(std::move(formation));
  }

  void select_component(std::string_view componentId) {
    const Component* c = formation_.find(componentId);
    if (!c)
      throw UnknownComponent("unknown component '" + std::string(componentId) + "'",
                             std::string(componentId));
    if (formation_.is_committed(componentId))
      throw AlreadyCommitted("component '" + std::string(componentId) + "' is already committed",
                             std::string(componentId));
    if (pending_ != c->id) last_.reset();
    pending_ = c->id;
    candidates_ = fgen::candidate_images(*catalog_, c->feature);
    warnings_.clear();
    if (candidates_.empty())
      warnings_.push_back("no image provides feature '" + c->feature + "'");
    record(event::SelectComponent, {{"component", c->id}});
  }

  void set_preferences(std::string_view componentId, const Json& preferences) {
    if (!formation_.find(componentId))
      throw UnknownComponent("unknown component '" + std::string(componentId) + "'",
                             std::string(componentId));
    (void)profile_from_json(preferences);
    preferences_[std::string(componentId)] = preferences;
    record(event::SetPreferences, {{"component", componentId}, {"preferences", preferences}});
  }

  /// Runs the decision pipeline for the pending component. Only the latest
  /// results and the event log change.
  const EvaluationOutcome& evaluate_pending(const Json& preferences) {
    if (!pending_) throw NotEvaluated("no component selected", "pendingComponent");
    const auto profile = profile_from_json(preferences);
    auto outcome = evaluate_component(*catalog_, formation_, *pending_, profile);
    Json result = to_json(outcome);
    last_ = std::move(outcome);
    record(event::Evaluate,
           {{"component", *pending_}, {"preferences", preferences}, {"result", std::move(result)}});
    return *last_;
  }

  /// Evaluates with the stored preferences of the pending component.
  const EvaluationOutcome& evaluate_pending() {
    if (!pending_) throw NotEvaluated("no component selected", "pendingComponent");
    const Json* p = preferences(*pending_);
    return evaluate_pending(p ? *p : Json::object());
  }

  /// Commits a feasible pair from the latest results. Any feasible pair is
  /// accepted, not only the top-ranked one.
  const CommittedSolution& commit(std::string_view imageId, std::string_view serviceId) {
    if (!pending_ || !last_ || last_->componentId != *pending_)
      throw NotEvaluated("pending component has no evaluation results", "lastResults");
    const auto* pair = last_->combinations.find(imageId, serviceId);
    if (!pair || !pair->feasible)
      throw InfeasibleSelection("(" + std::string(imageId) + ", " + std::string(serviceId) +
                                    ") is not a feasible combination",
                                std::string(imageId) + "," + std::string(serviceId));
    CommittedSolution solution{*pending_, pair->imageId, pair->serviceId, pair->combinedScore};
    formation_.commit(solution);
    const std::string at = clock_();
    history_.push_back({*pending_, solution, at});
    events_.push_back({std::string(event::Commit),
                       {{"component", solution.componentId},
                        {"image", solution.imageId},
                        {"service", solution.serviceId},
                        {"score", round_sig9(solution.score)}},
                       at});
    pending_.reset();
    last_.reset();
    candidates_.clear();
    return formation_.committed().at(solution.componentId);
  }

  /// Swaps the timestamp source (used while replaying recorded logs).
  void set_clock(Clock clock) { clock_ = std::move(clock); }

 private:
  void install_formation(Formation formation) {
    formation_ = std::move(formation);
    if (!formation_.committed().empty())
      throw ValidationError("a new session's formation must have nothing committed", "formation");
    record(event::DefineFormation, {{"formation", to_json(formation_)}});
  }

  void record(std::string_view type, Json payload) {
    events_.push_back({std::string(type), std::move(payload), clock_()});
  }

  std::string id_;
  std::shared_ptr<const Catalog> catalog_;
  Clock clock_;
  Formation formation_;
  std::optional<std::string> pending_;
  std::vector<std::string> candidates_;
  std::optional<EvaluationOutcome> last_;
  std::vector<HistoryEntry> history_;
  std::map<std::string, Json> preferences_;
  std::vector<SessionEvent> events_;
  std::vector<std::string> warnings_;
};

/// Re-executes a recorded event log against `catalog`. Every recorded
/// evaluation result and commit must be reproduced exactly; any divergence
/// raises ReplayMismatch.
inline MigrationSession replay_session(std::string sessionId,
                                       std::shared_ptr<const Catalog> catalog,
                                       const std::vector<SessionEvent>& events) {
  if (events.empty() || events.front().type != event::DefineFormation)
    throw ReplayMismatch("event log must start with defineFormation", "events[0]");
  std::size_t cursor = 0;
  auto clock = [&events, &cursor] { return events[cursor].at; };
  MigrationSession session(std::move(sessionId), std::move(catalog),
                           formation_from_json(require(events[0].payload, "formation", "events[0]")),
                           clock);
  for (cursor = 1; cursor < events.size(); ++cursor) {
    const auto& e = events[cursor];
    const std::string where = "events[" + std::to_string(cursor) + "]";
    if (e.type == event::DefineFormation) {
      session.redefine_formation(
          formation_from_json(require(e.payload, "formation", where)));
    } else if (e.type == event::SelectComponent) {
      session.select_component(require_string(e.payload, "component", where));
    } else if (e.type == event::SetPreferences) {
      session.set_preferences(require_string(e.payload, "component", where),
                              require(e.payload, "preferences", where));
    } else if (e.type == event::Evaluate) {
      const auto component = require_string(e.payload, "component", where);
      if (session.pending() != component) session.select_component(component);
      const auto& outcome = session.evaluate_pending(require(e.payload, "preferences", where));
      if (to_json(outcome).dump() != require(e.payload, "result", where).dump())
        throw ReplayMismatch("evaluation result differs from the recorded one", where);
    } else if (e.type == event::Commit) {
      const auto& s = session.commit(require_string(e.payload, "image", where),
                                     require_string(e.payload, "service", where));
      if (e.payload.contains("score") &&
          round_sig9(s.score) != require_number(e.payload, "score", where))
        throw ReplayMismatch("committed score differs from the recorded one", where);
    } else {
      throw ReplayMismatch("unknown event type '" + e.type + "'", where);
    }
  }
  session.set_clock(utc_now_iso8601);
  return session;
}

// ---------------------------------------------------------------------------
// Event-log files: JSON Lines, one event per line, append-only.

inline std::string to_jsonl(const std::vector<SessionEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<SessionEvent> events_from_jsonl(std::string_view text) {
  std::vector<SessionEvent> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(session_event_from_json(parse_json_text(line, "event line " + std::to_string(n))));
  }
  return out;
}

inline std::vector<SessionEvent> load_event_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return events_from_jsonl(ss.str());
}

/// Appends events [from, end) to `path`.
inline void append_event_log(const std::string& path, const std::vector<SessionEvent>& events,
                             std::size_t from) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw ParseError("cannot write '" + path + "'", path);
  for (std::size_t k = from; k < events.size(); ++k) out << to_json(events[k]).dump() << '\n';
}

inline Json history_json(const MigrationSession& s) {
  Json arr = Json::array();
  for (const auto& h : s.history())
    arr.push_back({{"component", h.componentId},
                   {"image", h.solution.imageId},
                   {"service", h.solution.serviceId},
                   {"score", round_sig9(h.solution.score)},
                   {"at", h.at}});
  return arr;
}

}  // namespace fgen

#endif  // FGEN_SESSION_HPP_INCLUDED
