#ifndef FGEN_CLI_HPP_INCLUDED
#define FGEN_CLI_HPP_INCLUDED

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fgen/bench.hpp"
#include "fgen/catalog.hpp"
#include "fgen/engine.hpp"
#include "fgen/error.hpp"
#include "fgen/formation.hpp"
#include "fgen/json_util.hpp"
#include "fgen/session.hpp"

namespace fgen::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInvalid = 2, kNoFeasible = 3 };

enum class Verbosity { Quiet, Warn, Info, Debug };

/// Reads FORMATION_GENIUS_LOG (quiet, warn, info, debug). Default warn.
inline Verbosity verbosity_from_env() {
  const char* v = std::getenv("FORMATION_GENIUS_LOG");
  if (!v) return Verbosity::Warn;
  const std::string s = to_lower(v);
  if (s == "quiet" || s == "off" || s == "0") return Verbosity::Quiet;
  if (s == "info") return Verbosity::Info;
  if (s == "debug") return Verbosity::Debug;
  return Verbosity::Warn;
}

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::TypeMismatch:
    case ErrorCode::InvalidMatrix:
    case ErrorCode::InvalidHierarchy:
    case ErrorCode::MissingMatrix:
    case ErrorCode::NegativeValue:
    case ErrorCode::UnknownComponent: return kInvalid;
    case ErrorCode::NoFeasibleCombination: return kNoFeasible;
    default: return kFailure;
  }
}

/// Policy flags shared by evaluate and migrate; applied on top of the
/// preferences document.
struct PolicyFlags {
  std::string mode;
  std::string op;
  bool noNetworkDelta = false;

  Json apply(Json prefs) const {
    if (!prefs.is_object()) throw ParseError("preferences must be an object", "preferences");
    if (!mode.empty()) prefs["mode"] = mode;
    if (!op.empty() || noNetworkDelta) {
      if (!prefs.contains("combination")) prefs["combination"] = Json::object();
      if (!op.empty()) prefs["combination"]["operator"] = op;
      if (noNetworkDelta) prefs["combination"]["networkDelta"] = false;
    }
    return prefs;
  }

  void add_to(CLI::App& cmd) {
    cmd.add_option("--mode", mode, "Evaluation mode")->check(CLI::IsMember({"stepwise", "integrated"}));
    cmd.add_option("--operator", op, "Combination operator")->check(CLI::IsMember({"sum", "product"}));
    cmd.add_flag("--no-network-delta", noNetworkDelta, "Do not divide by the network delta");
  }
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err), verbosity_(verbosity_from_env()) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Formation migration decision engine", "formation-genius"};
    app.require_subcommand(1);

    PolicyFlags evalFlags;
    std::string catalogPath, formationPath, component, prefsPath, outPath;
    std::optional<std::size_t> top;
    auto* evaluate = app.add_subcommand("evaluate", "Rank image/service pairs for one component");
    evaluate->add_option("--catalog", catalogPath)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--formation", formationPath)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--component", component)->required();
    evaluate->add_option("--prefs", prefsPath)->check(CLI::ExistingFile);
    evaluate->add_option("--out", outPath, "Write the result here instead of stdout");
    evaluate->add_option("--top", top, "Only list the N best combinations")->check(CLI::PositiveNumber);
    evalFlags.add_to(*evaluate);

    PolicyFlags migrateFlags;
    std::string scriptPath, logPath, autoCommit = "top", mCatalog, mFormation, mOut;
    auto* migrate = app.add_subcommand("migrate", "Migrate every component, committing top pairs");
    migrate->add_option("--catalog", mCatalog)->required()->check(CLI::ExistingFile);
    migrate->add_option("--formation", mFormation)->required()->check(CLI::ExistingFile);
    migrate->add_option("--script", scriptPath, "Preferences per component")->check(CLI::ExistingFile);
    migrate->add_option("--auto-commit", autoCommit)->check(CLI::IsMember({"top"}));
    migrate->add_option("--log", logPath, "Write the session event log (JSON Lines)");
    migrate->add_option("--out", mOut, "Write the migration summary here instead of stdout");
    migrateFlags.add_to(*migrate);

    bench::BenchConfig bc;
    std::string csvPath, summaryPath;
    bool partialD = false;
    auto* benchCmd = app.add_subcommand("bench", "Time synthetic migrations");
    benchCmd->add_option("--images", bc.imageCounts)->delimiter(',');
    benchCmd->add_option("--services", bc.serviceCounts)->delimiter(',');
    benchCmd->add_option("--components", bc.componentCounts)->delimiter(',');
    benchCmd->add_option("--providers", bc.providerCount);
    benchCmd->add_option("--seed", bc.seed);
    benchCmd->add_option("--reps", bc.repetitions);
    benchCmd->add_option("--csv", csvPath, "Raw timings");
    benchCmd->add_option("--summary", summaryPath, "Medians and fits as JSON");
    benchCmd->add_flag("--partial-d", partialD, "Sample the deployability set instead of using all pairs");
    benchCmd->add_flag("--cartesian", bc.cartesian, "Cross image and service counts");

    std::string vCatalog, vFormation;
    auto* validate = app.add_subcommand("validate", "Check catalog and formation files");
    validate->add_option("--catalog", vCatalog)->check(CLI::ExistingFile);
    validate->add_option("--formation", vFormation)->check(CLI::ExistingFile);

    std::string rCatalog, rLog;
    auto* replay = app.add_subcommand("replay", "Re-execute a session event log and compare results");
    replay->add_option("--catalog", rCatalog)->required()->check(CLI::ExistingFile);
    replay->add_option("--log", rLog)->required()->check(CLI::ExistingFile);

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e, out_, err_);
      return rc == 0 ? kOk : kInvalid;
    }

    try {
      if (*evaluate) return run_evaluate(catalogPath, formationPath, component, prefsPath, outPath, top, evalFlags);
      if (*migrate) return run_migrate(mCatalog, mFormation, scriptPath, logPath, mOut, migrateFlags);
      if (*benchCmd) {
        bc.fullD = !partialD;
        return run_bench(bc, csvPath, summaryPath);
      }
      if (*validate) return run_validate(vCatalog, vFormation);
      if (*replay) return run_replay(rCatalog, rLog);
    } catch (const Error& e) {
      err_ << "error: " << to_string(e.code()) << ": " << e.what();
      if (!e.detail().empty()) err_ << " [" << e.detail() << "]";
      err_ << '\n';
      return exit_code_for(e.code());
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kFailure;
    }
    return kFailure;
  }

 private:
  void warn(const std::vector<std::string>& warnings) {
    if (verbosity_ < Verbosity::Warn) return;
    for (const auto& w : warnings) err_ << "warning: " << w << '\n';
  }
  void info(const std::string& msg) {
    if (verbosity_ >= Verbosity::Info) err_ << msg << '\n';
  }

  void emit(const Json& doc, const std::string& path) {
    const std::string text = doc.dump(2) + "\n";
    if (path.empty()) out_ << text;
    else write_text_file(path, text);
  }

  int run_evaluate(const std::string& catalogPath, const std::string& formationPath,
                   const std::string& component, const std::string& prefsPath,
                   const std::string& outPath, std::optional<std::size_t> top,
                   const PolicyFlags& flags) {
    const Catalog catalog = load_catalog(catalogPath);
    warn(catalog.warnings());
    const Formation formation = load_formation(formationPath);
    warn(formation.warnings());
    const Json prefs = flags.apply(prefsPath.empty() ? Json::object() : read_json_file(prefsPath));
    const auto outcome = evaluate_component(catalog, formation, component, profile_from_json(prefs));
    warn(outcome.warnings);
    info("evaluated " + std::to_string(outcome.combinations.ranked.size()) + " pairs, " +
         std::to_string(outcome.combinations.feasible_count()) + " feasible");
    emit(to_json(outcome, top), outPath);
    return kOk;
  }

  /// Script: {"default": prefs, "steps": [{"component": id, "preferences": prefs}]}
  /// or a bare preferences object used for every component. Components not
  /// listed in steps follow in formation order.
  int run_migrate(const std::string& catalogPath, const std::string& formationPath,
                  const std::string& scriptPath, const std::string& logPath,
                  const std::string& outPath, const PolicyFlags& flags) {
    auto catalog = std::make_shared<const Catalog>(load_catalog(catalogPath));
    warn(catalog->warnings());
    Formation formation = load_formation(formationPath);
    warn(formation.warnings());
    const Json script = scriptPath.empty() ? Json::object() : read_json_file(scriptPath);
    if (!script.is_object()) throw ParseError("migration script must be an object", scriptPath);

    Json defaults = Json::object();
    std::vector<std::pair<std::string, Json>> steps;
    if (script.contains("steps")) {
      if (script.contains("default")) defaults = script["default"];
      for (const auto& s : require_array(script, "steps", "script"))
        steps.emplace_back(require_string(s, "component", "script.steps"),
                           s.contains("preferences") ? s["preferences"] : defaults);
    } else {
      defaults = script;
    }
    for (const auto& c : formation.components()) {
      bool listed = false;
      for (const auto& [id, p] : steps) listed = listed || id == c.id;
      if (!listed) steps.emplace_back(c.id, defaults);
    }

    MigrationSession session("cli-migration", catalog, std::move(formation));
    for (const auto& [id, prefs] : steps) {
      session.select_component(id);
      const auto& outcome = session.evaluate_pending(flags.apply(prefs));
      warn(outcome.warnings);
      const auto& top = best_combination(outcome.combinations);
      const auto& done = session.commit(top.imageId, top.serviceId);
      info("committed " + done.componentId + " -> (" + done.imageId + ", " + done.serviceId + ")");
    }
    if (!logPath.empty()) write_text_file(logPath, to_jsonl(session.events()));
    emit({{"committed", history_json(session)}}, outPath);
    return kOk;
  }

  int run_bench(const bench::BenchConfig& config, const std::string& csvPath,
                const std::string& summaryPath) {
    const auto records = bench::run_scaling(config);
    if (!csvPath.empty()) write_text_file(csvPath, bench::to_csv(records));
    const Json summary = bench::to_json(bench::analyze(records));
    if (!summaryPath.empty()) write_text_file(summaryPath, summary.dump(2) + "\n");
    if (csvPath.empty() && summaryPath.empty()) out_ << bench::to_csv(records);
    else out_ << summary.dump(2) << '\n';
    return kOk;
  }

  int run_validate(const std::string& catalogPath, const std::string& formationPath) {
    if (catalogPath.empty() && formationPath.empty())
      throw ValidationError("nothing to validate; pass --catalog and/or --formation", "validate");
    if (!catalogPath.empty()) {
      const Catalog c = load_catalog(catalogPath);
      warn(c.warnings());
      out_ << catalogPath << ": ok (" << c.images().size() << " images, " << c.services().size()
           << " services)\n";
    }
    if (!formationPath.empty()) {
      const Formation f = load_formation(formationPath);
      warn(f.warnings());
      out_ << formationPath << ": ok (" << f.components().size() << " components)\n";
    }
    return kOk;
  }

  int run_replay(const std::string& catalogPath, const std::string& logPath) {
    auto catalog = std::make_shared<const Catalog>(load_catalog(catalogPath));
    const auto events = load_event_log(logPath);
    const auto session = replay_session("replay", catalog, events);
    out_ << logPath << ": " << events.size() << " events reproduced, "
         << session.history().size() << " commits\n";
    return kOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  Verbosity verbosity_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace fgen::cli

#endif  // FGEN_CLI_HPP_INCLUDED
