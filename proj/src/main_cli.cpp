#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gravcs/suite.hpp"

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Invocation {
  gravcs::RunOptions opt;
  std::string out = "report.json";
  nlohmann::json experiments = nlohmann::json::array();
  bool seed_given = false;
};

// whether a (not yet validated) experiment draws randomized fields: bump or
// conformal metrics, flow diffeomorphisms anywhere in a composition, and the
// kinds that always draw a random background or direction
bool spec_randomized(const nlohmann::json& e) {
  if (!e.is_object()) return false;
  std::string kind = e.value("kind", std::string());
  if (kind == "cs-action" || kind == "cotton") return true;
  if (e.contains("metric") && e["metric"].is_object()) {
    std::string mk = e["metric"].value("kind", std::string());
    if (mk == "bump" || mk == "conformal") return true;
  }
  std::function<bool(const nlohmann::json&)> flowy =
      [&](const nlohmann::json& d) -> bool {
    if (!d.is_object()) return false;
    if (d.value("kind", std::string()) == "flow") return true;
    if (d.contains("of") && d["of"].is_array())
      for (const auto& s : d["of"])
        if (flowy(s)) return true;
    return false;
  };
  return e.contains("diffeo") && flowy(e["diffeo"]);
}

void line_col(const std::string& text, std::size_t byte, int& line, int& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

void load_config(const std::string& path, Invocation& inv) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config error: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1, col = 1;
    line_col(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
    throw ConfigError("config error: " + path + ":" + std::to_string(line) +
                      ":" + std::to_string(col) + ": " + e.what());
  }
  auto fail = [&](const std::string& field, const std::string& why) {
    throw ConfigError("config error: " + path + ": field '" + field + "': " +
                      why);
  };
  if (!j.is_object()) fail("(top level)", "must be a JSON object");
  static const std::set<std::string> known{"seed",    "tolerance_scale",
                                           "jobs",    "timings",
                                           "out",     "ledger",
                                           "experiments"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) fail(k, "unknown field");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "must be a non-negative integer");
    inv.opt.seed = j["seed"].get<std::uint64_t>();
    inv.seed_given = true;
  }
  if (j.contains("tolerance_scale")) {
    if (!j["tolerance_scale"].is_number())
      fail("tolerance_scale", "must be a number");
    inv.opt.tolerance_scale = j["tolerance_scale"].get<double>();
    if (inv.opt.tolerance_scale <= 0.0)
      fail("tolerance_scale", "must be positive");
  }
  if (j.contains("jobs")) {
    if (!j["jobs"].is_number_integer()) fail("jobs", "must be an integer");
    inv.opt.jobs = j["jobs"].get<int>();
    if (inv.opt.jobs < 0) fail("jobs", "must be >= 0");
  }
  if (j.contains("timings")) {
    if (!j["timings"].is_boolean()) fail("timings", "must be true or false");
    inv.opt.timings = j["timings"].get<bool>();
  }
  if (j.contains("out")) {
    if (!j["out"].is_string() || j["out"].get<std::string>().empty())
      fail("out", "must be a nonempty string");
    inv.out = j["out"].get<std::string>();
  }
  if (j.contains("ledger")) {
    const nlohmann::json& l = j["ledger"];
    if (!l.is_object()) fail("ledger", "must be an object");
    static const std::set<std::string> lknown{"file", "family"};
    for (const auto& [k, v] : l.items())
      if (!lknown.count(k)) fail("ledger." + k, "unknown field");
    if (l.contains("file")) {
      if (!l["file"].is_string()) fail("ledger.file", "must be a string");
      inv.opt.ledger_file = l["file"].get<std::string>();
    }
    if (l.contains("family")) {
      if (!l["family"].is_string() || l["family"].get<std::string>().empty())
        fail("ledger.family", "must be a nonempty string");
      inv.opt.ledger_family = l["family"].get<std::string>();
    }
  }
  if (j.contains("experiments")) {
    if (!j["experiments"].is_array()) fail("experiments", "must be an array");
    inv.experiments = j["experiments"];
  }
}

// the environment may override the output directory (and nothing else)
std::string resolve_out(const std::string& out) {
  const char* dir = std::getenv("GRAVCS_OUT_DIR");
  if (!dir || !*dir) return out;
  return (std::filesystem::path(dir) / std::filesystem::path(out).filename())
      .string();
}

std::string brief(const gravcs::CheckResult& r) {
  char buf[160];
  if (!r.error.empty()) return "error: " + r.error;
  if (r.exact)
    return r.pass ? "exact match" : "exact mismatch";
  std::snprintf(buf, sizeof buf, "residual %.3e vs tolerance %.3e", r.residual,
                r.tolerance);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gravcs: gravitational Chern-Simons action checks and the anomaly "
      "cancellation ledger"};
  app.require_subcommand(1);

  Invocation cli;  // values supplied on the command line
  std::string config_path, check_id;
  auto* opt_config =
      app.add_option("--config", config_path, "JSON config file");
  auto* opt_out = app.add_option(
      "--out", cli.out, "report output path (default report.json)");
  auto* opt_seed = app.add_option(
      "--seed", cli.opt.seed, "offset added to every frozen draw seed");
  auto* opt_scale =
      app.add_option("--tolerance-scale", cli.opt.tolerance_scale,
                     "multiply every check tolerance by this factor");
  auto* opt_jobs = app.add_option(
      "--jobs", cli.opt.jobs, "OpenMP thread count (0 = library default)");
  auto* opt_timings = app.add_flag(
      "--timings", cli.opt.timings,
      "include wall times in the report (breaks byte-for-byte reproducibility)");
  app.set_version_flag("--version", gravcs::kVersion);

  for (const std::string& cat : gravcs::check_categories())
    app.add_subcommand(cat, "run the " + cat + " checks")->fallthrough();
  app.add_subcommand("verify-all", "run the complete acceptance suite")
      ->fallthrough();
  CLI::App* explain =
      app.add_subcommand("explain", "describe the identity behind one check");
  explain->add_option("id", check_id, "check id, e.g. ledger/weak-k3")
      ->required();
  explain->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  if (sub == "explain") {
    try {
      std::cout << gravcs::explain_check(check_id);
      return 0;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what();
      return 2;
    }
  }

  Invocation inv;
  try {
    if (*opt_config) load_config(config_path, inv);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  // command-line flags override the config file
  if (*opt_out) inv.out = cli.out;
  if (*opt_seed) inv.opt.seed = cli.opt.seed;
  if (*opt_scale) inv.opt.tolerance_scale = cli.opt.tolerance_scale;
  if (*opt_jobs) inv.opt.jobs = cli.opt.jobs;
  if (*opt_timings) inv.opt.timings = cli.opt.timings;
  if (*opt_seed) inv.seed_given = true;

  if (!inv.experiments.empty() && !inv.seed_given) {
    for (const auto& e : inv.experiments)
      if (spec_randomized(e)) {
        std::cerr << "config error: " << config_path
                  << ": field 'seed': required when an experiment draws "
                     "randomized fields\n";
        return 2;
      }
  }

  std::vector<gravcs::CheckResult> results;
  try {
    results = gravcs::run_checks(sub, inv.opt);
    if (!inv.experiments.empty()) {
      std::vector<gravcs::CheckResult> extra =
          gravcs::run_experiments(inv.experiments, inv.opt, sub);
      results.insert(results.end(), std::make_move_iterator(extra.begin()),
                     std::make_move_iterator(extra.end()));
      std::sort(results.begin(), results.end(),
                [](const gravcs::CheckResult& a, const gravcs::CheckResult& b) {
                  return a.id < b.id;
                });
    }
  } catch (const std::exception& e) {
    // selector/option/ledger/experiment-spec problems, not check failures
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string out_path = resolve_out(inv.out);
  {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write report to '" << out_path << "'\n";
      return 2;
    }
    out << gravcs::make_report(results, sub, inv.opt).dump(2) << "\n";
  }

  int passed = 0;
  for (const gravcs::CheckResult& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << "  (" << brief(r)
              << ")\n";
    if (r.pass) ++passed;
  }
  std::cout << "passed " << passed << "/" << results.size() << "; report "
            << out_path << "\n";
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
