// Command-line runner: figure experiments, grid-oracle comparisons and the
// check suite.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sqt/checks.hpp"
#include "sqt/config.hpp"
#include "sqt/experiments.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::string eps;
  std::string tol;
  std::string samples;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  sub->add_option("--eps", o.eps, "comma-separated list of eps values");
  sub->add_option("--tol", o.tol, "tolerance override");
  sub->add_option("--samples", o.samples, "number of samples");
}

// Command-line values layered over the file config. A flag whose key the
// experiment does not use is an error.
sqt::Config cli_overrides(const std::string& name, const Options& o) {
  const sqt::Config defaults = name == "checks" ? sqt::Config{{"tol", "none"}} : sqt::experiment_defaults(name);
  sqt::Config out;
  auto put = [&](const std::string& flag, const std::string& key, const std::string& value) {
    if (value.empty()) return;
    if (!defaults.has(key)) throw sqt::config_error(flag + " does not apply to " + name);
    out.set(key, value);
  };
  put("--eps", "eps", o.eps);
  put("--samples", "samples", o.samples);
  put("--tol", defaults.has("expansion_tol") ? "expansion_tol" : "tol", o.tol);
  return out;
}

int run_checks(const sqt::Config& cfg, const std::filesystem::path& out_dir) {
  const auto overrides = sqt::ToleranceOverrides::from_config(cfg);
  std::vector<sqt::Criterion> results;
  for (const auto& run : sqt::acceptance_criteria()) {
    results.push_back(run());
    overrides.apply(results.back());
    std::cerr << "criterion " << results.back().id << (results.back().pass() ? " ok" : " FAILED") << std::endl;
  }
  results.push_back(sqt::invariant_checks());
  overrides.apply(results.back());
  std::ostringstream report;
  sqt::print_report(report, results);
  std::cout << report.str();
  std::filesystem::create_directories(out_dir);
  std::ofstream(out_dir / "checks_report.txt") << report.str();
  bool all = true;
  for (const auto& r : results) all = all && r.pass();
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scaled quantum transition experiments"};
  app.require_subcommand(1);
  Options opts;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : sqt::experiment_names()) subs.emplace_back(name, app.add_subcommand(name, "run " + name));
  subs.emplace_back("checks", app.add_subcommand("checks", "run every check; exit 0 iff all pass"));
  for (auto& [name, sub] : subs) add_common(sub, opts);
  CLI11_PARSE(app, argc, argv);

  std::string name;
  for (auto& [n, sub] : subs)
    if (sub->parsed()) name = n;

  try {
    const sqt::Config file = opts.config_path.empty() ? sqt::Config{} : sqt::load_config_file(opts.config_path);
    const sqt::Config over = cli_overrides(name, opts);
    if (name == "checks") {
      sqt::Config cfg{{"tol", "none"}};
      cfg.merge(file);
      cfg.merge(over);
      return run_checks(cfg, opts.out_dir);
    }
    const sqt::Config cfg = sqt::resolve_config(name, file, over);
    for (const auto& ts : sqt::run_experiment(name, cfg))
      std::cout << sqt::write_series(opts.out_dir, ts).string() << '\n';
    return 0;
  } catch (const sqt::config_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
