// Command-line driver: dsn_cli <solve|verify|study|game> --config FILE [options]

#include "dsn/config.hpp"
#include "dsn/run.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
  std::string kind;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory (overrides output_dir)");
  sub->add_option("--seed", o.seed, "seed override");
  sub->add_option("--level-override", o.level, "use an n x n grid; study levels above n are dropped");
}

void print_summary(const dsn::RunReport& r) {
  for (const auto& [name, verdict] : r.verdicts) std::cout << name << ": " << verdict << '\n';
  for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate advection-diffusion solver, verification studies and Nash games"};
  app.require_subcommand(1);
  Options o;

  CLI::App* solve = app.add_subcommand("solve", "solve the Dirichlet problem for the configured forcing");
  CLI::App* verify = app.add_subcommand("verify", "weak-form and theta-form residuals under refinement");
  CLI::App* study = app.add_subcommand("study", "run a verification study");
  CLI::App* game = app.add_subcommand("game", "compute and certify a Nash equilibrium of the followers");
  for (CLI::App* sub : {solve, verify, study, game}) add_common(sub, o);
  study->add_option("kind", o.kind, "convergence | energy | coercivity | inclusion | embedding | muckenhoupt");

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string verb = app.get_subcommands().front()->get_name();
    dsn::RunConfig cfg = dsn::load_config(o.config);
    if (dsn::to_string(cfg.command) != verb) {
      throw dsn::ConfigError(0, "command", "config is for '" + dsn::to_string(cfg.command) +
                                               "' but the verb is '" + verb + "'");
    }
    if (!o.kind.empty() && dsn::parse_study_kind(o.kind) != cfg.study.kind) {
      throw dsn::ConfigError(0, "study.kind", "config runs the '" +
                                                  dsn::to_string(cfg.study.kind) +
                                                  "' study, not '" + o.kind + "'");
    }
    if (!o.out.empty()) cfg.output_dir = o.out;
    dsn::apply_overrides(cfg, o.seed, o.level);

    const dsn::RunReport report = dsn::run(cfg);
    print_summary(report);
    std::cout << "report: " << cfg.output_dir << "/report.json\n";
    return dsn::exit_status(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
