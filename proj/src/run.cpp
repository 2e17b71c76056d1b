#include "dsn/run.hpp"

#include "dsn/analysis.hpp"
#include "dsn/bumps.hpp"
#include "dsn/fields.hpp"
#include "dsn/game.hpp"
#include "dsn/norms.hpp"
#include "dsn/operator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>

namespace dsn {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output_dir) / name).string();
}

Table grid_table(const std::vector<std::string>& columns, const Grid& g,
                 const std::vector<const GridFunction*>& fields) {
  std::vector<std::string> head{"i", "j", "x", "y"};
  head.insert(head.end(), columns.begin(), columns.end());
  Table t(head);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      std::vector<double> row{double(i), double(j), g.x(i), g.y(j)};
      for (const GridFunction* f : fields) row.push_back(f->values()[g.index(i, j)]);
      t.add_row(row);
    }
  }
  return t;
}

// solve

void run_solve(const RunConfig& cfg, RunReport& report) {
  const Grid grid(cfg.nx, cfg.ny, cfg.alpha);
  const GridFunction f = sample(grid, cfg.forcing);
  const SparseOperator op = assemble(grid, cfg.scheme);
  auto [u, solve] = solve_dirichlet(op, f, cfg.tol);

  SolveSummary s;
  s.norms = norms_of(u, true);
  s.solve = solve;
  const WeightedNorm fn = l2_weighted_norm(f, cfg.convention);
  s.forcing_norm = fn.value;
  s.norm_convention = to_string(fn.convention);
  s.divergence_warning = fn.divergence_warning;
  report.solve = s;
  report.verdicts["solve"] = to_string(Verdict::Pass);

  grid_table({"f", "u"}, grid, {&f, &u}).write(path_in(cfg, "solution.csv"));
}

// verify

void run_verify(const RunConfig& cfg, RunReport& report) {
  const std::vector<BumpSum> tests = random_bump_family(cfg.verify_test_functions, *cfg.seed);
  const ManufacturedPair mp = manufactured_pair(cfg.verify_manufactured, cfg.alpha);

  VerifySummary v;
  v.theta = cfg.theta;
  v.test_functions = cfg.verify_test_functions;
  Table rows({"level", "test_function", "weak_residual", "theta_residual"});
  for (int div : {4, 2, 1}) {
    const int nx = cfg.nx / div;
    const int ny = cfg.ny / div;
    if (nx < 2 || ny < 2) continue;
    const Grid grid(nx, ny, cfg.alpha);
    const GridFunction f = GridFunction::sample(grid, mp.forcing);
    const GridFunction u = solve_dirichlet(assemble(grid, cfg.scheme), f, cfg.tol).first;
    double weak = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < tests.size(); ++k) {
      const GridFunction phi = sample(grid, tests[k]);
      const double rw = std::abs(weak_form_residual(u, f, phi));
      const double rt = std::abs(theta_weak_form_residual(u, f, phi, cfg.theta));
      weak = std::max(weak, rw);
      theta = std::max(theta, rt);
      rows.add_row({double(nx), double(k), rw, rt});
    }
    v.levels.push_back(nx);
    v.max_weak_residual.push_back(weak);
    v.max_theta_residual.push_back(theta);
  }
  report.verify = v;
  rows.write(path_in(cfg, "residuals.csv"));

  Verdict verdict = Verdict::Inconclusive;
  if (v.levels.size() >= 2) {
    const bool down = v.max_weak_residual.back() < v.max_weak_residual.front() &&
                      v.max_theta_residual.back() < v.max_theta_residual.front();
    verdict = down ? Verdict::Pass : Verdict::Fail;
  }
  report.verdicts["verify"] = to_string(verdict);
}

// study

StudyResult dispatch_study(const RunConfig& cfg) {
  const StudyConfig& s = cfg.study;
  switch (s.kind) {
    case StudyKind::Convergence:
      return convergence_study(cfg.scheme, s.levels, s.manufactured, cfg.alpha, s.thresholds);
    case StudyKind::Energy:
      return energy_estimate_study(default_energy_family(), s.levels, cfg.alpha, cfg.scheme,
                                   s.thresholds);
    case StudyKind::Coercivity:
      return coercivity_check(cfg.theta, s.samples, *cfg.seed,
                              CoercivityOptions{s.levels.front(), cfg.alpha}, s.thresholds);
    case StudyKind::Inclusion:
      return strict_inclusion_demo(s.levels, cfg.alpha, s.thresholds);
    case StudyKind::Embedding:
      return embedding_study(s.levels, s.qs, s.samples, *cfg.seed, cfg.alpha, s.thresholds);
    case StudyKind::Muckenhoupt: {
      BallSampling sampling;
      sampling.min_radius = s.min_radius;
      return muckenhoupt_study(s.exponents, s.p, s.samples, *cfg.seed, sampling);
    }
  }
  throw std::logic_error("unknown study kind");
}

void write_study_tables(const RunConfig& cfg, const StudyResult& r) {
  if (!r.levels.empty()) {
    std::vector<std::string> head{"level"};
    for (const auto& [name, _] : r.metrics) head.push_back(name);
    head.push_back("observed_order");
    Table t(head);
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
      std::vector<double> row{double(r.levels[l])};
      for (const auto& [_, series] : r.metrics) row.push_back(l < series.size() ? series[l] : kNaN);
      row.push_back(l > 0 && l - 1 < r.observed_orders.size() ? r.observed_orders[l - 1] : kNaN);
      t.add_row(row);
    }
    t.write(path_in(cfg, "levels.csv"));
  }
  if (!r.samples.empty()) {
    std::size_t n = 0;
    std::vector<std::string> head{"sample"};
    for (const auto& [name, series] : r.samples) {
      head.push_back(name);
      n = std::max(n, series.size());
    }
    Table t(head);
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> row{double(k)};
      for (const auto& [_, series] : r.samples) row.push_back(k < series.size() ? series[k] : kNaN);
      t.add_row(row);
    }
    t.write(path_in(cfg, "samples.csv"));
  }
}

void run_study(const RunConfig& cfg, RunReport& report) {
  const StudyResult r = dispatch_study(cfg);
  report.study = r;
  report.verdicts[r.study] = to_string(r.verdict);
  write_study_tables(cfg, r);
}

// game

void run_game(const RunConfig& cfg, RunReport& report) {
  const Game game(cfg.game);
  const NashResult r = game.nash_solve();

  NashSummary s;
  s.j1 = r.j1;
  s.j2 = r.j2;
  s.norm_f1 = control_norm(r.f1_star);
  s.norm_f2 = control_norm(r.f2_star);
  s.br_iterations = r.br_iterations;
  s.br_residuals = r.br_residuals;
  s.j1_history = r.j1_history;
  s.j2_history = r.j2_history;
  s.converged = r.converged;
  s.certified = r.certified;
  s.certification_margin = r.certification_margin;
  s.margin1 = r.certification.margin1;
  s.margin2 = r.certification.margin2;
  s.cert_tol1 = r.certification.tol1;
  s.cert_tol2 = r.certification.tol2;
  s.deviations = r.certification.deviations;
  s.fixed_point_residual1 = r.fixed_point_residual1;
  s.fixed_point_residual2 = r.fixed_point_residual2;
  s.iteration_order = r.iteration_order;
  s.gradient_convention = r.gradient_convention;
  report.game = s;

  const bool feasible = s.norm_f1 <= game.radius(1) + 1e-12 && s.norm_f2 <= game.radius(2) + 1e-12;
  auto verdict = [](bool ok) { return to_string(ok ? Verdict::Pass : Verdict::Fail); };
  report.verdicts["nash_converged"] = verdict(r.converged);
  report.verdicts["certified"] = verdict(r.certified);
  report.verdicts["feasible"] = verdict(feasible);

  Table it({"sweep", "br_residual", "j1", "j2"});
  for (std::size_t k = 0; k < r.br_residuals.size(); ++k) {
    it.add_row({double(k + 1), r.br_residuals[k], r.j1_history[k], r.j2_history[k]});
  }
  it.write(path_in(cfg, "iterations.csv"));
  grid_table({"f1", "f2", "state"}, game.grid(), {&r.f1_star, &r.f2_star, &r.state})
      .write(path_in(cfg, "controls.csv"));
  Table cert({"follower", "margin", "tolerance", "deviations"});
  cert.add_row({1.0, s.margin1, s.cert_tol1, double(s.deviations)});
  cert.add_row({2.0, s.margin2, s.cert_tol2, double(s.deviations)});
  cert.write(path_in(cfg, "certification.csv"));
}

}  // namespace

RunReport run(const RunConfig& cfg) {
  if (needs_seed(cfg) && !cfg.seed) {
    throw ConfigError(0, "seed", "a seed is required for this command");
  }
  fs::create_directories(cfg.output_dir);

  RunReport report;
  report.version = kVersion;
  report.timestamp = utc_timestamp();
  report.command = to_string(cfg.command);
  report.config = to_json(cfg);
  try {
    switch (cfg.command) {
      case Command::Solve: run_solve(cfg, report); break;
      case Command::Verify: run_verify(cfg, report); break;
      case Command::Study: run_study(cfg, report); break;
      case Command::Game: run_game(cfg, report); break;
    }
  } catch (const std::exception& e) {
    report.errors.push_back(report.command + ": " + e.what());
  }

  const std::string path = path_in(cfg, "report.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << serialize(report) << '\n';
  return report;
}

int exit_status(const RunReport& report) {
  if (!report.errors.empty()) return 1;
  for (const auto& [_, v] : report.verdicts) {
    if (v == to_string(Verdict::Fail)) return 2;
  }
  return 0;
}

}  // namespace dsn
