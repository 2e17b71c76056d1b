// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "dsn/analysis.hpp"
#include "dsn/config.hpp"
#include "dsn/game.hpp"
#include "dsn/norms.hpp"
#include "dsn/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace dsn;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kUpwindOrder = 0.9;
constexpr double kCenteredOrder = 1.5;
constexpr double kConvergenceSeconds = 30.0;
constexpr double kEnergyGrowth = 1.2;
constexpr double kCoercivitySafety = 1.5;
constexpr double kInclusionPlateau = 0.05;
constexpr double kEmbeddingGrowth = 1.1;
constexpr double kUnitWeightTol = 1e-6;
constexpr double kGradientRelErr = 1e-5;
constexpr double kFdStep = 1e-6;
constexpr double kBrTol = 1e-8;
constexpr double kCertRelTol = 1e-8;
constexpr double kFeasibilitySlack = 1e-12;
constexpr double kNashSeconds = 120.0;
constexpr double kSuperpositionTol = 1e-10;
constexpr std::uint64_t kSeed = 20180208;

const fs::path kConfigs = fs::path(DSN_SOURCE_DIR) / "configs";

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream d;
  for (double alpha : {0.5, 1.0}) {
    for (YScheme s : {YScheme::Upwind, YScheme::Centered}) {
      const StudyResult r = convergence_study(s, {16, 32, 64, 128}, Manufactured::SinSin, alpha);
      const double need = s == YScheme::Upwind ? kUpwindOrder : kCenteredOrder;
      // Every consecutive pair must reach the threshold.
      const double worst = *std::min_element(r.observed_orders.begin(), r.observed_orders.end());
      ok &= worst >= need;
      d << "a=" << alpha << " " << to_string(s) << " min order " << fmt("%.4f", worst) << " (finest pair "
        << fmt("%.4f", r.observed_orders.back()) << "); ";
    }
  }
  const double t = seconds_since(t0);
  ok &= t < kConvergenceSeconds;
  d << fmt("%.2f s", t);
  return {ok, d.str()};
}

Outcome energy() {
  const StudyResult r = energy_estimate_study(default_energy_family(), {16, 32, 64, 128}, 0.5);
  bool ok = true;
  std::ostringstream d;
  for (const auto& [name, series] : r.metrics) {
    if (name.rfind("ratio:", 0) != 0) continue;
    const double g = series.back() / series.front();
    ok &= g <= kEnergyGrowth;
    d << name.substr(6) << " " << fmt("%.3f", g) << "x; ";
  }
  d << "(limit " << kEnergyGrowth << "x)";
  return {ok, d.str()};
}

Outcome coercivity() {
  StudyThresholds thr;
  thr.coercivity_safety = kCoercivitySafety;
  const StudyResult r = coercivity_check(1.0, 200, kSeed, CoercivityOptions{64, 0.5}, thr);
  const double violations = r.metrics.at("violations").front();
  const bool ok = violations == 0.0 && r.samples.at("margin").size() == 200;
  return {ok, "violations " + fmt("%.0f", violations) + ", min relative margin " +
                  fmt("%.3g", r.metrics.at("min_margin").front()) + ", delta_h " +
                  fmt("%.4g", r.metrics.at("delta_h").front())};
}

Outcome inclusion() {
  const std::vector<int> levels{16, 32, 64, 128, 256};
  const StudyResult r = strict_inclusion_demo(levels, 0.5);
  const auto& w = r.metrics.at("w11");
  const auto& dy = r.metrics.at("dy_l2");
  double lo = INFINITY, hi = 0.0;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    lo = std::min(lo, w[k]);
    hi = std::max(hi, w[k]);
  }
  bool grows = true;
  for (std::size_t k = 1; k < dy.size(); ++k) grows &= dy[k] > dy[k - 1];
  const double spread = (hi - lo) / lo;
  return {spread <= kInclusionPlateau && grows,
          "w11 spread from level 32 " + fmt("%.4f", spread) + ", dy_l2 " +
              fmt("%.3f", dy.front()) + " -> " + fmt("%.3f", dy.back()) +
              (grows ? " strictly increasing" : " NOT increasing")};
}

Outcome embedding() {
  const StudyResult r = embedding_study({64, 128}, {2.0, 3.0, 4.0}, 100, kSeed, 0.5);
  bool ok = true;
  std::ostringstream d;
  for (const auto& [name, s] : r.metrics) {
    const double g = s[1] / s[0];
    ok &= g <= kEmbeddingGrowth;
    d << name << " " << fmt("%.4f", g) << "x; ";
  }
  return {ok, d.str()};
}

Outcome muckenhoupt() {
  const ApEstimate one = muckenhoupt_ap(0.0, 2.0, 500, kSeed);
  const ApEstimate half = muckenhoupt_ap(0.5, 2.0, 500, kSeed);
  const ApEstimate bad = muckenhoupt_ap(-3.0, 2.0, 500, kSeed);
  const bool ok = !one.diverged && std::abs(one.constant - 1.0) <= kUnitWeightTol && !half.diverged &&
                  std::isfinite(half.constant) && bad.diverged;
  return {ok, "w=1: " + fmt("%.12f", one.constant) + "; x^0.5: " + fmt("%.4f", half.constant) +
                  (half.diverged ? " diverged" : " finite") + "; x^-3: " +
                  (bad.diverged ? "diverged" : "finite") + " (" +
                  std::to_string(bad.diverged_samples) + " balls)"};
}

Outcome gradient() {
  const RunConfig cfg = load_config((kConfigs / "benchmark_game.yaml").string());
  const Game game(cfg.game);
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> gauss;
  auto direction = [&](int i) {
    Eigen::VectorXd v(game.grid().size());
    for (auto& x : v) x = gauss(rng);
    GridFunction d = game.control_mask(i).apply(GridFunction(game.grid(), v));
    d *= 1.0 / control_norm(d);
    return d;
  };
  const GridFunction f1 = 0.3 * direction(1);
  const GridFunction f2 = 0.3 * direction(2);
  double worst = 0.0;
  for (int i : {1, 2}) {
    const GridFunction g = game.gradient(i, f1, f2);
    for (int k = 0; k < 20; ++k) {
      const GridFunction d = direction(i);
      const double analytic = control_inner(g, d);
      const double jp = i == 1 ? game.cost(1, f1 + kFdStep * d, f2) : game.cost(2, f1, f2 + kFdStep * d);
      const double jm = i == 1 ? game.cost(1, f1 - kFdStep * d, f2) : game.cost(2, f1, f2 - kFdStep * d);
      const double fd = (jp - jm) / (2 * kFdStep);
      worst = std::max(worst, std::abs(fd - analytic) / std::abs(analytic));
    }
  }
  return {worst < kGradientRelErr, "max relative error " + fmt("%.3g", worst) + " over 40 directions"};
}

Outcome nash() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load_config((kConfigs / "benchmark_game.yaml").string());
  const Game game(cfg.game);
  const NashResult r = game.nash_solve();
  const double t = seconds_since(t0);
  const double n1 = control_norm(r.f1_star);
  const double n2 = control_norm(r.f2_star);
  const double final_residual = r.br_residuals.empty() ? INFINITY : r.br_residuals.back();
  const bool converged = r.converged && final_residual <= kBrTol && r.br_iterations <= 200;
  const bool cert = r.certified && r.certification.deviations >= 200 &&
                    r.certification.margin1 >= -kCertRelTol * (1 + r.j1) &&
                    r.certification.margin2 >= -kCertRelTol * (1 + r.j2);
  const bool feasible = n1 <= game.radius(1) + kFeasibilitySlack && n2 <= game.radius(2) + kFeasibilitySlack;
  const bool fixed = r.fixed_point_residual1 <= 10 * kBrTol && r.fixed_point_residual2 <= 10 * kBrTol;
  std::ostringstream d;
  d << r.br_iterations << " sweeps, residual " << fmt("%.3g", final_residual) << ", margins "
    << fmt("%.3g", r.certification.margin1) << "/" << fmt("%.3g", r.certification.margin2)
    << ", |f1|=" << fmt("%.4g", n1) << " |f2|=" << fmt("%.4g", n2) << ", BR residuals "
    << fmt("%.3g", r.fixed_point_residual1) << "/" << fmt("%.3g", r.fixed_point_residual2) << ", "
    << fmt("%.2f s", t);
  return {converged && cert && feasible && fixed && t < kNashSeconds, d.str()};
}

Outcome trivial_game() {
  GameConfig c = load_config((kConfigs / "benchmark_game.yaml").string()).game;
  c.m1 = c.m2 = 0.0;
  const Game zero_game(c);
  const NashResult r = zero_game.nash_solve();
  const bool singleton = r.f1_star.values().norm() == 0.0 && r.f2_star.values().norm() == 0.0 &&
                         r.certified && r.certification_margin == 0.0;

  const Game game(load_config((kConfigs / "benchmark_game.yaml").string()).game);
  const GridFunction z = game.zero();
  const bool zero_state = game.state_solve(z, z, z).values().norm() == 0.0;

  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd a(game.grid().size()), b(game.grid().size());
  for (auto& x : a) x = gauss(rng);
  for (auto& x : b) x = gauss(rng);
  const GridFunction f1(game.grid(), a);
  const GridFunction f2(game.grid(), b);
  const GridFunction& g = game.leader();
  const GridFunction sum = game.state_solve(g, z, z) + game.state_solve(z, f1, z) + game.state_solve(z, z, f2);
  const double sup = (game.state_solve(g, f1, f2) - sum).values().lpNorm<Eigen::Infinity>();
  return {singleton && zero_state && sup <= kSuperpositionTol,
          std::string("M=0 ") + (singleton ? "(0,0) certified margin 0" : "FAILED") + "; zero data " +
              (zero_state ? "zero state" : "NONZERO state") + "; superposition defect " + fmt("%.3g", sup)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const char* configs[] = {"benchmark_game.yaml", "verify.yaml", "study_coercivity.yaml",
                           "study_embedding.yaml", "study_muckenhoupt.yaml"};
  const fs::path root = fs::temp_directory_path() / "dsn_acceptance_determinism";
  fs::remove_all(root);
  int tables = 0;
  bool ok = true;
  std::string bad;
  for (const char* name : configs) {
    RunConfig cfg = load_config((kConfigs / name).string());
    if (cfg.command == Command::Verify) apply_overrides(cfg, std::nullopt, 64);
    for (const char* run_id : {"a", "b"}) {
      cfg.output_dir = (root / name / run_id).string();
      const RunReport r = run(cfg);
      ok &= r.errors.empty();
    }
    for (const auto& e : fs::directory_iterator(root / name / "a")) {
      if (e.path().extension() != ".csv") continue;
      ++tables;
      if (slurp(e.path()) != slurp(root / name / "b" / e.path().filename())) {
        ok = false;
        bad += std::string(" ") + name + "/" + e.path().filename().string();
      }
    }
  }
  return {ok && tables > 0, std::to_string(tables) + " tables from 5 sampling commands compared" +
                                (bad.empty() ? ", all byte-identical" : "; differ:" + bad)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"manufactured-solution convergence", convergence},
      {"energy estimate boundedness", energy},
      {"coercivity of the stabilized form", coercivity},
      {"strict inclusion counterexample", inclusion},
      {"Lq embedding boundedness", embedding},
      {"Muckenhoupt power weights", muckenhoupt},
      {"adjoint gradient vs finite differences", gradient},
      {"Nash pipeline on the benchmark", nash},
      {"trivial-game invariants", trivial_game},
      {"determinism of sampling commands", determinism},
  };
  int failed = 0;
  int k = 0;
  for (const auto& [name, check] : criteria) {
    ++k;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << k << "] " << name << ": " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
