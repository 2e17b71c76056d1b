#include "dsn/analysis.hpp"

#include "dsn/bumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dsn {

namespace {
// Residual target of the study solves. 1e-12 is below the rounding floor of
// the direct solve at n = 256.
constexpr double kStudySolveTol = 1e-10;
}  // namespace

using std::numbers::pi;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "pass") return Verdict::Pass;
  if (s == "fail") return Verdict::Fail;
  if (s == "inconclusive") return Verdict::Inconclusive;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

std::vector<double> observed_orders(const std::vector<int>& levels,
                                    const std::vector<double>& errors) {
  if (levels.size() != errors.size()) throw std::invalid_argument("levels/errors size mismatch");
  std::vector<double> orders;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double h_coarse = 1.0 / (levels[k - 1] + 1);
    const double h_fine = 1.0 / (levels[k] + 1);
    orders.push_back(std::log(errors[k - 1] / errors[k]) / std::log(h_coarse / h_fine));
  }
  return orders;
}

namespace {

void require_increasing(const std::vector<int>& levels) {
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (levels[k] <= levels[k - 1]) throw std::invalid_argument("levels must be increasing");
  }
}

}  // namespace

// Energy estimate

std::vector<Forcing> default_energy_family() {
  return {
      {"xpow_siny", [](double x, double y, double a) { return std::pow(x, a) * std::sin(pi * y); }},
      {"masked_right", [](double x, double y, double) { return x > 0.5 ? std::sin(pi * y) : 0.0; }},
      {"sinsin", [](double x, double y, double) { return std::sin(pi * x) * std::sin(pi * y); }},
      {"constant", [](double, double, double) { return 1.0; }},
      {"oscillatory",
       [](double x, double y, double) { return std::sin(2 * pi * x) * std::sin(3 * pi * y); }},
  };
}

StudyResult energy_estimate_study(const std::vector<Forcing>& family,
                                  const std::vector<int>& levels, double alpha, YScheme scheme,
                                  const StudyThresholds& thresholds) {
  require_increasing(levels);
  StudyResult r;
  r.study = "energy";
  r.levels = levels;
  r.thresholds = {{"energy_growth", thresholds.energy_growth}};
  for (const Forcing& m : family) {
    r.metrics["ratio:" + m.name] = {};
    r.metrics["top_trace:" + m.name] = {};
  }

  for (int n : levels) {
    const Grid g(n, n, alpha);
    const DirichletSolver solver(assemble(g, scheme));
    for (const Forcing& m : family) {
      const GridFunction f =
          GridFunction::sample(g, [&](double x, double y) { return m.f(x, y, alpha); });
      const double fnorm = l2_weighted_norm(f, WeightConvention::HalfExponent).value;
      if (!(fnorm > 0.0)) {
        throw std::invalid_argument("energy study: forcing '" + m.name + "' has zero norm");
      }
      const GridFunction u = solver.solve(f, kStudySolveTol).first;
      r.metrics["ratio:" + m.name].push_back(norms_of(u).w11 / fnorm);
      double trace = 0.0;
      for (int i = 0; i < n; ++i) {
        const double top = u(i, n - 1);
        trace += std::pow(g.x(i), alpha) * top * top;
      }
      r.metrics["top_trace:" + m.name].push_back(std::sqrt(g.hx() * trace));
    }
  }

  if (levels.size() < 2) {
    r.verdict = Verdict::Inconclusive;
    r.note = "a single level shows no trend";
    return r;
  }
  r.verdict = Verdict::Pass;
  for (const Forcing& m : family) {
    const auto& ratio = r.metrics["ratio:" + m.name];
    const double growth = ratio.back() / ratio.front();
    r.metrics["growth:" + m.name] = std::vector<double>(levels.size(), 0.0);
    for (std::size_t k = 0; k < levels.size(); ++k) {
      r.metrics["growth:" + m.name][k] = ratio[k] / ratio.front();
    }
    if (growth > thresholds.energy_growth) {
      r.verdict = Verdict::Fail;
      r.note += (r.note.empty() ? "" : "; ") + m.name + " grows by " + std::to_string(growth);
    }
  }
  return r;
}

// Coercivity

double stabilized_form_diagonal(const GridFunction& v, double theta) {
  const Grid& g = v.grid();
  const CellField c = cell_field(v);
  const Eigen::ArrayXd xa = cell_weight(g, g.alpha());
  Eigen::ArrayXd damp(g.num_cells());
  for (int cj = 0; cj < g.cells_y(); ++cj) {
    damp.segment(cj * g.cells_x(), g.cells_x()).setConstant(std::exp(-theta * g.cell_y(cj)));
  }
  return integrate_cells(g, (xa * c.dy.square() + 0.5 * c.dx * c.dxy) * damp);
}

double coercivity_constant(double theta, double mu) {
  if (!(theta > 0.0) || !(mu > 0.0)) throw std::invalid_argument("theta and mu must be positive");
  const double e = std::exp(-theta);
  return std::min({e, theta * e / 8.0, theta * e / (8.0 * mu)});
}

StudyResult coercivity_check(double theta, int n_samples, std::uint64_t seed,
                             const CoercivityOptions& options, const StudyThresholds& thresholds) {
  if (!(theta > 0.0)) throw std::invalid_argument("coercivity check needs theta > 0");
  if (n_samples < 1) throw std::invalid_argument("coercivity check needs samples");
  const Grid g(options.n, options.n, options.alpha);
  const auto family = random_bump_family(n_samples, seed);

  std::vector<NormReport> norms;
  std::vector<double> forms;
  double mu_raw = 0.0;
  for (const BumpSum& b : family) {
    const GridFunction v = sample(g, b);
    const NormReport nr = norms_of(v);
    norms.push_back(nr);
    forms.push_back(stabilized_form_diagonal(v, theta));
    if (nr.dx_l2 > 0.0) mu_raw = std::max(mu_raw, (nr.l2 * nr.l2) / (nr.dx_l2 * nr.dx_l2));
  }
  const double mu_h = thresholds.coercivity_safety * mu_raw;
  const double delta_h = coercivity_constant(theta, mu_h);

  StudyResult r;
  r.study = "coercivity";
  r.levels = {options.n};
  r.thresholds = {{"coercivity_safety", thresholds.coercivity_safety}, {"theta", theta}};
  auto& s_form = r.samples["a_vv"];
  auto& s_bound = r.samples["delta_w11_sq"];
  auto& s_margin = r.samples["margin"];
  auto& s_poincare = r.samples["poincare_ratio"];
  int violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double w2 = norms[k].w11 * norms[k].w11;
    const double bound = delta_h * w2;
    const double margin = bound > 0.0 ? (forms[k] - bound) / bound : 0.0;
    s_form.push_back(forms[k]);
    s_bound.push_back(bound);
    s_margin.push_back(margin);
    s_poincare.push_back(norms[k].dx_l2 > 0.0
                             ? norms[k].l2 * norms[k].l2 / (norms[k].dx_l2 * norms[k].dx_l2)
                             : 0.0);
    if (margin < 0.0) ++violations;
    min_margin = std::min(min_margin, margin);
  }
  r.metrics["mu_h"] = {mu_h};
  r.metrics["delta_h"] = {delta_h};
  r.metrics["min_margin"] = {min_margin};
  r.metrics["violations"] = {static_cast<double>(violations)};
  r.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
  if (violations > 0) {
    const auto worst = std::min_element(s_margin.begin(), s_margin.end()) - s_margin.begin();
    r.note = "violation at sample " + std::to_string(worst);
  }
  return r;
}

// Strict inclusion

StudyResult strict_inclusion_demo(const std::vector<int>& levels, double alpha,
                                  const StudyThresholds& thresholds) {
  require_increasing(levels);
  StudyResult r;
  r.study = "inclusion";
  r.levels = levels;
  r.thresholds = {{"inclusion_plateau", thresholds.inclusion_plateau},
                  {"inclusion_from_level", static_cast<double>(thresholds.inclusion_from_level)}};
  auto& w11 = r.metrics["w11"];
  auto& dy = r.metrics["dy_l2"];
  auto& wdy = r.metrics["weighted_dy_l2"];
  for (int n : levels) {
    const Grid g(n, n, alpha);
    const auto u = ClosedGridFunction::sample(
        g, [](double x, double y) { return std::pow(x * x + y, 0.25); });
    const NormReport nr = norms_of(u);
    w11.push_back(nr.w11);
    dy.push_back(nr.dy_l2);
    wdy.push_back(nr.weighted_dy_l2);
  }

  if (alpha != 0.5) {
    r.verdict = Verdict::Inconclusive;
    r.note = "the counterexample is specific to alpha = 1/2; report only";
    return r;
  }
  if (levels.size() < 2) {
    r.verdict = Verdict::Inconclusive;
    r.note = "a single level shows no trend";
    return r;
  }

  bool increasing = true;
  for (std::size_t k = 1; k < levels.size(); ++k) increasing = increasing && dy[k] > dy[k - 1];

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  int plateau_levels = 0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < thresholds.inclusion_from_level) continue;
    lo = std::min(lo, w11[k]);
    hi = std::max(hi, w11[k]);
    ++plateau_levels;
  }
  if (plateau_levels < 2) {
    r.verdict = Verdict::Inconclusive;
    r.note = "fewer than two levels at or above the plateau level";
    return r;
  }
  const double spread = (hi - lo) / lo;
  r.metrics["w11_spread"] = std::vector<double>(levels.size(), spread);
  const bool plateau = spread <= thresholds.inclusion_plateau;
  r.verdict = plateau && increasing ? Verdict::Pass : Verdict::Fail;
  if (!plateau) r.note = "w11 spread " + std::to_string(spread);
  if (!increasing) r.note += (r.note.empty() ? "" : "; ") + std::string("dy_l2 not increasing");
  return r;
}

// Convergence

std::string to_string(Manufactured m) {
  return m == Manufactured::SinSin ? "sinsin" : "polynomial";
}

Manufactured parse_manufactured(const std::string& s) {
  if (s == "sinsin") return Manufactured::SinSin;
  if (s == "polynomial") return Manufactured::Polynomial;
  throw std::invalid_argument("unknown manufactured solution '" + s + "'");
}

ManufacturedPair manufactured_pair(Manufactured m, double alpha) {
  if (m == Manufactured::SinSin) {
    return {[](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); },
            [alpha](double x, double y) {
              return 0.5 * pi * pi * std::sin(pi * x) * std::sin(pi * y) +
                     std::pow(x, alpha) * pi * std::sin(pi * x) * std::cos(pi * y);
            }};
  }
  return {[](double x, double y) { return x * (1 - x) * y * (1 - y); },
          [alpha](double x, double y) {
            return y * (1 - y) + std::pow(x, alpha) * x * (1 - x) * (1 - 2 * y);
          }};
}

StudyResult convergence_study(YScheme scheme, const std::vector<int>& levels,
                              Manufactured manufactured, double alpha,
                              const StudyThresholds& thresholds) {
  require_increasing(levels);
  if (levels.size() < 3) throw std::invalid_argument("convergence study needs >= 3 levels");
  const ManufacturedPair mp = manufactured_pair(manufactured, alpha);
  const double needed =
      scheme == YScheme::Upwind ? thresholds.upwind_order : thresholds.centered_order;

  StudyResult r;
  r.study = "convergence";
  r.levels = levels;
  r.thresholds = {{"order", needed}};
  auto& max_err = r.metrics["max_error"];
  auto& l2_err = r.metrics["l2_error"];
  bool exact_everywhere = true;
  for (int n : levels) {
    const Grid g(n, n, alpha);
    const GridFunction f = GridFunction::sample(g, mp.forcing);
    const GridFunction exact = GridFunction::sample(g, mp.solution);
    const GridFunction u = solve_dirichlet(assemble(g, scheme), f, kStudySolveTol).first;
    const GridFunction e = u - exact;
    max_err.push_back(e.values().lpNorm<Eigen::Infinity>());
    l2_err.push_back(std::sqrt(weighted_inner(e, e, 0.0)));
    exact_everywhere &= max_err.back() <= 1e-10 * exact.values().lpNorm<Eigen::Infinity>();
  }
  r.observed_orders = observed_orders(levels, l2_err);
  const double worst = *std::min_element(r.observed_orders.begin(), r.observed_orders.end());
  r.note = to_string(scheme) + ", " + to_string(manufactured);
  if (exact_everywhere) {
    // Orders of rounding noise mean nothing; the scheme reproduces u exactly.
    r.verdict = Verdict::Pass;
    r.note += "; errors at rounding level on every grid, scheme exact for this solution";
  } else {
    r.verdict = worst >= needed ? Verdict::Pass : Verdict::Fail;
  }
  return r;
}

// Embedding

StudyResult embedding_study(const std::vector<int>& levels, const std::vector<double>& qs,
                            int n_functions, std::uint64_t seed, double alpha,
                            const StudyThresholds& thresholds) {
  require_increasing(levels);
  if (qs.empty() || n_functions < 1) throw std::invalid_argument("embedding study needs q values");
  const auto family = random_bump_family(n_functions, seed);
  StudyResult r;
  r.study = "embedding";
  r.levels = levels;
  r.thresholds = {{"embedding_growth", thresholds.embedding_growth}};
  auto key = [](double q) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "max_ratio_q%g", q);
    return std::string(buf);
  };
  for (int n : levels) {
    const Grid g(n, n, alpha);
    std::vector<GridFunction> samples;
    samples.reserve(family.size());
    for (const BumpSum& b : family) samples.push_back(sample(g, b));
    for (double q : qs) {
      double best = 0.0;
      for (const GridFunction& u : samples) {
        if (norms_of(u).w11 == 0.0) continue;
        best = std::max(best, embedding_ratio(u, q));
      }
      r.metrics[key(q)].push_back(best);
    }
  }
  if (levels.size() < 2) {
    r.verdict = Verdict::Inconclusive;
    return r;
  }
  r.verdict = Verdict::Pass;
  for (double q : qs) {
    const auto& m = r.metrics[key(q)];
    if (m.back() > thresholds.embedding_growth * m[m.size() - 2]) r.verdict = Verdict::Fail;
  }
  return r;
}

// Muckenhoupt

StudyResult muckenhoupt_study(const std::vector<double>& exponents, double p, int n_balls,
                              std::uint64_t seed, const BallSampling& sampling) {
  if (!(p > 1.0)) throw std::invalid_argument("muckenhoupt study needs p > 1");
  StudyResult r;
  r.study = "muckenhoupt";
  r.thresholds = {{"p", p}, {"overflow_threshold", sampling.overflow_threshold}};
  r.verdict = Verdict::Pass;
  for (double e : exponents) {
    const ApEstimate est = muckenhoupt_ap(e, p, n_balls, seed, sampling);
    const bool expect_finite = e > -1.0 && e < p - 1.0;
    r.samples["exponent"].push_back(e);
    r.samples["constant"].push_back(est.constant);
    r.samples["diverged"].push_back(est.diverged ? 1.0 : 0.0);
    r.samples["diverged_samples"].push_back(est.diverged_samples);
    if (expect_finite == est.diverged) r.verdict = Verdict::Fail;
  }
  return r;
}

}  // namespace dsn
