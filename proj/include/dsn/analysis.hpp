#ifndef DSN_ANALYSIS_HPP
#define DSN_ANALYSIS_HPP

#include "dsn/grid.hpp"
#include "dsn/norms.hpp"
#include "dsn/operator.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dsn {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

/// Outcome of a verification campaign. Every entry of `metrics` has one value
/// per level; `observed_orders` has one value per consecutive pair of levels;
/// `samples` holds per-sample series (one row per test function or ball).
struct StudyResult {
  std::string study;
  std::vector<int> levels;
  std::map<std::string, std::vector<double>> metrics;
  std::vector<double> observed_orders;
  std::map<std::string, std::vector<double>> samples;
  Verdict verdict = Verdict::Inconclusive;
  std::map<std::string, double> thresholds;
  std::string note;

  bool operator==(const StudyResult&) const = default;
};

/// Acceptance knobs of the trend-based verdicts.
struct StudyThresholds {
  double energy_growth = 1.2;        ///< finest / coarsest energy ratio
  double inclusion_plateau = 0.05;   ///< relative spread of w11 from inclusion_from_level
  int inclusion_from_level = 32;
  double upwind_order = 0.9;
  double centered_order = 1.5;
  double embedding_growth = 1.1;     ///< finest / next-finest max ratio
  double coercivity_safety = 1.5;    ///< inflation of the sampled Poincare constant

  bool operator==(const StudyThresholds&) const = default;
};

/// log(e_coarse / e_fine) / log(h_coarse / h_fine) for consecutive levels,
/// where level n means an n x n interior grid.
std::vector<double> observed_orders(const std::vector<int>& levels,
                                    const std::vector<double>& errors);

// Energy estimate

struct Forcing {
  std::string name;
  std::function<double(double x, double y, double alpha)> f;
};

/// Five-member forcing family used by the energy study.
std::vector<Forcing> default_energy_family();

/// R(f, h) = ||u_h||_{W11} / ||f||_{L2(x^-a)} (half-exponent) per member and
/// level. Pass when R(finest) <= energy_growth * R(coarsest) for every member.
/// Also records the weighted trace of u_h on the last interior row, which
/// measures the layer at y = 1.
StudyResult energy_estimate_study(const std::vector<Forcing>& family,
                                  const std::vector<int>& levels, double alpha,
                                  YScheme scheme = YScheme::Upwind,
                                  const StudyThresholds& thresholds = {});

// Coercivity

/// a(v,v) = int [ x^a v_y^2 + 1/2 v_x v_xy ] e^{-theta y}.
double stabilized_form_diagonal(const GridFunction& v, double theta);

/// delta = min{ e^-t, t e^-t / 8, t e^-t / (8 mu) }.
double coercivity_constant(double theta, double mu);

struct CoercivityOptions {
  int n = 64;
  double alpha = 0.5;
};

/// Samples random bump superpositions, estimates the discrete Poincare
/// constant mu_h (sample max of ||v||^2/||v_x||^2, inflated by the safety
/// factor) and checks a(v,v) >= delta_h ||v||^2_{W11} on every sample.
/// Sample margins are relative: (a - delta ||v||^2) / (delta ||v||^2).
StudyResult coercivity_check(double theta, int n_samples, std::uint64_t seed,
                             const CoercivityOptions& options = {},
                             const StudyThresholds& thresholds = {});

// Strict inclusion

/// Norms of (x^2 + y)^(1/4) sampled on the closed grid: w11 should plateau
/// while the unweighted ||u_y|| keeps growing.
StudyResult strict_inclusion_demo(const std::vector<int>& levels, double alpha = 0.5,
                                  const StudyThresholds& thresholds = {});

// Convergence

enum class Manufactured {
  SinSin,      ///< sin(pi x) sin(pi y)
  Polynomial,  ///< x(1-x) y(1-y)
};

std::string to_string(Manufactured m);
Manufactured parse_manufactured(const std::string& s);

struct ManufacturedPair {
  Field2D solution;
  Field2D forcing;
};

/// Exact solution and forcing -1/2 u_xx + x^a u_y.
ManufacturedPair manufactured_pair(Manufactured m, double alpha);

/// Nodal max and L2 errors against the manufactured solution per level.
/// Orders are L2 orders; Pass when all of them reach the scheme's threshold.
StudyResult convergence_study(YScheme scheme, const std::vector<int>& levels,
                              Manufactured manufactured, double alpha,
                              const StudyThresholds& thresholds = {});

// Embedding and Muckenhoupt campaigns

/// Max over a random bump family of ||u||_{L^q}/||u||_{W11} per level and q.
/// Pass when the finest-level max is at most embedding_growth times the
/// next-finest one for every q.
StudyResult embedding_study(const std::vector<int>& levels, const std::vector<double>& qs,
                            int n_functions, std::uint64_t seed, double alpha,
                            const StudyThresholds& thresholds = {});

/// Sampled A_p constants of power weights x^e. Pass when exactly the
/// exponents in (-1, p-1) come out finite.
StudyResult muckenhoupt_study(const std::vector<double>& exponents, double p, int n_balls,
                              std::uint64_t seed, const BallSampling& sampling = {});

}  // namespace dsn

#endif  // DSN_ANALYSIS_HPP
