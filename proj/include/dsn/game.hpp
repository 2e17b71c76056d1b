#ifndef DSN_GAME_HPP
#define DSN_GAME_HPP

#include "dsn/fields.hpp"
#include "dsn/grid.hpp"
#include "dsn/operator.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsn {

/// Leader/two-follower control game on the degenerate state equation
///   A y = chi_w g + chi_w1 f1 + chi_w2 f2,
/// with follower costs
///   J_i = ||y - yd_i||^2_{L2(G_i)} + ||f_i||^2_{L2(w_i; x^-a)}
/// and admissible sets ||f_i||_{L2(x^-a)} <= M_i (half-exponent convention).
struct GameConfig {
  int nx = 64;
  int ny = 64;
  double alpha = 0.5;
  Rect omega{0.1, 0.3, 0.1, 0.9};
  Rect omega1{0.4, 0.6, 0.1, 0.45};
  Rect omega2{0.4, 0.6, 0.55, 0.9};
  Rect g1{0.7, 0.9, 0.1, 0.45};
  Rect g2{0.7, 0.9, 0.55, 0.9};
  FieldSpec leader{.type = "sinsin"};
  FieldSpec yd1{.type = "sinsin", .amplitude = 0.1};
  FieldSpec yd2{.type = "sinsin", .amplitude = -0.1};
  double m1 = 1.0;
  double m2 = 1.0;
  double br_tol = 1e-8;
  int br_max_iters = 200;
  double inner_tol = 1e-12;
  int inner_max_iters = 1000;
  int deviation_samples = 200;
  /// Certification tolerance is cert_rel_tol * (1 + J_i*).
  double cert_rel_tol = 1e-8;
  double solve_tol = 1e-10;
  std::uint64_t seed = 0;

  bool operator==(const GameConfig&) const = default;
};

/// Validates ranges; throws std::invalid_argument.
void validate(const GameConfig& cfg);

/// Masks f to `mask` and scales it radially onto the ball of radius M when
/// its control norm exceeds M. The control norm is the nodal (lumped)
/// quadrature of int x^-a f^2.
GridFunction project_ball(const GridFunction& f, double radius, const RegionMask& mask);

/// (int x^-a f g)_h with the lumped nodal rule, the metric of the control space.
double control_inner(const GridFunction& f, const GridFunction& g);
double control_norm(const GridFunction& f);

struct BestResponse {
  GridFunction control;
  int iterations = 0;
  double projected_gradient_norm = 0.0;
  std::vector<double> costs;  ///< J_i at each accepted iterate
};

class BestResponseError : public std::runtime_error {
 public:
  BestResponseError(const std::string& what, GridFunction last, double residual)
      : std::runtime_error(what), last_(std::move(last)), residual_(residual) {}
  const GridFunction& last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  GridFunction last_;
  double residual_;
};

struct Certification {
  bool certified = false;
  double margin = 0.0;  ///< min over followers and deviations of J_i(dev) - J_i*
  double margin1 = 0.0;
  double margin2 = 0.0;
  double tol1 = 0.0;
  double tol2 = 0.0;
  int deviations = 0;  ///< per follower
};

struct NashResult {
  GridFunction f1_star;
  GridFunction f2_star;
  GridFunction state;
  double j1 = 0.0;
  double j2 = 0.0;
  int br_iterations = 0;
  std::vector<double> br_residuals;
  std::vector<double> j1_history;
  std::vector<double> j2_history;
  bool converged = false;
  bool certified = false;
  double certification_margin = 0.0;
  Certification certification;
  double fixed_point_residual1 = 0.0;  ///< ||BR1(f2*) - f1*||
  double fixed_point_residual2 = 0.0;
  std::string iteration_order = "gauss-seidel: f1 then f2";
  std::string gradient_convention =
      "Riesz representative in the lumped L2(x^-a) metric: chi_wi (x^a p + 2 f_i), A^T p = 2 chi_Gi (y - yd_i)";
};

/// Discretized game. Holds one factorization of the state operator shared by
/// every state and adjoint solve; const methods are safe to call from one
/// thread at a time.
class Game {
 public:
  explicit Game(const GameConfig& cfg);

  const GameConfig& config() const { return cfg_; }
  const Grid& grid() const { return grid_; }
  const RegionMask& control_mask(int i) const;
  const RegionMask& observation_mask(int i) const;
  const GridFunction& leader() const { return leader_; }
  const GridFunction& target(int i) const;
  double radius(int i) const;
  const SparseOperator& op() const { return solver_.op(); }

  GridFunction zero() const { return GridFunction(grid_); }

  /// y(g, f1, f2).
  GridFunction state_solve(const GridFunction& g, const GridFunction& f1,
                           const GridFunction& f2) const;
  GridFunction state(const GridFunction& f1, const GridFunction& f2) const;

  double cost(int i, const GridFunction& f1, const GridFunction& f2) const;
  double tracking(int i, const GridFunction& y) const;

  /// Riesz representative of dJ_i/df_i in the control metric.
  GridFunction gradient(int i, const GridFunction& f1, const GridFunction& f2) const;

  GridFunction project(int i, const GridFunction& f) const;

  /// Projected gradient with Armijo backtracking, warm-started from `start`
  /// (zero when null). Throws BestResponseError on cap exhaustion.
  BestResponse best_response(int i, const GridFunction& f_other,
                             const GridFunction* start = nullptr) const;

  NashResult nash_solve() const;

  /// Samples feasible deviations for each follower (zero control, the
  /// boundary sphere, uniform radii and local perturbations of the
  /// candidate) plus any `extra` deviations, and checks the Nash
  /// inequalities within cert_rel_tol * (1 + J_i*).
  Certification certify(const GridFunction& f1, const GridFunction& f2,
                        const std::vector<GridFunction>& extra1 = {},
                        const std::vector<GridFunction>& extra2 = {}) const;

 private:
  struct Evaluation {
    GridFunction state;
    double cost;
  };
  Evaluation evaluate(int i, const GridFunction& f1, const GridFunction& f2) const;
  GridFunction gradient_at(int i, const GridFunction& own, const GridFunction& y) const;

  GameConfig cfg_;
  Grid grid_;
  DirichletSolver solver_;
  RegionMask omega_;
  RegionMask omega1_;
  RegionMask omega2_;
  RegionMask obs1_;
  RegionMask obs2_;
  GridFunction leader_;
  GridFunction leader_source_;
  GridFunction yd1_;
  GridFunction yd2_;
};

}  // namespace dsn

#endif  // DSN_GAME_HPP
