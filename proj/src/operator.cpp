#include "dsn/operator.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <cmath>
#include <vector>

namespace dsn {

std::string to_string(YScheme scheme) {
  return scheme == YScheme::Upwind ? "upwind" : "centered";
}

YScheme parse_y_scheme(const std::string& name) {
  if (name == "upwind") return YScheme::Upwind;
  if (name == "centered") return YScheme::Centered;
  throw std::invalid_argument("unknown y scheme '" + name + "' (expected upwind or centered)");
}

SparseOperator::SparseOperator(const Grid& grid, YScheme scheme, SparseMatrix matrix)
    : grid_(grid), scheme_(scheme), matrix_(std::move(matrix)) {
  if (matrix_.rows() != grid_.size() || matrix_.cols() != grid_.size()) {
    throw std::invalid_argument("operator dimension does not match grid");
  }
}

GridFunction SparseOperator::apply(const GridFunction& u) const {
  require_same_grid(grid_, u.grid());
  return GridFunction(grid_, matrix_ * u.values());
}

GridFunction SparseOperator::apply_transpose(const GridFunction& p) const {
  require_same_grid(grid_, p.grid());
  return GridFunction(grid_, matrix_.transpose() * p.values());
}

SparseOperator assemble(const Grid& grid, YScheme scheme) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double cxx = 0.5 / (grid.hx() * grid.hx());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(grid.size()) * 5);

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int row = grid.index(i, j);
      const double xa = std::pow(grid.x(i), grid.alpha());
      double diag = 2.0 * cxx;
      if (i > 0) trips.emplace_back(row, grid.index(i - 1, j), -cxx);
      if (i < nx - 1) trips.emplace_back(row, grid.index(i + 1, j), -cxx);

      if (scheme == YScheme::Upwind) {
        const double c = xa / grid.hy();
        diag += c;
        if (j > 0) trips.emplace_back(row, grid.index(i, j - 1), -c);
      } else {
        const double c = 0.5 * xa / grid.hy();
        if (j > 0) trips.emplace_back(row, grid.index(i, j - 1), -c);
        if (j < ny - 1) trips.emplace_back(row, grid.index(i, j + 1), c);
      }
      trips.emplace_back(row, row, diag);
    }
  }
  SparseMatrix a(grid.size(), grid.size());
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return SparseOperator(grid, scheme, std::move(a));
}

// DirichletSolver

struct DirichletSolver::Impl {
  SparseMatrix transposed;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool lu_ok = false;
};

DirichletSolver::DirichletSolver(const SparseOperator& op, SolverOptions options)
    : op_(op), options_(options), impl_(std::make_unique<Impl>()) {
  impl_->transposed = op_.matrix().transpose();
  impl_->transposed.makeCompressed();
  if (!options_.force_iterative) {
    impl_->lu.analyzePattern(op_.matrix());
    impl_->lu.factorize(op_.matrix());
    impl_->lu_ok = impl_->lu.info() == Eigen::Success;
  }
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::pair<GridFunction, SolveReport> solve_impl(
    const Grid& grid, const SparseMatrix& a, const GridFunction& f, double tol, int max_iterations,
    bool lu_ok, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& direct) {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  require_same_grid(grid, f.grid());
  if (!f.is_finite()) throw std::invalid_argument("right-hand side is not finite");

  const auto start = Clock::now();
  const Eigen::VectorXd& b = f.values();
  const double bnorm = b.norm();
  const double target = tol * std::max(1.0, bnorm);
  SolveReport report;

  if (bnorm == 0.0) {
    report.method = "trivial";
    report.wall_time = seconds_since(start);
    return {GridFunction(grid), report};
  }

  double best_residual = std::numeric_limits<double>::infinity();
  if (lu_ok) {
    Eigen::VectorXd x = direct(b);
    double res = (a * x - b).norm();
    if (x.allFinite() && res > target) {
      // one step of iterative refinement before giving up on the factorization
      x += direct(b - a * x);
      res = (a * x - b).norm();
    }
    if (x.allFinite() && res <= target) {
      report.residual_norm = res;
      report.method = "sparse-lu";
      report.wall_time = seconds_since(start);
      return {GridFunction(grid, std::move(x)), report};
    }
    if (std::isfinite(res)) best_residual = res;
  }

  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> krylov;
  krylov.setTolerance(target / bnorm);
  krylov.setMaxIterations(max_iterations);
  krylov.compute(a);
  Eigen::VectorXd x = krylov.solve(b);
  const double res = (a * x - b).norm();
  report.iterations = static_cast<int>(krylov.iterations());
  if (x.allFinite() && res <= target) {
    report.residual_norm = res;
    report.method = "bicgstab-ilut";
    report.wall_time = seconds_since(start);
    return {GridFunction(grid, std::move(x)), report};
  }
  if (std::isfinite(res)) best_residual = std::min(best_residual, res);
  char msg[128];
  std::snprintf(msg, sizeof msg, "linear solve did not reach residual %.3e (achieved %.3e)", target,
                best_residual);
  throw SolveError(msg, best_residual);
}

}  // namespace

std::pair<GridFunction, SolveReport> DirichletSolver::solve(const GridFunction& f,
                                                            double tol) const {
  return solve_impl(op_.grid(), op_.matrix(), f, tol, options_.max_iterations, impl_->lu_ok,
                    [this](const Eigen::VectorXd& b) -> Eigen::VectorXd {
                      return impl_->lu.solve(b);
                    });
}

std::pair<GridFunction, SolveReport> DirichletSolver::solve_transpose(const GridFunction& r,
                                                                      double tol) const {
  return solve_impl(op_.grid(), impl_->transposed, r, tol, options_.max_iterations,
                    impl_->lu_ok, [this](const Eigen::VectorXd& b) -> Eigen::VectorXd {
                      return impl_->lu.transpose().solve(b);
                    });
}

std::pair<GridFunction, SolveReport> solve_dirichlet(const SparseOperator& op,
                                                     const GridFunction& f, double tol) {
  return DirichletSolver(op).solve(f, tol);
}

// Weak-form residuals

double weak_form_residual(const GridFunction& u, const GridFunction& f, const GridFunction& phi) {
  require_same_grid(u.grid(), f.grid());
  require_same_grid(u.grid(), phi.grid());
  const Grid& g = u.grid();
  const CellField cu = cell_field(u);
  const CellField cf = cell_field(f);
  const CellField cp = cell_field(phi);
  const Eigen::ArrayXd xa = cell_weight(g, g.alpha());
  const Eigen::ArrayXd integrand =
      xa * cu.dy * cp.value + 0.5 * cu.dx * cp.dx - cf.value * cp.value;
  return integrate_cells(g, integrand);
}

double theta_weak_form_residual(const GridFunction& u, const GridFunction& f,
                                const GridFunction& phi, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be nonnegative");
  require_same_grid(u.grid(), f.grid());
  require_same_grid(u.grid(), phi.grid());
  const Grid& g = u.grid();
  const CellField cu = cell_field(u);
  const CellField cf = cell_field(f);
  const CellField cp = cell_field(phi);
  const Eigen::ArrayXd xa = cell_weight(g, g.alpha());
  Eigen::ArrayXd damp(g.num_cells());
  for (int cj = 0; cj < g.cells_y(); ++cj) {
    const double e = std::exp(-theta * g.cell_y(cj));
    damp.segment(cj * g.cells_x(), g.cells_x()).setConstant(e);
  }
  const Eigen::ArrayXd integrand =
      (xa * cu.dy * cp.dy + 0.5 * cu.dx * cp.dxy - cf.value * cp.dy) * damp;
  return integrate_cells(g, integrand);
}

}  // namespace dsn
