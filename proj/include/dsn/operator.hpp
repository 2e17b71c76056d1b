#ifndef DSN_OPERATOR_HPP
#define DSN_OPERATOR_HPP

#include "dsn/grid.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace dsn {

/// Discretization of the advection term x^alpha d/dy.
enum class YScheme {
  Upwind,    ///< backward difference, first order, M-matrix
  Centered,  ///< three-point centered difference, second order
};

std::string to_string(YScheme scheme);
YScheme parse_y_scheme(const std::string& name);

using SparseMatrix = Eigen::SparseMatrix<double>;

/// A u = -1/2 u_xx + x^alpha u_y on the interior nodes with homogeneous
/// Dirichlet data eliminated.
class SparseOperator {
 public:
  SparseOperator(const Grid& grid, YScheme scheme, SparseMatrix matrix);

  const Grid& grid() const { return grid_; }
  YScheme scheme() const { return scheme_; }
  const SparseMatrix& matrix() const { return matrix_; }

  GridFunction apply(const GridFunction& u) const;
  /// The transpose is the discrete adjoint used for cost gradients.
  GridFunction apply_transpose(const GridFunction& p) const;

 private:
  Grid grid_;
  YScheme scheme_;
  SparseMatrix matrix_;
};

SparseOperator assemble(const Grid& grid, YScheme scheme = YScheme::Upwind);

struct SolveReport {
  double residual_norm = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  std::string method;
};

/// Raised when neither the direct nor the iterative path meets the residual
/// contract.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), achieved_residual_(achieved_residual) {}
  double achieved_residual() const { return achieved_residual_; }

 private:
  double achieved_residual_;
};

struct SolverOptions {
  int max_iterations = 2000;
  /// Skip the direct factorization (exercises the Krylov fallback).
  bool force_iterative = false;
};

/// Factorizes the operator once and solves A u = f or A^T p = r repeatedly.
/// The residual contract is ||A u - f||_2 <= tol * max(1, ||f||_2). A sparse
/// LU factorization is tried first; BiCGSTAB with an incomplete LU
/// preconditioner is the fallback. Not reentrant: one instance per thread.
class DirichletSolver {
 public:
  explicit DirichletSolver(const SparseOperator& op, SolverOptions options = {});
  ~DirichletSolver();
  DirichletSolver(DirichletSolver&&) noexcept;
  DirichletSolver& operator=(DirichletSolver&&) noexcept;

  const SparseOperator& op() const { return op_; }

  std::pair<GridFunction, SolveReport> solve(const GridFunction& f, double tol) const;
  std::pair<GridFunction, SolveReport> solve_transpose(const GridFunction& r, double tol) const;

 private:
  struct Impl;
  SparseOperator op_;
  SolverOptions options_;
  std::unique_ptr<Impl> impl_;
};

std::pair<GridFunction, SolveReport> solve_dirichlet(const SparseOperator& op,
                                                     const GridFunction& f, double tol);

/// Discrete weak-form residual
///   int [ (x^a u_y) phi + 1/2 u_x phi_x ] - int f phi
/// using cell-center derivatives of the bilinear interpolants and the
/// midpoint cell quadrature.
double weak_form_residual(const GridFunction& u, const GridFunction& f, const GridFunction& phi);

/// Residual of the stabilized form tested with phi_y exp(-theta y):
///   int [ (x^a u_y) phi_y + 1/2 u_x phi_xy ] e^{-theta y} - int f phi_y e^{-theta y}
double theta_weak_form_residual(const GridFunction& u, const GridFunction& f,
                                const GridFunction& phi, double theta = 1.0);

}  // namespace dsn

#endif  // DSN_OPERATOR_HPP
