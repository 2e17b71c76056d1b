#include "dsn/analysis.hpp"
#include "dsn/bumps.hpp"
#include "dsn/operator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dsn;

namespace {

GridFunction random_function(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(g.size());
  for (auto& x : v) x = d(rng);
  return GridFunction(g, v);
}

const double kPi = std::acos(-1.0);

}  // namespace

TEST(Assemble, DimensionsAndStencilWidth) {
  for (auto s : {YScheme::Upwind, YScheme::Centered}) {
    const Grid g(7, 5, 0.5);
    const SparseOperator op = assemble(g, s);
    EXPECT_EQ(op.matrix().rows(), g.size());
    EXPECT_EQ(op.matrix().cols(), g.size());
    for (int k = 0; k < g.size(); ++k) {
      int nnz = 0;
      for (int c = 0; c < op.matrix().outerSize(); ++c) {
        if (op.matrix().coeff(k, c) != 0.0) ++nnz;
      }
      EXPECT_LE(nnz, 5);
    }
  }
}

TEST(Assemble, ConstantVanishesAwayFromBoundary) {
  const Grid g(10, 10, 0.5);
  for (auto s : {YScheme::Upwind, YScheme::Centered}) {
    const GridFunction one = GridFunction::sample(g, [](double, double) { return 1.0; });
    const GridFunction r = assemble(g, s).apply(one);
    for (int j = 1; j < g.ny() - 1; ++j) {
      for (int i = 1; i < g.nx() - 1; ++i) EXPECT_NEAR(r(i, j), 0.0, 1e-10);
    }
  }
}

TEST(Assemble, QuadraticInXGivesOne) {
  const Grid g(12, 9, 0.7);
  const GridFunction u = GridFunction::sample(g, [](double x, double) { return x * (1 - x); });
  for (auto s : {YScheme::Upwind, YScheme::Centered}) {
    const GridFunction r = assemble(g, s).apply(u);
    // The y stencil sees the zero boundary on the first and last rows.
    for (int j = 1; j < g.ny() - 1; ++j) {
      for (int i = 0; i < g.nx(); ++i) EXPECT_NEAR(r(i, j), 1.0, 1e-10);
    }
  }
}

TEST(Assemble, CenteredAdvectionOfLinearY) {
  const Grid g(8, 8, 0.5);
  const GridFunction u = GridFunction::sample(g, [](double, double y) { return y; });
  const GridFunction r = assemble(g, YScheme::Centered).apply(u);
  // Away from x boundaries u_xx = 0 exactly, so the row is x^a * 1.
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) EXPECT_NEAR(r(i, j), std::sqrt(g.x(i)), 1e-12);
  }
}

TEST(Assemble, UpwindIsMMatrix) {
  const Grid g(9, 9, 0.5);
  const SparseOperator op = assemble(g, YScheme::Upwind);
  const SparseMatrix& A = op.matrix();
  for (int c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
      if (it.row() == it.col()) {
        EXPECT_GT(it.value(), 0.0);
      } else {
        EXPECT_LE(it.value(), 0.0);
      }
    }
  }
}

TEST(Solve, ZeroForcingGivesZero) {
  for (auto s : {YScheme::Upwind, YScheme::Centered}) {
    const Grid g(16, 16, 0.5);
    const auto [u, rep] = solve_dirichlet(assemble(g, s), GridFunction(g), 1e-10);
    EXPECT_EQ(u.values().norm(), 0.0);
    EXPECT_EQ(rep.residual_norm, 0.0);
  }
}

TEST(Solve, ResidualContract) {
  std::mt19937_64 rng(5);
  for (auto s : {YScheme::Upwind, YScheme::Centered}) {
    const Grid g(40, 30, 0.5);
    const SparseOperator op = assemble(g, s);
    const GridFunction f = random_function(g, rng);
    const auto [u, rep] = solve_dirichlet(op, f, 1e-10);
    const double res = (op.apply(u) - f).values().norm();
    EXPECT_LE(res, 1e-10 * std::max(1.0, f.values().norm()));
    EXPECT_NEAR(rep.residual_norm, res, 1e-12 * f.values().norm());
    EXPECT_EQ(rep.iterations, 0);
  }
}

TEST(Solve, KrylovFallbackMeetsContract) {
  std::mt19937_64 rng(6);
  const Grid g(24, 24, 0.5);
  const SparseOperator op = assemble(g, YScheme::Upwind);
  const GridFunction f = random_function(g, rng);
  const DirichletSolver solver(op, SolverOptions{.force_iterative = true});
  const auto [u, rep] = solver.solve(f, 1e-10);
  EXPECT_GT(rep.iterations, 0);
  EXPECT_LE((op.apply(u) - f).values().norm(), 1e-10 * std::max(1.0, f.values().norm()));
  const auto [p, rept] = solver.solve_transpose(f, 1e-10);
  EXPECT_LE((op.apply_transpose(p) - f).values().norm(), 1e-10 * std::max(1.0, f.values().norm()));
}

TEST(Solve, KrylovCapExhaustionCarriesResidual) {
  std::mt19937_64 rng(7);
  const Grid g(48, 48, 0.5);
  const SparseOperator op = assemble(g, YScheme::Upwind);
  const DirichletSolver solver(op, SolverOptions{.max_iterations = 1, .force_iterative = true});
  try {
    solver.solve(random_function(g, rng), 1e-15);
    FAIL() << "expected a SolveError";
  } catch (const SolveError& e) {
    EXPECT_GT(e.achieved_residual(), 0.0);
  }
}

TEST(Solve, Linearity) {
  std::mt19937_64 rng(8);
  for (auto s : {YScheme::Upwind, YScheme::Centered}) {
    const Grid g(32, 32, 0.5);
    const SparseOperator op = assemble(g, s);
    for (int t = 0; t < 5; ++t) {
      const GridFunction f1 = random_function(g, rng);
      const GridFunction f2 = random_function(g, rng);
      const double a = 1.7;
      const double b = -0.3;
      const GridFunction u = solve_dirichlet(op, a * f1 + b * f2, 1e-12).first;
      const GridFunction v = a * solve_dirichlet(op, f1, 1e-12).first +
                             b * solve_dirichlet(op, f2, 1e-12).first;
      const double scale = (a * f1).values().norm() + (b * f2).values().norm();
      EXPECT_LE((u - v).values().norm(), 1e-9 * scale);
    }
  }
}

TEST(Solve, MaximumPrincipleUpwind) {
  std::mt19937_64 rng(9);
  const Grid g(30, 30, 0.5);
  const SparseOperator op = assemble(g, YScheme::Upwind);
  for (int t = 0; t < 5; ++t) {
    GridFunction f = random_function(g, rng);
    f.values() = -f.values().cwiseAbs();
    const GridFunction u = solve_dirichlet(op, f, 1e-12).first;
    EXPECT_LE(u.values().maxCoeff(), 1e-12);
  }
}

TEST(Solve, ManufacturedSolutionConverges) {
  const ManufacturedPair mp = manufactured_pair(Manufactured::SinSin, 0.5);
  double prev = INFINITY;
  for (int n : {16, 32, 64}) {
    const Grid g(n, n, 0.5);
    const GridFunction f = GridFunction::sample(g, mp.forcing);
    const GridFunction u = solve_dirichlet(assemble(g), f, 1e-12).first;
    const double err = (u - GridFunction::sample(g, mp.solution)).values().lpNorm<Eigen::Infinity>();
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(ManufacturedPair, ForcingMatchesFormula) {
  const double a = 0.5;
  const ManufacturedPair mp = manufactured_pair(Manufactured::SinSin, a);
  for (double x : {0.1, 0.4, 0.9}) {
    for (double y : {0.2, 0.5, 0.7}) {
      const double expect = 0.5 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y) +
                            std::pow(x, a) * kPi * std::sin(kPi * x) * std::cos(kPi * y);
      EXPECT_NEAR(mp.forcing(x, y), expect, 1e-12);
    }
  }
}

TEST(WeakForm, ZeroDataGivesZero) {
  const Grid g(10, 10, 0.5);
  const GridFunction phi = GridFunction::sample(g, [](double x, double y) { return std::sin(3 * x + y); });
  EXPECT_EQ(weak_form_residual(GridFunction(g), GridFunction(g), phi), 0.0);
  EXPECT_EQ(theta_weak_form_residual(GridFunction(g), GridFunction(g), phi, 1.0), 0.0);
}

TEST(WeakForm, ManufacturedResidualVanishesUnderRefinement) {
  const ManufacturedPair mp = manufactured_pair(Manufactured::SinSin, 0.5);
  const Field2D test = [](double x, double y) { return std::sin(kPi * x) * std::sin(2 * kPi * y); };
  double prev_w = INFINITY;
  double prev_t = INFINITY;
  std::vector<int> levels{16, 32, 64, 128};
  std::vector<double> errs;
  for (int n : levels) {
    const Grid g(n, n, 0.5);
    const GridFunction u = GridFunction::sample(g, mp.solution);
    const GridFunction f = GridFunction::sample(g, mp.forcing);
    const GridFunction phi = GridFunction::sample(g, test);
    const double w = std::abs(weak_form_residual(u, f, phi));
    const double t = std::abs(theta_weak_form_residual(u, f, phi, 1.0));
    EXPECT_LT(w, prev_w);
    EXPECT_LT(t, prev_t);
    prev_w = w;
    prev_t = t;
    errs.push_back(w);
  }
  for (double p : observed_orders(levels, errs)) EXPECT_GE(p, 0.9);
}

TEST(WeakForm, DiscreteSolutionResidualDecreases) {
  const ManufacturedPair mp = manufactured_pair(Manufactured::SinSin, 0.5);
  const std::vector<BumpSum> tests = random_bump_family(10, 42);
  double prev = INFINITY;
  for (int n : {16, 32, 64}) {
    const Grid g(n, n, 0.5);
    const GridFunction f = GridFunction::sample(g, mp.forcing);
    const GridFunction u = solve_dirichlet(assemble(g), f, 1e-12).first;
    double worst = 0.0;
    for (const BumpSum& b : tests) worst = std::max(worst, std::abs(weak_form_residual(u, f, sample(g, b))));
    EXPECT_LT(worst, prev);
    prev = worst;
  }
}

TEST(WeakForm, LinearInTestFunction) {
  std::mt19937_64 rng(10);
  const Grid g(20, 20, 0.5);
  const GridFunction u = random_function(g, rng);
  const GridFunction f = random_function(g, rng);
  const GridFunction p = random_function(g, rng);
  const GridFunction q = random_function(g, rng);
  const double lhs = weak_form_residual(u, f, 2.0 * p - 3.0 * q);
  const double rhs = 2.0 * weak_form_residual(u, f, p) - 3.0 * weak_form_residual(u, f, q);
  EXPECT_NEAR(lhs, rhs, 1e-13 * (1 + std::abs(lhs)));
  const double lt = theta_weak_form_residual(u, f, 2.0 * p - 3.0 * q, 0.7);
  const double rt = 2.0 * theta_weak_form_residual(u, f, p, 0.7) -
                    3.0 * theta_weak_form_residual(u, f, q, 0.7);
  EXPECT_NEAR(lt, rt, 1e-13 * (1 + std::abs(lt)));
}

TEST(WeakForm, ThetaZeroIsUnweightedForm) {
  std::mt19937_64 rng(12);
  const Grid g(12, 12, 0.5);
  const GridFunction u = random_function(g, rng);
  const GridFunction f = random_function(g, rng);
  const GridFunction phi = random_function(g, rng);
  // At theta = 0 the stabilized form is the plain form tested with phi_y.
  const CellField U = cell_field(u);
  const CellField F = cell_field(f);
  const CellField P = cell_field(phi);
  const Eigen::ArrayXd xa = cell_weight(g, g.alpha());
  const double expect = integrate_cells(g, xa * U.dy * P.dy + 0.5 * U.dx * P.dxy - F.value * P.dy);
  EXPECT_NEAR(theta_weak_form_residual(u, f, phi, 0.0), expect, 1e-12 * (1 + std::abs(expect)));
  EXPECT_THROW(theta_weak_form_residual(u, f, phi, -1.0), std::invalid_argument);
}

TEST(Adjoint, TransposeConsistency) {
  std::mt19937_64 rng(13);
  for (auto s : {YScheme::Upwind, YScheme::Centered}) {
    const Grid g(25, 19, 0.5);
    const SparseOperator op = assemble(g, s);
    for (int t = 0; t < 5; ++t) {
      const GridFunction u = random_function(g, rng);
      const GridFunction p = random_function(g, rng);
      const double lhs = op.apply(u).values().dot(p.values());
      const double rhs = u.values().dot(op.apply_transpose(p).values());
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
    }
  }
}

TEST(Scheme, NamesRoundTrip) {
  for (auto s : {YScheme::Upwind, YScheme::Centered}) EXPECT_EQ(parse_y_scheme(to_string(s)), s);
  EXPECT_THROW(parse_y_scheme("downwind"), std::invalid_argument);
}
