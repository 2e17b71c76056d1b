#include "dsn/grid.hpp"

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

}  // namespace

TEST(Grid, SpacingAndNodes) {
  const Grid g = build_grid(3, 3, 0.5);
  EXPECT_DOUBLE_EQ(g.hx(), 0.25);
  EXPECT_DOUBLE_EQ(g.hy(), 0.25);
  EXPECT_EQ(g.size(), 9);
  EXPECT_DOUBLE_EQ(g.x(0), 0.25);
  EXPECT_DOUBLE_EQ(g.y(2), 0.75);

  const Grid f = build_grid(127, 127, 1.0);
  EXPECT_DOUBLE_EQ(f.hx(), 1.0 / 128.0);
  EXPECT_DOUBLE_EQ(f.hy(), 1.0 / 128.0);
}

TEST(Grid, SpacingTimesCellsIsOne) {
  for (int n : {2, 3, 7, 10, 63, 100, 999}) {
    const Grid g(n, n + 1, 0.3);
    EXPECT_NEAR(g.hx() * (n + 1), 1.0, 1e-14);
    EXPECT_NEAR(g.hy() * (n + 2), 1.0, 1e-14);
    EXPECT_GT(g.x(0), 0.0);
    EXPECT_LT(g.x(n - 1), 1.0);
    EXPECT_LT(g.y(n), 1.0);
  }
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(build_grid(3, 3, 1.5), std::invalid_argument);
  EXPECT_THROW(build_grid(3, 3, 0.0), std::invalid_argument);
  EXPECT_THROW(build_grid(1, 3, 0.5), std::invalid_argument);
  EXPECT_THROW(build_grid(3, 1, 0.5), std::invalid_argument);
  EXPECT_NO_THROW(build_grid(2, 2, 1.0));
}

TEST(GridFunction, SizeAndFiniteness) {
  const Grid g(3, 4, 0.5);
  EXPECT_EQ(GridFunction(g).values().size(), 12);
  EXPECT_THROW(GridFunction(g, Eigen::VectorXd::Zero(5)), std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(12);
  bad[3] = std::nan("");
  EXPECT_THROW(GridFunction(g, bad), std::invalid_argument);
}

TEST(GridFunction, MismatchedGridsRejected) {
  const GridFunction a(Grid(3, 3, 0.5));
  const GridFunction b(Grid(4, 3, 0.5));
  EXPECT_THROW(a + b, std::invalid_argument);
  EXPECT_THROW(weighted_inner(a, b, 0.0), std::invalid_argument);
}

TEST(RectMask, FullSquareSelectsAll) {
  const Grid g(5, 4, 0.5);
  const RegionMask m = rect_mask(g, 0, 1, 0, 1);
  EXPECT_EQ(m.count(), g.size());
  EXPECT_EQ(m, RegionMask::full(g));
}

TEST(RectMask, InvertedOrEmptyRejected) {
  const Grid g(3, 3, 0.5);
  EXPECT_THROW(rect_mask(g, 0.5, 0.5, 0, 1), std::invalid_argument);
  EXPECT_THROW(rect_mask(g, 0.6, 0.4, 0, 1), std::invalid_argument);
  EXPECT_THROW(rect_mask(g, 0, 1, 0.7, 0.2), std::invalid_argument);
  EXPECT_THROW(rect_mask(g, -0.1, 1, 0, 1), std::invalid_argument);
}

TEST(RectMask, OpenRectangleExcludesEdgeNodes) {
  const Grid g(3, 3, 0.5);
  const RegionMask m = rect_mask(g, 0, 0.5, 0, 1);
  EXPECT_EQ(m.count(), 3);
  for (int j = 0; j < 3; ++j) {
    EXPECT_TRUE(m.contains(g.index(0, j)));
    EXPECT_FALSE(m.contains(g.index(1, j)));  // x = 0.5 lies on the edge
    EXPECT_FALSE(m.contains(g.index(2, j)));
  }
}

TEST(RectMask, IdempotentAndCommutesWithScaling) {
  const Grid g(9, 7, 0.5);
  std::mt19937_64 rng(3);
  const RegionMask m = rect_mask(g, 0.2, 0.7, 0.1, 0.5);
  for (int t = 0; t < 10; ++t) {
    const GridFunction u = random_function(g, rng);
    const GridFunction once = m.apply(u);
    EXPECT_EQ(m.apply(once), once);
    EXPECT_EQ(m.apply(2.5 * u), 2.5 * once);
  }
}

TEST(WeightedInner, ConstantIntegrals) {
  // Nodal 1 has a boundary truncation error of order h.
  double prev = 1.0;
  for (int n : {8, 16, 32, 64}) {
    const Grid g(n, n, 0.5);
    const GridFunction one = GridFunction::sample(g, [](double, double) { return 1.0; });
    const double err = std::abs(weighted_inner(one, one, 0.0) - 1.0);
    EXPECT_LT(err, 4.0 / n);
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(WeightedInner, AnalyticIntegralsConvergeMonotonically) {
  struct Case {
    Field2D u;
    double exponent;
    double exact;
    double rel_tol;  // at n = 128
  };
  const Case cases[] = {
      // Nodal data is zero on the boundary, so constants lose O(h) near the
      // edges; against x^-1/2 the first column costs O(h^1/2).
      {[](double, double) { return 1.0; }, 0.0, 1.0, 0.05},
      {[](double, double) { return 1.0; }, -0.5, 2.0, 0.1},
      {[](double x, double) { return x; }, 0.0, 1.0 / 3.0, 0.05},
      {[](double x, double y) { return x * (1 - x) * y * (1 - y); }, 0.0, 1.0 / 900.0, 1e-3},
  };
  for (const Case& c : cases) {
    double prev = INFINITY;
    for (int n : {8, 16, 32, 64, 128}) {
      const Grid g(n, n, 0.5);
      const GridFunction u = GridFunction::sample(g, c.u);
      const double err = std::abs(weighted_inner(u, u, c.exponent) - c.exact);
      EXPECT_LT(err, prev) << "n=" << n << " exponent=" << c.exponent;
      prev = err;
    }
    EXPECT_LT(prev, c.rel_tol * c.exact);
  }
}

TEST(WeightedInner, SymmetricBilinearNonnegative) {
  const Grid g(12, 10, 0.5);
  std::mt19937_64 rng(11);
  for (double e : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
    for (auto rule : {QuadratureRule::CellMidpoint, QuadratureRule::NodalLumped}) {
      const GridFunction u = random_function(g, rng);
      const GridFunction v = random_function(g, rng);
      const GridFunction w = random_function(g, rng);
      const double uv = weighted_inner(u, v, e, rule);
      const double scale = std::sqrt(weighted_inner(u, u, e, rule) * weighted_inner(v, v, e, rule));
      EXPECT_NEAR(uv, weighted_inner(v, u, e, rule), 1e-14 * scale);
      const double lhs = weighted_inner(2.0 * u + w, v, e, rule);
      const double rhs = 2.0 * uv + weighted_inner(w, v, e, rule);
      EXPECT_NEAR(lhs, rhs, 1e-13 * (std::abs(lhs) + scale));
      EXPECT_GE(weighted_inner(u, u, e, rule), 0.0);
    }
  }
}

TEST(WeightedInner, DivergenceWarningNearDegenerateEdge) {
  const Grid g(16, 16, 1.0);
  const GridFunction one = GridFunction::sample(g, [](double, double) { return 1.0; });
  EXPECT_TRUE(weighted_inner_report(one, one, -1.0).divergence_warning);
  EXPECT_TRUE(weighted_inner_report(one, one, -1.0, QuadratureRule::NodalLumped).divergence_warning);
  EXPECT_FALSE(weighted_inner_report(one, one, -0.5).divergence_warning);
  const GridFunction away = rect_mask(g, 0.5, 1, 0, 1).apply(one);
  EXPECT_FALSE(weighted_inner_report(away, away, -1.0).divergence_warning);
  EXPECT_TRUE(std::isfinite(weighted_inner(one, one, -1.0)));
}

TEST(ClosedGridFunction, FromInteriorHasZeroBoundary) {
  const Grid g(4, 3, 0.5);
  const GridFunction u = GridFunction::sample(g, [](double x, double y) { return 1 + x + y; });
  const ClosedGridFunction c = ClosedGridFunction::from_interior(u);
  for (int I = 0; I <= 5; ++I) {
    EXPECT_EQ(c(I, 0), 0.0);
    EXPECT_EQ(c(I, 4), 0.0);
  }
  EXPECT_EQ(c(1, 1), u(0, 0));
  EXPECT_EQ(c(4, 3), u(3, 2));
}
