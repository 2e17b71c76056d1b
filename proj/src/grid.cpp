#include "dsn/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsn {

Grid::Grid(int nx, int ny, double alpha) : nx_(nx), ny_(ny), alpha_(alpha) {
  if (nx < 2 || ny < 2) {
    throw std::invalid_argument("grid needs nx >= 2 and ny >= 2, got nx=" + std::to_string(nx) +
                                ", ny=" + std::to_string(ny));
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1], got " + std::to_string(alpha));
  }
  hx_ = 1.0 / (nx + 1);
  hy_ = 1.0 / (ny + 1);
}

Grid build_grid(int nx, int ny, double alpha) { return Grid(nx, ny, alpha); }

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw std::invalid_argument("grid functions live on different grids");
  }
}

// GridFunction

GridFunction::GridFunction(const Grid& grid)
    : grid_(grid), values_(Eigen::VectorXd::Zero(grid.size())) {}

GridFunction::GridFunction(const Grid& grid, Eigen::VectorXd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("grid function has " + std::to_string(values_.size()) +
                                " values, grid has " + std::to_string(grid_.size()) +
                                " interior nodes");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("grid function values must be finite");
  }
}

GridFunction GridFunction::sample(const Grid& grid, const Field2D& f) {
  Eigen::VectorXd v(grid.size());
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      v[grid.index(i, j)] = f(grid.x(i), grid.y(j));
    }
  }
  return GridFunction(grid, std::move(v));
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(grid_, other.grid_);
  values_ += other.values_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(grid_, other.grid_);
  values_ -= other.values_;
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  values_ *= s;
  return *this;
}

bool GridFunction::operator==(const GridFunction& other) const {
  return grid_ == other.grid_ && values_ == other.values_;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

// ClosedGridFunction

ClosedGridFunction::ClosedGridFunction(const Grid& grid)
    : grid_(grid), values_(Eigen::VectorXd::Zero((grid.nx() + 2) * (grid.ny() + 2))) {}

ClosedGridFunction ClosedGridFunction::sample(const Grid& grid, const Field2D& f) {
  ClosedGridFunction u(grid);
  for (int J = 0; J <= grid.ny() + 1; ++J) {
    for (int I = 0; I <= grid.nx() + 1; ++I) {
      u(I, J) = f(I * grid.hx(), J * grid.hy());
    }
  }
  if (!u.values_.allFinite()) {
    throw std::invalid_argument("sampled closed-grid function is not finite");
  }
  return u;
}

ClosedGridFunction ClosedGridFunction::from_interior(const GridFunction& v) {
  const Grid& g = v.grid();
  ClosedGridFunction u(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      u(i + 1, j + 1) = v(i, j);
    }
  }
  return u;
}

// RegionMask

RegionMask::RegionMask(const Grid& grid, std::vector<bool> indicator)
    : grid_(grid), indicator_(std::move(indicator)) {
  if (static_cast<int>(indicator_.size()) != grid_.size()) {
    throw std::invalid_argument("mask size does not match grid");
  }
}

RegionMask RegionMask::rectangle(const Grid& grid, double x0, double x1, double y0, double y1) {
  if (!(0.0 <= x0 && x0 < x1 && x1 <= 1.0 && 0.0 <= y0 && y0 < y1 && y1 <= 1.0)) {
    throw std::invalid_argument("rectangle must satisfy 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1");
  }
  std::vector<bool> ind(grid.size(), false);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.x(i);
      const double y = grid.y(j);
      ind[grid.index(i, j)] = x0 < x && x < x1 && y0 < y && y < y1;
    }
  }
  return RegionMask(grid, std::move(ind));
}

RegionMask RegionMask::full(const Grid& grid) {
  return RegionMask(grid, std::vector<bool>(grid.size(), true));
}

RegionMask rect_mask(const Grid& grid, double x0, double x1, double y0, double y1) {
  return RegionMask::rectangle(grid, x0, x1, y0, y1);
}

int RegionMask::count() const {
  int n = 0;
  for (bool b : indicator_) n += b ? 1 : 0;
  return n;
}

GridFunction RegionMask::apply(const GridFunction& u) const {
  require_same_grid(grid_, u.grid());
  GridFunction out = u;
  apply_in_place(out.values());
  return out;
}

void RegionMask::apply_in_place(Eigen::VectorXd& values) const {
  for (int k = 0; k < grid_.size(); ++k) {
    if (!indicator_[k]) values[k] = 0.0;
  }
}

Eigen::VectorXd RegionMask::as_vector() const {
  Eigen::VectorXd v(grid_.size());
  for (int k = 0; k < grid_.size(); ++k) v[k] = indicator_[k] ? 1.0 : 0.0;
  return v;
}

RegionMask RegionMask::intersect(const RegionMask& other) const {
  require_same_grid(grid_, other.grid_);
  std::vector<bool> ind(grid_.size());
  for (int k = 0; k < grid_.size(); ++k) ind[k] = indicator_[k] && other.indicator_[k];
  return RegionMask(grid_, std::move(ind));
}

// Cell quadrature

CellField cell_field(const ClosedGridFunction& u) {
  const Grid& g = u.grid();
  const int ncx = g.cells_x();
  const int ncy = g.cells_y();
  CellField c;
  c.value.resize(g.num_cells());
  c.dx.resize(g.num_cells());
  c.dy.resize(g.num_cells());
  c.dxy.resize(g.num_cells());
  const double hx = g.hx();
  const double hy = g.hy();
  for (int cj = 0; cj < ncy; ++cj) {
    for (int ci = 0; ci < ncx; ++ci) {
      const double u00 = u(ci, cj);
      const double u10 = u(ci + 1, cj);
      const double u01 = u(ci, cj + 1);
      const double u11 = u(ci + 1, cj + 1);
      const int c_idx = cj * ncx + ci;
      c.value[c_idx] = 0.25 * (u00 + u10 + u01 + u11);
      c.dx[c_idx] = 0.5 * ((u10 + u11) - (u00 + u01)) / hx;
      c.dy[c_idx] = 0.5 * ((u01 + u11) - (u00 + u10)) / hy;
      c.dxy[c_idx] = ((u11 - u10) - (u01 - u00)) / (hx * hy);
    }
  }
  return c;
}

CellField cell_field(const GridFunction& u) {
  return cell_field(ClosedGridFunction::from_interior(u));
}

Eigen::ArrayXd cell_weight(const Grid& grid, double exponent) {
  Eigen::ArrayXd w(grid.num_cells());
  for (int cj = 0; cj < grid.cells_y(); ++cj) {
    for (int ci = 0; ci < grid.cells_x(); ++ci) {
      w[cj * grid.cells_x() + ci] = exponent == 0.0 ? 1.0 : std::pow(grid.cell_x(ci), exponent);
    }
  }
  return w;
}

double integrate_cells(const Grid& grid, const Eigen::ArrayXd& integrand) {
  return grid.hx() * grid.hy() * integrand.sum();
}

WeightedIntegral weighted_inner_report(const GridFunction& u, const GridFunction& v,
                                       double exponent, QuadratureRule rule) {
  require_same_grid(u.grid(), v.grid());
  const Grid& g = u.grid();
  WeightedIntegral out;
  if (rule == QuadratureRule::NodalLumped) {
    double sum = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const double w = exponent == 0.0 ? 1.0 : std::pow(g.x(i), exponent);
        const double prod = u(i, j) * v(i, j);
        sum += w * prod;
        if (i == 0 && exponent <= -1.0 && prod != 0.0) out.divergence_warning = true;
      }
    }
    out.value = g.hx() * g.hy() * sum;
    return out;
  }

  // Cell-center interpolant values only; derivatives are not needed here.
  const int ncx = g.cells_x();
  double sum = 0.0;
  for (int cj = 0; cj < g.cells_y(); ++cj) {
    for (int ci = 0; ci < ncx; ++ci) {
      auto corner_mean = [&](const GridFunction& f) {
        double s = 0.0;
        for (int dj = 0; dj <= 1; ++dj) {
          for (int di = 0; di <= 1; ++di) {
            const int i = ci - 1 + di;
            const int j = cj - 1 + dj;
            if (i >= 0 && i < g.nx() && j >= 0 && j < g.ny()) s += f(i, j);
          }
        }
        return 0.25 * s;
      };
      const double prod = corner_mean(u) * corner_mean(v);
      const double w = exponent == 0.0 ? 1.0 : std::pow(g.cell_x(ci), exponent);
      sum += w * prod;
      if (ci == 0 && exponent <= -1.0 && prod != 0.0) out.divergence_warning = true;
    }
  }
  out.value = g.hx() * g.hy() * sum;
  return out;
}

double weighted_inner(const GridFunction& u, const GridFunction& v, double exponent,
                      QuadratureRule rule) {
  return weighted_inner_report(u, v, exponent, rule).value;
}

}  // namespace dsn
