#ifndef DSN_GRID_HPP
#define DSN_GRID_HPP

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace dsn {

/// Uniform tensor grid on the unit square carrying the degeneracy exponent
/// alpha of the weight x^alpha. Only interior nodes are unknowns; boundary
/// nodes are implicit.
class Grid {
 public:
  Grid(int nx, int ny, double alpha);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double alpha() const { return alpha_; }

  /// Number of interior nodes, nx*ny.
  int size() const { return nx_ * ny_; }

  /// Interior node coordinates, i in [0, nx), j in [0, ny).
  double x(int i) const { return (i + 1) * hx_; }
  double y(int j) const { return (j + 1) * hy_; }

  /// Lexicographic interior index, x fastest.
  int index(int i, int j) const { return j * nx_ + i; }

  /// Number of quadrature cells per direction (nx+1, ny+1).
  int cells_x() const { return nx_ + 1; }
  int cells_y() const { return ny_ + 1; }
  int num_cells() const { return cells_x() * cells_y(); }
  double cell_x(int ci) const { return (ci + 0.5) * hx_; }
  double cell_y(int cj) const { return (cj + 0.5) * hy_; }

  bool operator==(const Grid& other) const = default;

 private:
  int nx_;
  int ny_;
  double hx_;
  double hy_;
  double alpha_;
};

Grid build_grid(int nx, int ny, double alpha);

/// Throws std::invalid_argument if the two grids differ.
void require_same_grid(const Grid& a, const Grid& b);

using Field2D = std::function<double(double x, double y)>;

/// Nodal scalar field on the interior nodes; boundary values are zero.
class GridFunction {
 public:
  explicit GridFunction(const Grid& grid);
  GridFunction(const Grid& grid, Eigen::VectorXd values);

  /// Samples `f` at the interior nodes.
  static GridFunction sample(const Grid& grid, const Field2D& f);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }

  bool is_finite() const { return values_.allFinite(); }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);

  bool operator==(const GridFunction& other) const;

 private:
  Grid grid_;
  Eigen::VectorXd values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

/// Nodal field on the closed grid, boundary nodes included. Used for
/// functions that do not vanish on the boundary (norm studies).
/// Storage is (nx+2) x (ny+2), x fastest.
class ClosedGridFunction {
 public:
  explicit ClosedGridFunction(const Grid& grid);
  static ClosedGridFunction sample(const Grid& grid, const Field2D& f);
  static ClosedGridFunction from_interior(const GridFunction& u);

  const Grid& grid() const { return grid_; }
  /// I in [0, nx+1], J in [0, ny+1]; I = 0 is x = 0.
  double operator()(int I, int J) const { return values_[J * (grid_.nx() + 2) + I]; }
  double& operator()(int I, int J) { return values_[J * (grid_.nx() + 2) + I]; }

 private:
  Grid grid_;
  Eigen::VectorXd values_;
};

/// Characteristic function of a region, one flag per interior node.
class RegionMask {
 public:
  RegionMask(const Grid& grid, std::vector<bool> indicator);

  /// Everything inside the open rectangle (x0,x1) x (y0,y1).
  static RegionMask rectangle(const Grid& grid, double x0, double x1, double y0, double y1);
  static RegionMask full(const Grid& grid);

  const Grid& grid() const { return grid_; }
  bool contains(int k) const { return indicator_[k]; }
  int count() const;
  bool empty() const { return count() == 0; }

  /// Multiplication by the characteristic function.
  GridFunction apply(const GridFunction& u) const;
  void apply_in_place(Eigen::VectorXd& values) const;

  /// Indicator as a 0/1 vector.
  Eigen::VectorXd as_vector() const;

  RegionMask intersect(const RegionMask& other) const;

  bool operator==(const RegionMask& other) const = default;

 private:
  Grid grid_;
  std::vector<bool> indicator_;
};

RegionMask rect_mask(const Grid& grid, double x0, double x1, double y0, double y1);

/// Samples of the bilinear interpolant of nodal data at cell centers: the
/// value and the derivatives dx, dy, dxdy of the interpolant. One entry per
/// cell, cell index cj * cells_x + ci.
struct CellField {
  Eigen::ArrayXd value;
  Eigen::ArrayXd dx;
  Eigen::ArrayXd dy;
  Eigen::ArrayXd dxy;
};

CellField cell_field(const ClosedGridFunction& u);
CellField cell_field(const GridFunction& u);

/// x_c^exponent at every cell center.
Eigen::ArrayXd cell_weight(const Grid& grid, double exponent);

/// Midpoint sum hx*hy*sum(integrand) of a cell-centered integrand.
double integrate_cells(const Grid& grid, const Eigen::ArrayXd& integrand);

enum class QuadratureRule {
  /// Midpoint rule on the (nx+1) x (ny+1) cells applied to the bilinear
  /// interpolant; the weight is evaluated at cell centers only.
  CellMidpoint,
  /// Diagonal (lumped) nodal rule hx*hy*sum over interior nodes.
  NodalLumped,
};

struct WeightedIntegral {
  double value = 0.0;
  /// Set when exponent <= -1 and the integrand does not vanish in the first
  /// cell column, where the continuous integral may diverge.
  bool divergence_warning = false;
};

WeightedIntegral weighted_inner_report(const GridFunction& u, const GridFunction& v,
                                       double exponent,
                                       QuadratureRule rule = QuadratureRule::CellMidpoint);

/// Quadrature value of the integral of x^exponent * u * v over the square.
double weighted_inner(const GridFunction& u, const GridFunction& v, double exponent,
                      QuadratureRule rule = QuadratureRule::CellMidpoint);

}  // namespace dsn

#endif  // DSN_GRID_HPP
