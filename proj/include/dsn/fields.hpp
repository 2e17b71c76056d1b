#ifndef DSN_FIELDS_HPP
#define DSN_FIELDS_HPP

#include "dsn/grid.hpp"

#include <optional>
#include <string>

namespace dsn {

/// Axis-aligned open rectangle (x0,x1) x (y0,y1).
struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  bool operator==(const Rect&) const = default;
};

RegionMask to_mask(const Grid& grid, const Rect& rect);

/// Named analytic field used by configs:
///   zero
///   constant    value
///   sinsin      amplitude * sin(kx pi x) sin(ky pi y)
///   xpow_siny   amplitude * x^power * sin(ky pi y)   (power defaults to alpha)
///   polynomial  amplitude * x(1-x) y(1-y)
///   bump        amplitude * smooth bump centered at (cx,cy), radii (rx,ry)
/// optionally multiplied by the indicator of `support`.
struct FieldSpec {
  std::string type = "zero";
  double amplitude = 1.0;
  double value = 0.0;
  double kx = 1.0;
  double ky = 1.0;
  std::optional<double> power;
  double cx = 0.5;
  double cy = 0.5;
  double rx = 0.25;
  double ry = 0.25;
  std::optional<Rect> support;

  bool operator==(const FieldSpec&) const = default;
};

/// Throws std::invalid_argument for unknown types.
Field2D to_function(const FieldSpec& spec, double alpha);

GridFunction sample(const Grid& grid, const FieldSpec& spec);

}  // namespace dsn

#endif  // DSN_FIELDS_HPP
