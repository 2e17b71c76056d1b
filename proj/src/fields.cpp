#include "dsn/fields.hpp"

#include "dsn/bumps.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsn {

RegionMask to_mask(const Grid& grid, const Rect& r) {
  return rect_mask(grid, r.x0, r.x1, r.y0, r.y1);
}

Field2D to_function(const FieldSpec& s, double alpha) {
  using std::numbers::pi;
  Field2D base;
  const double a = s.amplitude;
  if (s.type == "zero") {
    base = [](double, double) { return 0.0; };
  } else if (s.type == "constant") {
    base = [v = s.value](double, double) { return v; };
  } else if (s.type == "sinsin") {
    base = [a, kx = s.kx, ky = s.ky](double x, double y) {
      return a * std::sin(kx * pi * x) * std::sin(ky * pi * y);
    };
  } else if (s.type == "xpow_siny") {
    base = [a, p = s.power.value_or(alpha), ky = s.ky](double x, double y) {
      return a * std::pow(x, p) * std::sin(ky * pi * y);
    };
  } else if (s.type == "polynomial") {
    base = [a](double x, double y) { return a * x * (1 - x) * y * (1 - y); };
  } else if (s.type == "bump") {
    base = Bump{a, s.cx, s.cy, s.rx, s.ry};
  } else {
    throw std::invalid_argument("unknown field type '" + s.type + "'");
  }
  if (!s.support) return base;
  return [base, r = *s.support](double x, double y) {
    return (r.x0 < x && x < r.x1 && r.y0 < y && y < r.y1) ? base(x, y) : 0.0;
  };
}

GridFunction sample(const Grid& grid, const FieldSpec& spec) {
  return GridFunction::sample(grid, to_function(spec, grid.alpha()));
}

}  // namespace dsn
