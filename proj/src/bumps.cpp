#include "dsn/bumps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dsn {

namespace {

double psi(double s) {
  const double t = 1.0 - s * s;
  return t > 0.0 ? std::exp(1.0 - 1.0 / t) : 0.0;
}

}  // namespace

double Bump::operator()(double x, double y) const {
  return amplitude * psi((x - cx) / rx) * psi((y - cy) / ry);
}

double BumpSum::operator()(double x, double y) const {
  double s = 0.0;
  for (const Bump& b : bumps) s += b(x, y);
  return s;
}

std::vector<BumpSum> random_bump_family(int count, std::uint64_t seed,
                                        const BumpFamilyOptions& o) {
  if (count < 0 || o.min_bumps < 1 || o.max_bumps < o.min_bumps) {
    throw std::invalid_argument("invalid bump family options");
  }
  if (!(o.margin >= 0.0 && o.min_radius > 0.0 && o.max_radius >= o.min_radius &&
        2.0 * (o.margin + o.min_radius) < 1.0)) {
    throw std::invalid_argument("bump radii do not fit inside the margin");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> how_many(o.min_bumps, o.max_bumps);
  const double r_cap = std::min(o.max_radius, 0.5 - o.margin);

  std::vector<BumpSum> family(count);
  for (BumpSum& f : family) {
    const int n = how_many(rng);
    for (int k = 0; k < n; ++k) {
      Bump b;
      b.amplitude = 2.0 * unit(rng) - 1.0;
      b.rx = o.min_radius + (r_cap - o.min_radius) * unit(rng);
      b.ry = o.min_radius + (r_cap - o.min_radius) * unit(rng);
      const double lo_x = o.margin + b.rx;
      const double lo_y = o.margin + b.ry;
      b.cx = lo_x + (1.0 - 2.0 * lo_x) * unit(rng);
      b.cy = lo_y + (1.0 - 2.0 * lo_y) * unit(rng);
      f.bumps.push_back(b);
    }
  }
  return family;
}

GridFunction sample(const Grid& grid, const BumpSum& f) {
  return GridFunction::sample(grid, [&f](double x, double y) { return f(x, y); });
}

}  // namespace dsn
