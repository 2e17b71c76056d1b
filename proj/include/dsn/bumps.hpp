#ifndef DSN_BUMPS_HPP
#define DSN_BUMPS_HPP

#include "dsn/grid.hpp"

#include <cstdint>
#include <vector>

namespace dsn {

/// One compactly supported C-infinity bump
///   amplitude * psi((x-cx)/rx) * psi((y-cy)/ry),  psi(s) = exp(1 - 1/(1-s^2)),
/// whose support stays inside [margin, 1-margin]^2.
struct Bump {
  double amplitude = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  double rx = 0.25;
  double ry = 0.25;

  double operator()(double x, double y) const;
};

/// Superposition of bumps; vanishes identically near the boundary.
struct BumpSum {
  std::vector<Bump> bumps;
  double operator()(double x, double y) const;
};

struct BumpFamilyOptions {
  int min_bumps = 1;
  int max_bumps = 4;
  double margin = 0.05;
  double min_radius = 0.08;
  double max_radius = 0.45;
};

/// Deterministic family of random bump superpositions.
std::vector<BumpSum> random_bump_family(int count, std::uint64_t seed,
                                        const BumpFamilyOptions& options = {});

GridFunction sample(const Grid& grid, const BumpSum& f);

}  // namespace dsn

#endif  // DSN_BUMPS_HPP
