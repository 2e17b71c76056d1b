#include "dsn/norms.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace dsn {

namespace {

NormReport norms_from_cells(const Grid& g, const CellField& c, bool include_mixed) {
  const Eigen::ArrayXd xa = cell_weight(g, g.alpha());
  NormReport r;
  r.l2 = std::sqrt(integrate_cells(g, c.value.square()));
  r.dx_l2 = std::sqrt(integrate_cells(g, c.dx.square()));
  r.weighted_dy_l2 = std::sqrt(integrate_cells(g, xa * c.dy.square()));
  r.dy_l2 = std::sqrt(integrate_cells(g, c.dy.square()));
  r.w11 = std::sqrt(r.l2 * r.l2 + r.dx_l2 * r.dx_l2 + r.weighted_dy_l2 * r.weighted_dy_l2);
  if (include_mixed) {
    const double m = std::sqrt(integrate_cells(g, c.dxy.square()));
    r.mixed_l2 = m;
    r.v_norm = std::sqrt(r.w11 * r.w11 + m * m);
  }
  return r;
}

}  // namespace

NormReport norms_of(const GridFunction& u, bool include_mixed) {
  if (!u.is_finite()) throw std::invalid_argument("norms_of: function is not finite");
  return norms_from_cells(u.grid(), cell_field(u), include_mixed);
}

NormReport norms_of(const ClosedGridFunction& u, bool include_mixed) {
  return norms_from_cells(u.grid(), cell_field(u), include_mixed);
}

std::string to_string(WeightConvention c) {
  return c == WeightConvention::HalfExponent ? "half-exponent" : "full-exponent";
}

WeightConvention parse_weight_convention(const std::string& name) {
  if (name == "half-exponent") return WeightConvention::HalfExponent;
  if (name == "full-exponent") return WeightConvention::FullExponent;
  throw std::invalid_argument("unknown weight convention '" + name + "'");
}

WeightedNorm l2_weighted_norm(const GridFunction& f, WeightConvention convention) {
  const double a = f.grid().alpha();
  const double exponent = convention == WeightConvention::HalfExponent ? -a : -2.0 * a;
  const WeightedIntegral q = weighted_inner_report(f, f, exponent);
  return {std::sqrt(std::max(0.0, q.value)), convention, q.divergence_warning};
}

double lq_norm(const GridFunction& u, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("lq_norm needs q in [1, inf)");
  const CellField c = cell_field(u);
  return std::pow(integrate_cells(u.grid(), c.value.abs().pow(q)), 1.0 / q);
}

double embedding_ratio(const GridFunction& u, double q) {
  if (!(q >= 2.0 && q <= 4.0)) throw std::invalid_argument("embedding_ratio needs q in [2, 4]");
  const double denom = norms_of(u).w11;
  if (denom == 0.0) throw std::invalid_argument("embedding_ratio of the zero function");
  return lq_norm(u, q) / denom;
}

// Ball integrals. The weight depends on x only, so the integral over B ∩ Ω
// reduces to int x^e L(x) dx with L the length of the vertical chord.

namespace {

constexpr double kDiam = std::numbers::sqrt2;

double chord(const Ball& b, double x) {
  const double d = x - b.cx;
  const double s = std::sqrt(std::max(0.0, b.radius * b.radius - d * d));
  return std::max(0.0, std::min(1.0, b.cy + s) - std::max(0.0, b.cy - s));
}

// Points in (lo, hi) where the chord meets y = 0 or y = 1.
std::vector<double> chord_breaks(const Ball& b, double lo, double hi) {
  std::vector<double> pts{lo};
  for (double gap : {b.cy, 1.0 - b.cy}) {
    const double rem = b.radius * b.radius - gap * gap;
    if (rem <= 0.0) continue;
    const double off = std::sqrt(rem);
    for (double x : {b.cx - off, b.cx + off}) {
      if (x > lo && x < hi) pts.push_back(x);
    }
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  return pts;
}

double integrate_power_over_ball(const Ball& b, double exponent) {
  const double lo = std::max(0.0, b.cx - b.radius);
  const double hi = std::min(1.0, b.cx + b.radius);
  if (!(hi > lo)) return 0.0;
  if (lo == 0.0 && exponent <= -1.0) return std::numeric_limits<double>::infinity();

  boost::math::quadrature::tanh_sinh<double> integrator;
  const std::vector<double> pts = chord_breaks(b, lo, hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (!(pts[k + 1] > pts[k])) continue;
    auto integrand = [&](double x) {
      const double w = exponent == 0.0 ? 1.0 : std::pow(x, exponent);
      return w * chord(b, x);
    };
    total += integrator.integrate(integrand, pts[k], pts[k + 1]);
  }
  return total;
}

void check_ball(const Ball& b) {
  if (!(b.radius > 0.0) || !(b.cx > 0.0 && b.cx < 1.0 && b.cy > 0.0 && b.cy < 1.0)) {
    throw std::invalid_argument("ball needs a center in the unit square and a positive radius");
  }
}

// Infimum of x^e over the x-extent of B ∩ Ω.
double power_essinf(const Ball& b, double exponent) {
  const double lo = std::max(0.0, b.cx - b.radius);
  const double hi = std::min(1.0, b.cx + b.radius);
  if (exponent == 0.0) return 1.0;
  return exponent > 0.0 ? std::pow(lo, exponent) : std::pow(hi, exponent);
}

std::vector<Ball> sample_balls(int n, std::uint64_t seed, const BallSampling& s) {
  if (n < 1) throw std::invalid_argument("need at least one ball");
  if (!(s.min_radius > 0.0 && s.min_radius < kDiam)) {
    throw std::invalid_argument("min_radius must lie in (0, diam)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(s.min_radius);
  const double log_hi = std::log(kDiam);
  std::vector<Ball> balls;
  balls.reserve(n);
  for (int k = 0; k < n; ++k) {
    Ball b;
    do {
      b.cx = unit(rng);
    } while (b.cx <= 0.0);
    do {
      b.cy = unit(rng);
    } while (b.cy <= 0.0);
    b.radius = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    balls.push_back(b);
  }
  return balls;
}

}  // namespace

double ball_area(const Ball& ball) {
  check_ball(ball);
  return integrate_power_over_ball(ball, 0.0);
}

double ball_power_integral(const Ball& ball, double exponent) {
  check_ball(ball);
  return integrate_power_over_ball(ball, exponent);
}

double ap_product(const Ball& ball, double exponent, double p) {
  check_ball(ball);
  if (!(p >= 1.0)) throw std::invalid_argument("A_p needs p >= 1");
  const double area = integrate_power_over_ball(ball, 0.0);
  const double avg_w = integrate_power_over_ball(ball, exponent) / area;
  if (p == 1.0) {
    const double inf_w = power_essinf(ball, exponent);
    return inf_w > 0.0 ? avg_w / inf_w : std::numeric_limits<double>::infinity();
  }
  const double dual = -exponent / (p - 1.0);
  const double avg_dual = integrate_power_over_ball(ball, dual) / area;
  return avg_w * std::pow(avg_dual, p - 1.0);
}

ApEstimate muckenhoupt_ap(double weight_exponent, double p, int n_balls, std::uint64_t seed,
                          const BallSampling& sampling) {
  if (!(p >= 1.0)) throw std::invalid_argument("A_p needs p >= 1");
  ApEstimate est;
  est.p = p;
  for (const Ball& b : sample_balls(n_balls, seed, sampling)) {
    const double prod = ap_product(b, weight_exponent, p);
    ++est.samples;
    if (!std::isfinite(prod) || prod > sampling.overflow_threshold) {
      est.diverged = true;
      ++est.diverged_samples;
      continue;
    }
    est.constant = std::max(est.constant, prod);
  }
  return est;
}

double two_weight_ball_value(const Ball& ball, double q, double p, double w_exponent) {
  check_ball(ball);
  if (!(p >= 1.0 && q >= p && std::isfinite(q))) {
    throw std::invalid_argument("two-weight condition needs 1 <= p <= q < inf");
  }
  const double r = ball.radius;
  const double full_area = std::numbers::pi * r * r;
  const double v_mass = integrate_power_over_ball(ball, 0.0);
  double w_term;
  if (p == 1.0) {
    const double inf_w = power_essinf(ball, w_exponent);
    w_term = inf_w > 0.0 ? 1.0 / inf_w : std::numeric_limits<double>::infinity();
  } else {
    w_term = std::pow(integrate_power_over_ball(ball, -w_exponent / (p - 1.0)), (p - 1.0) / p);
  }
  return 2.0 * r / full_area * std::pow(v_mass, 1.0 / q) * w_term;
}

ConditionEstimate two_weight_condition(double q, double p, std::pair<double, double> weight_exponents,
                                       int n_balls, std::uint64_t seed,
                                       const BallSampling& sampling) {
  ConditionEstimate est;
  for (const Ball& b : sample_balls(n_balls, seed, sampling)) {
    ++est.samples;
    for (double e : {weight_exponents.first, weight_exponents.second}) {
      const double val = two_weight_ball_value(b, q, p, e);
      if (!std::isfinite(val) || val > sampling.overflow_threshold) {
        est.diverged = true;
      } else {
        est.value = std::max(est.value, val);
      }
    }
  }
  if (est.diverged) est.value = std::numeric_limits<double>::infinity();
  return est;
}

}  // namespace dsn
