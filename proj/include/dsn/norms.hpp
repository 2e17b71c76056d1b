#ifndef DSN_NORMS_HPP
#define DSN_NORMS_HPP

#include "dsn/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace dsn {

/// Weighted Sobolev norms of a nodal function. Derivatives are those of the
/// bilinear interpolant at cell centers, integrals use the midpoint cell rule.
struct NormReport {
  double l2 = 0.0;
  double dx_l2 = 0.0;           ///< ||u_x||
  double weighted_dy_l2 = 0.0;  ///< ||x^(a/2) u_y||
  std::optional<double> mixed_l2;  ///< ||u_xy||
  double w11 = 0.0;
  std::optional<double> v_norm;
  double dy_l2 = 0.0;  ///< unweighted ||u_y||, not part of any norm above

  bool operator==(const NormReport&) const = default;
};

NormReport norms_of(const GridFunction& u, bool include_mixed = false);
NormReport norms_of(const ClosedGridFunction& u, bool include_mixed = false);

/// Conventions for the norm of the control space L2(x^-a).
enum class WeightConvention {
  HalfExponent,  ///< (int x^-a f^2)^(1/2)
  FullExponent,  ///< (int x^-2a f^2)^(1/2) = ||x^-a f||
};

std::string to_string(WeightConvention c);
WeightConvention parse_weight_convention(const std::string& name);

struct WeightedNorm {
  double value = 0.0;
  WeightConvention convention = WeightConvention::HalfExponent;
  bool divergence_warning = false;
};

WeightedNorm l2_weighted_norm(const GridFunction& f,
                              WeightConvention convention = WeightConvention::HalfExponent);

/// (int |u|^q)^(1/q), q >= 1.
double lq_norm(const GridFunction& u, double q);

/// ||u||_{L^q} / ||u||_{W^{1,1}(x^a)} for q in [2, 4].
double embedding_ratio(const GridFunction& u, double q);

/// Euclidean ball B(center, radius) in the plane.
struct Ball {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

/// |B ∩ Ω| and the integrals of x^exponent over B ∩ Ω. Infinite when the
/// power is not integrable at x = 0 and the ball reaches x = 0.
double ball_area(const Ball& ball);
double ball_power_integral(const Ball& ball, double exponent);

/// Muckenhoupt A_p product of the weight x^exponent over one ball,
///   (avg w) (avg w^(-1/(p-1)))^(p-1)       for p > 1,
///   (avg w) / essinf w                       for p = 1.
double ap_product(const Ball& ball, double exponent, double p);

struct BallSampling {
  /// Radii are log-uniform in [min_radius, diam(Ω)].
  double min_radius = 1.0 / 128.0;
  /// Products above this are treated as divergent.
  double overflow_threshold = 1e12;
};

struct ApEstimate {
  double p = 2.0;
  double constant = 0.0;  ///< supremum of the sampled products (finite part)
  int samples = 0;
  bool diverged = false;
  int diverged_samples = 0;

  bool operator==(const ApEstimate&) const = default;
};

/// Samples balls with centers uniform in Ω and estimates the A_p constant of
/// x^weight_exponent as the sample supremum.
ApEstimate muckenhoupt_ap(double weight_exponent, double p, int n_balls, std::uint64_t seed,
                          const BallSampling& sampling = {});

/// Left-hand side of the two-weight condition
///   |B|^-1 diam(B) v(B∩Ω)^(1/q) [w^(-1/(p-1))(B∩Ω)]^((p-1)/p)
/// for v = 1 and w = x^w_exponent.
double two_weight_ball_value(const Ball& ball, double q, double p, double w_exponent);

struct ConditionEstimate {
  double value = 0.0;  ///< sample supremum; +inf when diverged
  bool diverged = false;
  int samples = 0;

  bool operator==(const ConditionEstimate&) const = default;
};

/// Sample supremum over balls and both weights x^e1, x^e2 (v = 1).
ConditionEstimate two_weight_condition(double q, double p, std::pair<double, double> weight_exponents,
                                       int n_balls, std::uint64_t seed,
                                       const BallSampling& sampling = {});

}  // namespace dsn

#endif  // DSN_NORMS_HPP
