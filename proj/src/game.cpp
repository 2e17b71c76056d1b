#include "dsn/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dsn {

void validate(const GameConfig& c) {
  (void)Grid(c.nx, c.ny, c.alpha);
  auto need = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  need(c.m1 >= 0.0 && c.m2 >= 0.0, "ball radii M1, M2 must be nonnegative");
  need(c.br_tol > 0.0, "br_tol must be positive");
  need(c.br_max_iters >= 1, "br_max_iters must be at least 1");
  need(c.inner_tol > 0.0, "inner_tol must be positive");
  need(c.inner_max_iters >= 1, "inner_max_iters must be at least 1");
  need(c.deviation_samples >= 1, "deviation_samples must be at least 1");
  need(c.cert_rel_tol >= 0.0, "cert_rel_tol must be nonnegative");
  need(c.solve_tol > 0.0, "solve_tol must be positive");
}

double control_inner(const GridFunction& f, const GridFunction& g) {
  return weighted_inner(f, g, -f.grid().alpha(), QuadratureRule::NodalLumped);
}

double control_norm(const GridFunction& f) { return std::sqrt(control_inner(f, f)); }

GridFunction project_ball(const GridFunction& f, double radius, const RegionMask& mask) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be nonnegative");
  GridFunction out = mask.apply(f);
  const double n = control_norm(out);
  // Points already within rounding of the sphere are left alone so that the
  // projection is exactly idempotent.
  if (n > radius * (1.0 + 1e-13)) out *= radius / n;
  return out;
}

// Game

namespace {

void check_follower(int i) {
  if (i != 1 && i != 2) throw std::invalid_argument("follower index must be 1 or 2");
}

}  // namespace

Game::Game(const GameConfig& cfg)
    : cfg_((validate(cfg), cfg)),
      grid_(cfg.nx, cfg.ny, cfg.alpha),
      solver_(assemble(grid_, YScheme::Upwind)),
      omega_(to_mask(grid_, cfg.omega)),
      omega1_(to_mask(grid_, cfg.omega1)),
      omega2_(to_mask(grid_, cfg.omega2)),
      obs1_(to_mask(grid_, cfg.g1)),
      obs2_(to_mask(grid_, cfg.g2)),
      leader_(sample(grid_, cfg.leader)),
      leader_source_(omega_.apply(leader_)),
      yd1_(sample(grid_, cfg.yd1)),
      yd2_(sample(grid_, cfg.yd2)) {
  for (const RegionMask* m : {&omega_, &omega1_, &omega2_, &obs1_, &obs2_}) {
    if (m->empty()) throw std::invalid_argument("game region contains no grid nodes");
  }
}

const RegionMask& Game::control_mask(int i) const {
  check_follower(i);
  return i == 1 ? omega1_ : omega2_;
}

const RegionMask& Game::observation_mask(int i) const {
  check_follower(i);
  return i == 1 ? obs1_ : obs2_;
}

const GridFunction& Game::target(int i) const {
  check_follower(i);
  return i == 1 ? yd1_ : yd2_;
}

double Game::radius(int i) const {
  check_follower(i);
  return i == 1 ? cfg_.m1 : cfg_.m2;
}

GridFunction Game::state_solve(const GridFunction& g, const GridFunction& f1,
                               const GridFunction& f2) const {
  GridFunction rhs = omega_.apply(g);
  rhs += omega1_.apply(f1);
  rhs += omega2_.apply(f2);
  if (!rhs.is_finite()) throw std::invalid_argument("controls must be finite");
  return solver_.solve(rhs, cfg_.solve_tol).first;
}

GridFunction Game::state(const GridFunction& f1, const GridFunction& f2) const {
  return state_solve(leader_, f1, f2);
}

double Game::tracking(int i, const GridFunction& y) const {
  GridFunction r = y - target(i);
  observation_mask(i).apply_in_place(r.values());
  return grid_.hx() * grid_.hy() * r.values().squaredNorm();
}

Game::Evaluation Game::evaluate(int i, const GridFunction& f1, const GridFunction& f2) const {
  GridFunction y = state(f1, f2);
  const GridFunction own = control_mask(i).apply(i == 1 ? f1 : f2);
  const double j = tracking(i, y) + control_inner(own, own);
  return {std::move(y), j};
}

double Game::cost(int i, const GridFunction& f1, const GridFunction& f2) const {
  return evaluate(i, f1, f2).cost;
}

GridFunction Game::gradient_at(int i, const GridFunction& own, const GridFunction& y) const {
  GridFunction src = y - target(i);
  observation_mask(i).apply_in_place(src.values());
  src *= 2.0;
  const GridFunction p = solver_.solve_transpose(src, cfg_.solve_tol).first;
  Eigen::VectorXd g(grid_.size());
  for (int j = 0; j < grid_.ny(); ++j) {
    for (int k = 0; k < grid_.nx(); ++k) {
      const int idx = grid_.index(k, j);
      g[idx] = std::pow(grid_.x(k), grid_.alpha()) * p.values()[idx] + 2.0 * own.values()[idx];
    }
  }
  control_mask(i).apply_in_place(g);
  return GridFunction(grid_, std::move(g));
}

GridFunction Game::gradient(int i, const GridFunction& f1, const GridFunction& f2) const {
  const GridFunction y = state(f1, f2);
  return gradient_at(i, control_mask(i).apply(i == 1 ? f1 : f2), y);
}

GridFunction Game::project(int i, const GridFunction& f) const {
  return project_ball(f, radius(i), control_mask(i));
}

BestResponse Game::best_response(int i, const GridFunction& f_other,
                                 const GridFunction* start) const {
  check_follower(i);
  const double armijo = 1e-4;
  auto pair = [&](const GridFunction& own) -> std::pair<const GridFunction&, const GridFunction&> {
    return i == 1 ? std::pair<const GridFunction&, const GridFunction&>{own, f_other}
                  : std::pair<const GridFunction&, const GridFunction&>{f_other, own};
  };

  BestResponse out{project(i, start ? *start : zero())};
  GridFunction& f = out.control;
  auto [a0, b0] = pair(f);
  Evaluation ev = evaluate(i, a0, b0);
  GridFunction grad = gradient_at(i, f, ev.state);
  out.costs.push_back(ev.cost);

  double step = 0.5;
  int flat = 0;
  GridFunction prev_f = f;
  GridFunction prev_grad = grad;
  for (int it = 0;; ++it) {
    const double pg = control_norm(f - project(i, f - grad));
    out.projected_gradient_norm = pg;
    out.iterations = it;
    if (pg <= cfg_.inner_tol) return out;
    if (it >= cfg_.inner_max_iters) {
      throw BestResponseError("best response for follower " + std::to_string(i) +
                                  " did not converge within " +
                                  std::to_string(cfg_.inner_max_iters) + " iterations",
                              f, pg);
    }

    // Barzilai-Borwein trial step, then backtrack on the projection arc.
    if (it > 0) {
      const GridFunction s = f - prev_f;
      const GridFunction yv = grad - prev_grad;
      const double sy = control_inner(s, yv);
      if (sy > 0.0) step = std::clamp(control_inner(s, s) / sy, 1e-6, 1e6);
    }
    GridFunction cand = f;
    Evaluation cand_ev = ev;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      cand = project(i, f - step * grad);
      const GridFunction d = cand - f;
      auto [a, b] = pair(cand);
      cand_ev = evaluate(i, a, b);
      if (cand_ev.cost <= ev.cost + armijo * control_inner(grad, d)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease is representable at this scale; the iterate is optimal to
      // rounding.
      return out;
    }
    // Decreases at the rounding level of J mean the gradient is noise; on fine
    // grids this floor sits above an absolute inner_tol.
    const double gain = ev.cost - cand_ev.cost;
    flat = gain <= 8 * std::numeric_limits<double>::epsilon() * std::abs(ev.cost) ? flat + 1 : 0;
    prev_f = f;
    prev_grad = grad;
    f = cand;
    ev = std::move(cand_ev);
    grad = gradient_at(i, f, ev.state);
    out.costs.push_back(ev.cost);
    if (flat >= 5) {
      out.iterations = it + 1;
      out.projected_gradient_norm = control_norm(f - project(i, f - grad));
      return out;
    }
  }
}

NashResult Game::nash_solve() const {
  NashResult r{zero(), zero(), zero()};
  GridFunction f1 = zero();
  GridFunction f2 = zero();
  for (int k = 0; k < cfg_.br_max_iters; ++k) {
    GridFunction n1 = best_response(1, f2, &f1).control;
    GridFunction n2 = best_response(2, n1, &f2).control;
    const double d1 = control_norm(n1 - f1);
    const double d2 = control_norm(n2 - f2);
    f1 = std::move(n1);
    f2 = std::move(n2);
    r.br_residuals.push_back(std::sqrt(d1 * d1 + d2 * d2));
    r.j1_history.push_back(cost(1, f1, f2));
    r.j2_history.push_back(cost(2, f1, f2));
    r.br_iterations = k + 1;
    if (r.br_residuals.back() <= cfg_.br_tol) {
      r.converged = true;
      break;
    }
  }
  r.state = state(f1, f2);
  r.j1 = cost(1, f1, f2);
  r.j2 = cost(2, f1, f2);
  r.fixed_point_residual1 = control_norm(best_response(1, f2, &f1).control - f1);
  r.fixed_point_residual2 = control_norm(best_response(2, f1, &f2).control - f2);
  r.certification = certify(f1, f2);
  r.certified = r.certification.certified;
  r.certification_margin = r.certification.margin;
  r.f1_star = std::move(f1);
  r.f2_star = std::move(f2);
  return r;
}

Certification Game::certify(const GridFunction& f1, const GridFunction& f2,
                            const std::vector<GridFunction>& extra1,
                            const std::vector<GridFunction>& extra2) const {
  Certification c;
  c.deviations = cfg_.deviation_samples;
  double margins[2] = {0.0, 0.0};
  double tols[2] = {0.0, 0.0};
  bool ok = true;

  for (int i = 1; i <= 2; ++i) {
    const GridFunction& own = i == 1 ? f1 : f2;
    const GridFunction& other = i == 1 ? f2 : f1;
    const RegionMask& mask = control_mask(i);
    const double radius_i = radius(i);
    const double j_star = cost(i, f1, f2);
    const double tol = cfg_.cert_rel_tol * (1.0 + j_star);

    std::seed_seq seq{static_cast<std::uint64_t>(cfg_.seed), static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto direction = [&]() {
      Eigen::VectorXd v(grid_.size());
      for (int k = 0; k < grid_.size(); ++k) v[k] = gauss(rng);
      GridFunction d = mask.apply(GridFunction(grid_, std::move(v)));
      const double n = control_norm(d);
      if (n > 0.0) d *= 1.0 / n;
      return d;
    };

    std::vector<GridFunction> devs;
    devs.push_back(zero());
    for (int k = 1; k < cfg_.deviation_samples; ++k) {
      const GridFunction d = direction();
      switch (k % 4) {
        case 0: devs.push_back(project(i, radius_i * d)); break;
        case 1: devs.push_back(project(i, (radius_i * unit(rng)) * d)); break;
        default: {
          const double scale = radius_i * std::pow(10.0, -6.0 * unit(rng));
          devs.push_back(project(i, own + scale * d));
        }
      }
    }
    for (const GridFunction& e : (i == 1 ? extra1 : extra2)) devs.push_back(project(i, e));

    double margin = std::numeric_limits<double>::infinity();
    for (const GridFunction& v : devs) {
      const double jv = i == 1 ? cost(1, v, other) : cost(2, other, v);
      margin = std::min(margin, jv - j_star);
    }
    margins[i - 1] = margin;
    tols[i - 1] = tol;
    if (margin < -tol) ok = false;
  }
  c.margin1 = margins[0];
  c.margin2 = margins[1];
  c.tol1 = tols[0];
  c.tol2 = tols[1];
  c.margin = std::min(margins[0], margins[1]);
  c.certified = ok;
  return c;
}

}  // namespace dsn
