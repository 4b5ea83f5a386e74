#include "hjb/dp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "hjb/parallel.hpp"

namespace hjb {

void GridSpec::validate(Horizon horizon) const {
  if (!(x_lo < x_hi)) throw std::invalid_argument("GridSpec: x_lo must be < x_hi");
  if (t_nodes < 2 || x_nodes < 2) throw std::invalid_argument("GridSpec: need >= 2 nodes");
  if (v_nodes < 3 || v_nodes % 2 == 0)
    throw std::invalid_argument("GridSpec: v_nodes must be odd and >= 3 (v = 0 is a node)");
  if (!(stagger >= 0.0 && stagger < 1.0))
    throw std::invalid_argument("GridSpec: stagger must lie in [0,1)");
  if (!(horizon.T > 0.0)) throw std::invalid_argument("GridSpec: horizon T must be > 0");
  // No x-node may sit exactly on the diagonal: at such a node every v != 0
  // carries infinite cost and the discrete trajectory would be trapped.
  for (int j = 0; j < t_nodes; ++j) {
    const double t = t_node(j, horizon);
    if (t < x_node(0) || t > x_node(x_nodes - 1)) continue;
    const int i = static_cast<int>(std::floor((t - x_node(0)) / dx()));
    for (int k = std::max(0, i - 1); k <= std::min(x_nodes - 1, i + 1); ++k) {
      if (x_node(k) == t)
        throw std::invalid_argument("GridSpec: x-node collides with the diagonal at t = " +
                                    std::to_string(t));
    }
  }
}

double ValueField::sample(double t, double x) const {
  const double dt = grid.dt(horizon);
  int j = static_cast<int>(std::floor(t / dt));
  j = std::clamp(j, 0, grid.t_nodes - 2);
  const double a = std::clamp((t - grid.t_node(j, horizon)) / dt, 0.0, 1.0);
  const double x0 = grid.x_node(0);
  int i = static_cast<int>(std::floor((x - x0) / grid.dx()));
  i = std::clamp(i, 0, grid.x_nodes - 2);
  const double b = std::clamp((x - grid.x_node(i)) / grid.dx(), 0.0, 1.0);
  const double lower = (1.0 - b) * at(j, i) + b * at(j, i + 1);
  const double upper = (1.0 - b) * at(j + 1, i) + b * at(j + 1, i + 1);
  return (1.0 - a) * lower + a * upper;
}

namespace {

// Antiderivative of 1/phi(|u|) in the signed gap u, odd and continuous:
// Original  Phi(u) = sign(u) (1 - exp(-2 sqrt(|u|)))
// Approx(n) Phi(u) = sign(u) Psi_n(|u|) with the plateau part linear.
double antiderivative_original(double u) {
  const double w = std::abs(u);
  const double val = 1.0 - std::exp(-2.0 * std::sqrt(w));
  return u >= 0.0 ? val : -val;
}

double antiderivative_approx(int n, double u) {
  const double w = std::abs(u);
  const double rn = std::sqrt(static_cast<double>(n));
  const double cn = std::exp(-2.0 / rn);
  double val;
  if (w <= 1.0 / n) {
    val = w * rn * cn;  // integrand constant sqrt(n) e^{-2/sqrt(n)} on the plateau
  } else {
    val = (1.0 + 1.0 / rn) * cn - std::exp(-2.0 * std::sqrt(w));
  }
  return u >= 0.0 ? val : -val;
}

constexpr double kGaussNode[4] = {-0.8611363115940526, -0.3399810435848563,
                                  0.3399810435848563, 0.8611363115940526};
constexpr double kGaussWeight[4] = {0.3478548451374538, 0.6521451548625461,
                                    0.6521451548625461, 0.3478548451374538};

}  // namespace

double step_run_cost(double t, double x, double v, double dt, const ModelVariant& variant) {
  if (v == 0.0) return 0.0;
  const double a = x - t;                  // signed gap at the step start
  const double b = a + (v - 1.0) * dt;     // signed gap at the step end
  switch (variant.kind()) {
    case ModelVariant::Kind::Original:
      if (std::abs(v - 1.0) < 1e-12)
        return dt * std::abs(v) / (2.0 * eval_phi({t, x}, variant));
      return std::abs(v) / (2.0 * std::abs(v - 1.0)) *
             std::abs(antiderivative_original(b) - antiderivative_original(a));
    case ModelVariant::Kind::Approx:
      if (std::abs(v - 1.0) < 1e-12)
        return dt * std::abs(v) / (2.0 * eval_phi({t, x}, variant));
      return std::abs(v) / (2.0 * std::abs(v - 1.0)) *
             std::abs(antiderivative_approx(variant.approx_n(), b) -
                      antiderivative_approx(variant.approx_n(), a));
    case ModelVariant::Kind::Hat: {
      // No elementary antiderivative; fixed Gauss-Legendre panel. A step whose
      // path crosses the diagonal has infinite true cost for this variant and
      // the panel acts as a large finite barrier.
      double acc = 0.0;
      for (int q = 0; q < 4; ++q) {
        const double s = 0.5 * dt * (1.0 + kGaussNode[q]);
        const double gap = std::abs(a + (v - 1.0) * s);
        acc += kGaussWeight[q] * std::abs(v) / (2.0 * eval_phi({t, t + gap}, variant));
      }
      return 0.5 * dt * acc;
    }
  }
  return 0.0;
}

ValueField solve_dp(const GridSpec& grid, const ModelVariant& variant, Horizon horizon,
                    std::optional<Interval> clamp_guard, int workers) {
  grid.validate(horizon);
  const int nx = grid.x_nodes;
  const int nt = grid.t_nodes;
  const double dt = grid.dt(horizon);
  const double dx = grid.dx();

  ValueField field;
  field.grid = grid;
  field.horizon = horizon;
  field.variant = variant;
  field.values.assign(static_cast<std::size_t>(nt) * nx, 0.0);

  for (int i = 0; i < nx; ++i)
    field.values[static_cast<std::size_t>(nt - 1) * nx + i] =
        eval_terminal_g(grid.x_node(i), horizon);

  std::atomic<long> guarded_clamps{0};

  std::vector<double> shift_frac(grid.v_nodes);
  std::vector<int> shift_int(grid.v_nodes);
  for (int k = 0; k < grid.v_nodes; ++k) {
    const double s = grid.v_node(k) * dt / dx;
    shift_int[k] = static_cast<int>(std::floor(s));
    shift_frac[k] = s - shift_int[k];
    if (shift_frac[k] < 1e-15) shift_frac[k] = 0.0;  // exact whole-cell shifts stay exact
  }

  for (int j = nt - 2; j >= 0; --j) {
    const double tj = grid.t_node(j, horizon);
    const double* next = field.values.data() + static_cast<std::size_t>(j + 1) * nx;
    double* cur = field.values.data() + static_cast<std::size_t>(j) * nx;
    const bool guard_row = clamp_guard.has_value();
    const double cone_lo = guard_row ? clamp_guard->lo - 2.0 * tj : 0.0;
    const double cone_hi = guard_row ? clamp_guard->hi + 2.0 * tj : 0.0;

    parallel_for(static_cast<std::size_t>(nx), workers, [&](std::size_t ii) {
      const int i = static_cast<int>(ii);
      const double xi = grid.x_node(i);
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < grid.v_nodes; ++k) {
        const double v = grid.v_node(k);
        int i0 = i + shift_int[k];
        int i1 = i0 + 1;
        const double frac = shift_frac[k];
        const bool clamped = i0 < 0 || (frac == 0.0 ? i0 > nx - 1 : i1 > nx - 1);
        if (clamped) {
          if (guard_row && xi >= cone_lo && xi <= cone_hi) guarded_clamps.fetch_add(1);
          i0 = std::clamp(i0, 0, nx - 1);
          i1 = std::clamp(i1, 0, nx - 1);
        }
        const double interp = frac == 0.0 ? next[i0] : (1.0 - frac) * next[i0] + frac * next[i1];
        const double cost = step_run_cost(tj, xi, v, dt, variant) + interp;
        if (cost < best) best = cost;
      }
      cur[i] = best;
    });
  }

  if (clamp_guard && guarded_clamps.load() > 0)
    throw std::runtime_error("solve_dp: " + std::to_string(guarded_clamps.load()) +
                             " clamped queries inside the guarded dependency cone");
  return field;
}

namespace {

// Adaptive Simpson on a smooth integrand.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double tol, int depth, long& budget) {
  if (--budget < 0) throw std::runtime_error("quadrature: refinement budget exhausted");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("quadrature: max depth reached");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, fm, flm, 0.5 * tol, depth - 1, budget) +
         adaptive_simpson(f, m, b, fm, fb, frm, 0.5 * tol, depth - 1, budget);
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b, double tol,
                        long& budget) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fb, fm, tol, 48, budget);
}

// Integral of L(s, x(s), v) over one linear segment [ta, tb], x(ta) = xa.
// Splits at the diagonal crossing and substitutes theta = sqrt(|s - s*|)
// there, turning the 1/sqrt singularity of the Original variant into a
// smooth integrand.
double segment_cost(double ta, double tb, double xa, double v, const ModelVariant& variant,
                    Horizon horizon, double tol, long& budget) {
  if (tb <= ta || v == 0.0) return 0.0;
  auto rate = [&](double s) {
    const double x = xa + v * (s - ta);
    const ExtendedReal L = eval_lagrangian({s, x}, v, variant, horizon);
    return L.is_finite() ? L.value() : std::numeric_limits<double>::infinity();
  };

  // Crossing time of x(s) = s; endpoint crossings count (trajectories often
  // start on or touch the diagonal at a sample time).
  double cross = std::numeric_limits<double>::quiet_NaN();
  if (v != 1.0) {
    const double s_star = (xa - v * ta) / (1.0 - v);
    const double margin = 1e-12 * (std::abs(ta) + std::abs(tb) + 1.0);
    if (s_star > ta - margin && s_star < tb + margin)
      cross = std::clamp(s_star, ta, tb);
  }
  if (std::isnan(cross)) return integrate_smooth(rate, ta, tb, tol, budget);

  // theta-substituted halves: integrand 2 theta L(s* -+ theta^2), with the
  // sample point rebuilt from the analytic diagonal gap |1-v| theta^2 so that
  // no cancellation occurs near the crossing. At theta = 0 the singularity is
  // removable for the sqrt-type phi (limit |v|/sqrt|1-v|), vanishes for the
  // truncated family, and is genuinely divergent for the hat variant.
  const double theta_limit = [&]() -> double {
    switch (variant.kind()) {
      case ModelVariant::Kind::Original:
        return std::abs(v) / std::sqrt(std::abs(1.0 - v));
      case ModelVariant::Kind::Approx: return 0.0;
      case ModelVariant::Kind::Hat: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }();
  // L depends on (t,x) only through the diagonal gap, which along the path is
  // exactly |1-v| theta^2; evaluating at {0, gap} avoids the cancellation that
  // snaps near-crossing samples to ulp-stepped gaps.
  auto half = [&](double theta, double sgn) {
    (void)sgn;
    if (theta == 0.0) return theta_limit;
    const double gap = std::abs(1.0 - v) * theta * theta;
    const ExtendedReal L = eval_lagrangian({0.0, gap}, v, variant, horizon);
    if (!L.is_finite()) return theta_limit;  // gap underflowed to the diagonal
    return 2.0 * theta * L.value();
  };
  auto left = [&](double theta) { return half(theta, -1.0); };
  auto right = [&](double theta) { return half(theta, 1.0); };
  double acc = 0.0;
  if (cross > ta) acc += integrate_smooth(left, 0.0, std::sqrt(cross - ta), 0.5 * tol, budget);
  if (tb > cross) acc += integrate_smooth(right, 0.0, std::sqrt(tb - cross), 0.5 * tol, budget);
  return acc;
}

}  // namespace

double evaluate_bolza_objective(const Trajectory& traj, const ModelVariant& variant,
                                Horizon horizon) {
  if (traj.samples.size() < 2)
    throw std::invalid_argument("evaluate_bolza_objective: trajectory needs >= 2 samples");
  const auto& last = traj.samples.back();
  if (std::abs(last.t - horizon.T) > 1e-9)
    throw std::invalid_argument("evaluate_bolza_objective: trajectory must end at t = T");

  if (traj.kind == Trajectory::Kind::Constant) return eval_terminal_g(traj.x0, horizon);

  if (traj.kind == Trajectory::Kind::FastRay &&
      variant.kind() != ModelVariant::Kind::Hat) {
    // v = 2 throughout: signed gap runs linearly from x0 - t0 to x0 - t0 + (T - t0).
    const double run =
        step_run_cost(traj.t0, traj.x0, 2.0, horizon.T - traj.t0, variant);
    const double xT = 2.0 * (horizon.T - traj.t0) + traj.x0;
    return eval_terminal_g(xT, horizon) + run;
  }

  // Custom (and Hat FastRay): adaptive quadrature segment by segment.
  double acc = 0.0;
  long budget = 2'000'000;
  const double tol_total = 1e-8 * std::max(1.0, std::abs(eval_terminal_g(last.x, horizon)));
  for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
    const auto& s0 = traj.samples[k];
    const auto& s1 = traj.samples[k + 1];
    if (!(s1.t > s0.t)) throw std::invalid_argument("evaluate_bolza_objective: time not increasing");
    double v = (s1.x - s0.x) / (s1.t - s0.t);
    if (std::abs(v) > 2.0 + 1e-6)
      throw std::invalid_argument("evaluate_bolza_objective: speed bound |v| <= 2 violated");
    // slopes recomputed from samples carry rounding noise; project onto the
    // admissible control set so dom L is not missed by an ulp
    v = std::clamp(v, -2.0, 2.0);
    acc += segment_cost(s0.t, s1.t, s0.x, v, variant, horizon,
                        tol_total / static_cast<double>(traj.samples.size()), budget);
  }
  return eval_terminal_g(last.x, horizon) + acc;
}

Trajectory extract_trajectory(const ValueField& field, double t0, double x0) {
  const GridSpec& grid = field.grid;
  const Horizon horizon = field.horizon;
  const double dt = grid.dt(horizon);
  int j0 = static_cast<int>(std::lround(t0 / dt));
  j0 = std::clamp(j0, 0, grid.t_nodes - 1);

  Trajectory traj;
  traj.kind = Trajectory::Kind::Custom;
  traj.t0 = grid.t_node(j0, horizon);
  traj.x0 = x0;

  double x = x0;
  for (int j = j0; j < grid.t_nodes - 1; ++j) {
    const double tj = grid.t_node(j, horizon);
    double best = std::numeric_limits<double>::infinity();
    double best_v = 0.0;
    for (int k = 0; k < grid.v_nodes; ++k) {
      const double v = grid.v_node(k);
      const double cost =
          step_run_cost(tj, x, v, dt, field.variant) + field.sample(tj + dt, x + v * dt);
      const double tie = 1e-12 * (1.0 + std::abs(best));
      if (cost < best - tie) {
        best = cost;
        best_v = v;
      } else if (cost <= best + tie) {
        // tie: prefer larger |v|, then positive v
        if (std::abs(v) > std::abs(best_v) + 1e-15 ||
            (std::abs(std::abs(v) - std::abs(best_v)) <= 1e-15 && v > best_v)) {
          best = std::min(best, cost);
          best_v = v;
        }
      }
    }
    traj.samples.push_back({tj, x, best_v});
    x += best_v * dt;
  }
  traj.samples.push_back({horizon.T, x, 0.0});
  return traj;
}

double ReferenceSolution::operator()(SpacetimePoint pt, Horizon horizon) const {
  switch (kind) {
    case Kind::U: return eval_solution_U(pt, horizon);
    case Kind::V: return eval_solution_V(pt, horizon);
    case Kind::Vn: return eval_Vn(n, pt, horizon);
  }
  return 0.0;
}

FieldError field_error_vs(const ValueField& field, const ReferenceSolution& ref,
                          Interval region) {
  const GridSpec& grid = field.grid;
  FieldError err;
  double total = 0.0;
  std::size_t count = 0;
  for (int j = 0; j < grid.t_nodes; ++j) {
    const double t = grid.t_node(j, field.horizon);
    const double jump = 2.0 * t - field.horizon.T;
    for (int i = 0; i < grid.x_nodes; ++i) {
      const double x = grid.x_node(i);
      if (x < region.lo || x > region.hi) continue;
      if (std::abs(x - jump) <= 2.0 * grid.dx()) continue;
      const double e = std::abs(field.at(j, i) - ref({t, x}, field.horizon));
      err.sup = std::max(err.sup, e);
      total += e;
      ++count;
    }
  }
  err.mean = count ? total / static_cast<double>(count) : 0.0;
  return err;
}

std::vector<LevelError> convergence_study(std::span<const GridSpec> grids,
                                          const ModelVariant& variant,
                                          const ReferenceSolution& ref, Horizon horizon,
                                          Interval region, int workers) {
  std::vector<LevelError> table;
  table.reserve(grids.size());
  int level = 1;
  for (const GridSpec& g : grids) {
    const ValueField field = solve_dp(g, variant, horizon, region, workers);
    const FieldError err = field_error_vs(field, ref, region);
    table.push_back({level++, err.sup, err.mean});
  }
  return table;
}

}  // namespace hjb
