#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hjb/model.hpp"
#include "hjb/types.hpp"

namespace hjb {

// Rectangular (t,x) discretization plus the control grid on [-2,2]. The
// defaults put 2*dt on the x-lattice at every refinement level (dx == 2*dt),
// so v = +-2 queries shift whole cells and the lsc jump along x = 2t-T stays
// sharp; stagger 0.25 keeps every x-node off the diagonal t = x.
struct GridSpec {
  int t_nodes = 201;
  double x_lo = -5.0;
  double x_hi = 7.0;
  int x_nodes = 1201;
  int v_nodes = 41;      // odd, so v = 0 is a node
  double stagger = 0.25; // x-grid offset in units of dx, in [0,1)

  double dx() const { return (x_hi - x_lo) / (x_nodes - 1); }
  double dt(Horizon horizon) const { return horizon.T / (t_nodes - 1); }
  double x_node(int i) const { return x_lo + (i + stagger) * dx(); }
  double t_node(int j, Horizon horizon) const {
    return horizon.T * j / (t_nodes - 1);
  }
  double v_node(int k) const { return (-2.0 * (v_nodes - 1 - k) + 2.0 * k) / (v_nodes - 1); }

  void validate(Horizon horizon = {}) const;  // throws on bad spec
};

struct ValueField {
  GridSpec grid;
  Horizon horizon;
  ModelVariant variant = ModelVariant::original();
  std::vector<double> values;  // t-major: values[j * x_nodes + i]

  double at(int j, int i) const { return values[static_cast<std::size_t>(j) * grid.x_nodes + i]; }
  // Bilinear interpolation, clamped to the grid.
  double sample(double t, double x) const;
};

// Backward semi-Lagrangian solve of the Bolza value function. One step:
//   W(t_j, x_i) = min_v [ (exact integral of L along the step) +
//                         Interp(W(t_{j+1}, .), x_i + v dt) ]
// with W(T,.) = g and linear interpolation clamped to the grid. When
// clamp_guard is set, clamped queries issued from nodes inside the dependency
// cone of the guarded region are counted and must be zero (throws otherwise).
ValueField solve_dp(const GridSpec& grid, const ModelVariant& variant, Horizon horizon = {},
                    std::optional<Interval> clamp_guard = Interval{-1.0, 2.0},
                    int workers = 0);

// Exact integral of s -> L(s, x + v (s - t), v) over [t, t + dt] (closed form
// for Original/Approx, Gauss-Legendre for Hat).
double step_run_cost(double t, double x, double v, double dt, const ModelVariant& variant);

// g(x(T)) + integral of L along the trajectory. FastRay and Constant use the
// closed-form antiderivative route; Custom uses adaptive Simpson quadrature
// with singularity splitting at diagonal crossings (relative tolerance 1e-8,
// throws if the refinement budget is exhausted).
double evaluate_bolza_objective(const Trajectory& traj, const ModelVariant& variant,
                                Horizon horizon = {});

// Greedy forward rollout of the DP argmin from (t0, x0); ties prefer larger
// |v|, then positive v.
Trajectory extract_trajectory(const ValueField& field, double t0, double x0);

struct ReferenceSolution {
  enum class Kind { U, V, Vn };
  Kind kind = Kind::V;
  int n = 0;

  static ReferenceSolution u() { return {Kind::U, 0}; }
  static ReferenceSolution v() { return {Kind::V, 0}; }
  static ReferenceSolution vn(int n) { return {Kind::Vn, n}; }

  double operator()(SpacetimePoint pt, Horizon horizon) const;
};

struct FieldError {
  double sup = 0.0;
  double mean = 0.0;
};

// Sup/mean absolute node error against the reference over region x-range and
// all time slices, excluding a band of width 2*dx around the jump curve
// x = 2t - T.
FieldError field_error_vs(const ValueField& field, const ReferenceSolution& ref,
                          Interval region);

struct LevelError {
  int level = 0;
  double sup_err = 0.0;
  double mean_err = 0.0;
};

std::vector<LevelError> convergence_study(std::span<const GridSpec> grids,
                                          const ModelVariant& variant,
                                          const ReferenceSolution& ref, Horizon horizon = {},
                                          Interval region = Interval{-1.0, 2.0},
                                          int workers = 0);

}  // namespace hjb
