#pragma once

#include <optional>
#include <vector>

#include "hjb/extended_real.hpp"
#include "hjb/types.hpp"

namespace hjb {

// sigma(z) = sqrt(z) and its Lipschitz truncations sigma_n (constant 1/sqrt(n)
// on [0, 1/n)).
double sigma(double z);
double sigma_n(int n, double z);

// phi(t,x) = s(|t-x|) exp(2 s(|t-x|)) with s = sigma (Original), identity
// (Hat) or sigma_n (Approx). Strictly positive except at t=x for
// Original/Hat; bounded below by (1/sqrt(n)) e^{2/sqrt(n)} for Approx(n).
double eval_phi(SpacetimePoint pt, const ModelVariant& variant);

// H(t,x,p) = max(0, 2|p| - 1/phi) off the diagonal, 0 on it (Original/Hat);
// for Approx(n) the same formula applies everywhere. Always in [0, 2|p|].
double eval_hamiltonian(SpacetimePoint pt, double p, const ModelVariant& variant);

// L(t,x,v): |v|/(2 phi) for |v| <= 2, +inf for |v| > 2; on the diagonal
// (Original/Hat) only v=0 is admissible, with L=0. Times outside [0,T] are
// clamped before evaluation (the extension L(t,.,.) := L(0,.,.) for t<0 and
// := L(T,.,.) for t>T).
ExtendedReal eval_lagrangian(SpacetimePoint pt, double v, const ModelVariant& variant,
                             Horizon horizon = {});

// Terminal cost g: exp(-2 sqrt(x-T)) - 1 for x >= T, 1 for x < T.
double eval_terminal_g(double x, Horizon horizon = {});

// First solution U: exp(-2 sqrt(x-t)) - 1 for x >= t, 1 for x < t.
double eval_solution_U(SpacetimePoint pt, Horizon horizon = {});

// Second solution V: U above the diagonal, 1 - exp(-2 sqrt(t-x)) on the strip
// 2t-T <= x < t, 1 below the strip. V <= U everywhere.
double eval_solution_V(SpacetimePoint pt, Horizon horizon = {});

// Value function of the n-th approximating problem, dispatched over the five
// closed-form cases for x >= 2t-T plus the constant case below. Rejects n < 1.
double eval_Vn(int n, SpacetimePoint pt, Horizon horizon = {});

// Max spread between the case formulas applicable at pt (the case conditions
// are non-strict and overlap on their boundaries). Zero away from boundaries.
double vn_case_spread(int n, SpacetimePoint pt, Horizon horizon = {});

enum class Solution { U, V };

// Unique gradient of U/V on their regions of differentiability:
//   U: (psi, -psi) for x > t, (0,0) for x < t;
//   V: additionally (psi, -psi) on the open strip 2t-T < x < t.
// Returns nullopt on the kink sets x=t (both) and x=2t-T (V). Interior times
// only; rejects t <= 0 and t >= T.
std::optional<Costate> analytic_gradient(Solution which, SpacetimePoint pt,
                                         Horizon horizon = {});

// Gradient of V_n on A = {x > 2t-T} and B = {x < 2t-T}; nullopt on the jump
// curve x = 2t-T where the subdifferential is empty. Valid for t in [0,T]
// (at t=0/T this is the one-sided extreme costate).
std::optional<Costate> vn_gradient(int n, SpacetimePoint pt, Horizon horizon = {});

struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;  // control applied on [t, next t)
};

struct Trajectory {
  enum class Kind { FastRay, Constant, Custom };
  Kind kind = Kind::Custom;
  double t0 = 0.0;
  double x0 = 0.0;
  std::vector<TrajectorySample> samples;
};

// The optimal trajectory of the Bolza problem: x(t) = 2(t-t0)+x0 for
// x0 >= 2t0-T (FastRay), x(t) = x0 otherwise (Constant). Rejects t0 >= T.
Trajectory optimal_trajectory(double t0, double x0, Horizon horizon = {},
                              int sample_count = 101);

}  // namespace hjb
