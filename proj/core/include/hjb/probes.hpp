#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hjb/conjugate.hpp"
#include "hjb/model.hpp"
#include "hjb/types.hpp"

namespace hjb {

// Box around (t0, x0, p0); t is clipped to [0, T] when sampling.
struct BoxSpec {
  double t0 = 0.0, x0 = 0.0, p0 = 0.0;
  double r = 0.0;
};

// Estimated local Lipschitz constant of H on the box: max difference quotient
// |H(z1)-H(z2)| / (|t1-t2|+|x1-x2|+|p1-p2|) over sampled pairs. Exactly 0 on
// boxes where H vanishes identically (diagonal centers with radius up to
// 1/[2 e^4 (1+2|p0|)^2]).
double llc_constant(const BoxSpec& box, int samples, const ModelVariant& variant,
                    Horizon horizon = {}, std::uint64_t seed = 8675309);

struct RatioScan {
  std::vector<double> parameters;  // decreasing h or u ladder
  std::vector<double> ratios;
  double fitted_exponent = 0.0;  // log-log slope over the last 5 positive points
  double r_squared = 0.0;
  bool diverges = false;
  double sup_ratio = 0.0;
};

// Probes the (1+|p|)-weighted Lipschitz condition at a diagonal anchor with
// the adversarial slopes p_h = 1/phi(t0+h, x0). Original/Hat: ratios blow up
// like 1/h; Approx(n): bounded. Rejects off-diagonal anchors and h <= 0.
RatioScan slc_ratio_scan(SpacetimePoint anchor, std::span<const double> h_values,
                         const ModelVariant& variant, Horizon horizon = {});

// Variants with closed-form Lagrangian subgradients used by the condition-(6)
// and modulus probes.
enum class TightVariant { Original, Hat };

// Loewen-Rockafellar bound probe along t-x = u with v = 2*phi: ratio of
// |(w1,w2)| to (1+|v|+L)(1+|p|) at k=1. Original: grows like u^{-1/2};
// Hat: bounded (limit sqrt(2)). Rejects u <= 0.
RatioScan cond6_ratio_scan(std::span<const double> u_values, TightVariant variant,
                           Horizon horizon = {});

// Closed-form spatial subgradient magnitude w2 = -w1 of L(t,x,v) at t-x = u,
// for cross-checking against finite differences.
double lagrangian_w2(TightVariant variant, double u, double v, Horizon horizon = {});

// Upper-envelope estimate of the modulus of continuity of phi on [0,T] x rB
// at argument delta (dense sampling with local refinement).
double phi_modulus(double delta, double r, Horizon horizon = {});

// Estimated Lipschitz constant of the hat phi on [0,T] x rB.
double phi_hat_lipschitz(double r, Horizon horizon = {});

struct PointPair {
  SpacetimePoint a;  // (t, x)
  SpacetimePoint b;  // (s, y)
};

struct ModulusReport {
  std::size_t checks = 0;
  int violations = 0;
  double worst_slack = 0.0;  // min over checks of RS - LS (negative = violation)
  PointPair worst_pair{};
  double worst_v = 0.0;
};

// Constructs the transported velocity nu by the three-case rule
// (scale by phi(s,y)/phi(t,x) when <= 1, keep v otherwise, nu=0 on the
// diagonal) and verifies |nu - v| and L(s,y,nu) - L(t,x,v) against
// 2(1+|v|+L(t,x,v)) * w(|s-t|+|y-x|), with w the estimated modulus (Original)
// or the linear Lipschitz modulus (Hat). Throws if some v lies outside
// dom L(t,x,.).
ModulusReport modulus_condition_check(TightVariant variant, std::span<const PointPair> pairs,
                                      std::span<const double> v_samples, double r,
                                      Horizon horizon = {});

struct SampleGrids {
  Grid1D t;
  Grid1D x;
  Grid1D p;
  Grid1D v;
};

struct MonotoneReport {
  bool pass = true;
  std::size_t checks = 0;
  std::string first_violation;
};

// sigma_n decreasing to sigma, phi_n decreasing to phi, H_n decreasing to H,
// L_n increasing to L, over the sample grids and n = 1..n_max.
MonotoneReport monotone_family_check(const SampleGrids& grids, int n_max, Horizon horizon = {});

}  // namespace hjb
