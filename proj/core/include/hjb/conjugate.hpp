#pragma once

#include <span>
#include <vector>

#include "hjb/extended_real.hpp"
#include "hjb/model.hpp"
#include "hjb/types.hpp"

namespace hjb {

// Affinely spaced 1-D grid; node(0) == lo and node(count-1) == hi exactly,
// and for symmetric ranges the midpoint is exact (blend form, not lo + i*h).
struct Grid1D {
  double lo;
  double hi;
  int count;

  Grid1D(double lo_, double hi_, int count_);

  double spacing() const { return (hi - lo) / (count - 1); }
  double node(int i) const {
    return (lo * (count - 1 - i) + hi * i) / (count - 1);
  }
};

struct FunctionSample {
  double point = 0.0;
  ExtendedReal value;
};

// Discrete Legendre-Fenchel transform: max over finite samples of
// slope*point - value. +inf samples are skipped. Throws if every sample is
// +inf (improper input).
double discrete_conjugate(std::span<const FunctionSample> samples, double slope);

struct DualityGapReport {
  double sup_abs_gap = 0.0;
  SpacetimePoint point{};
  double argmax_slope = 0.0;   // p (duality_gap) or v (biconjugate_gap) attaining the sup
  double theoretical_bound = 0.0;
  Grid1D slope_grid{-1.0, 1.0, 2};   // grids the scan actually used
  Grid1D sample_grid{-1.0, 1.0, 2};
};

// sup over p in p_grid of |discrete conjugate of L(t,x,.) sampled on v_grid
// minus H(t,x,p)|. The theoretical bound is (max|p| + Lip_v L) * v-spacing.
DualityGapReport duality_gap(SpacetimePoint pt, const Grid1D& p_grid, const Grid1D& v_grid,
                             const ModelVariant& variant, Horizon horizon = {});

// sup over probed v with |v| <= 2 - margin of |discrete conjugate of H(t,x,.)
// sampled on p_grid minus L(t,x,v)|. Asserts interior attainment of the sup;
// if the argmax hits the window edge the window is widened 4x and retried
// once, then the operation errors.
DualityGapReport biconjugate_gap(SpacetimePoint pt, const Grid1D& v_probe,
                                 const Grid1D& p_grid, const ModelVariant& variant,
                                 Horizon horizon = {}, double margin = 0.05);

// L(t,x,.) tabulated on a grid (helper shared by duality_gap and tests).
std::vector<FunctionSample> sample_lagrangian(SpacetimePoint pt, const Grid1D& v_grid,
                                              const ModelVariant& variant, Horizon horizon = {});

}  // namespace hjb
