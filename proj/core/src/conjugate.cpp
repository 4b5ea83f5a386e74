#include "hjb/conjugate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hjb {

Grid1D::Grid1D(double lo_, double hi_, int count_) : lo(lo_), hi(hi_), count(count_) {
  if (!(lo < hi)) throw std::invalid_argument("Grid1D: lo must be < hi");
  if (count < 2) throw std::invalid_argument("Grid1D: count must be >= 2");
}

double discrete_conjugate(std::span<const FunctionSample> samples, double slope) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (!s.value.is_finite()) continue;
    const double cand = slope * s.point - s.value.value();
    if (cand > best) best = cand;
  }
  if (best == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("discrete_conjugate: all samples are +infinity");
  return best;
}

std::vector<FunctionSample> sample_lagrangian(SpacetimePoint pt, const Grid1D& v_grid,
                                              const ModelVariant& variant, Horizon horizon) {
  std::vector<FunctionSample> out;
  out.reserve(static_cast<std::size_t>(v_grid.count));
  for (int i = 0; i < v_grid.count; ++i) {
    const double v = v_grid.node(i);
    out.push_back({v, eval_lagrangian(pt, v, variant, horizon)});
  }
  return out;
}

DualityGapReport duality_gap(SpacetimePoint pt, const Grid1D& p_grid, const Grid1D& v_grid,
                             const ModelVariant& variant, Horizon horizon) {
  const auto samples = sample_lagrangian(pt, v_grid, variant, horizon);
  DualityGapReport rep;
  rep.point = pt;
  rep.slope_grid = p_grid;
  rep.sample_grid = v_grid;
  for (int i = 0; i < p_grid.count; ++i) {
    const double p = p_grid.node(i);
    const double conj = discrete_conjugate(samples, p);
    const double gap = std::abs(conj - eval_hamiltonian(pt, p, variant));
    if (gap > rep.sup_abs_gap) {
      rep.sup_abs_gap = gap;
      rep.argmax_slope = p;
    }
  }
  const double p_max = std::max(std::abs(p_grid.lo), std::abs(p_grid.hi));
  const bool diagonal =
      variant.kind() != ModelVariant::Kind::Approx && pt.t == pt.x;
  const double lip = diagonal ? 0.0 : 1.0 / (2.0 * eval_phi(pt, variant));
  rep.theoretical_bound = diagonal ? 0.0 : (p_max + lip) * v_grid.spacing();
  return rep;
}

namespace {

struct Biconj {
  double value;
  int argmax_index;
};

Biconj conjugate_of_hamiltonian(SpacetimePoint pt, const Grid1D& p_grid, double v,
                                const ModelVariant& variant) {
  Biconj r{-std::numeric_limits<double>::infinity(), 0};
  for (int i = 0; i < p_grid.count; ++i) {
    const double p = p_grid.node(i);
    const double cand = v * p - eval_hamiltonian(pt, p, variant);
    if (cand > r.value) {
      r.value = cand;
      r.argmax_index = i;
    }
  }
  return r;
}

}  // namespace

DualityGapReport biconjugate_gap(SpacetimePoint pt, const Grid1D& v_probe,
                                 const Grid1D& p_grid, const ModelVariant& variant,
                                 Horizon horizon, double margin) {
  DualityGapReport rep;
  rep.point = pt;
  rep.slope_grid = v_probe;
  rep.sample_grid = p_grid;
  Grid1D window = p_grid;
  for (int attempt = 0;; ++attempt) {
    bool edge_hit = false;
    rep.sup_abs_gap = 0.0;
    for (int i = 0; i < v_probe.count; ++i) {
      const double v = v_probe.node(i);
      if (std::abs(v) > 2.0 - margin) continue;
      const ExtendedReal L = eval_lagrangian(pt, v, variant, horizon);
      if (!L.is_finite()) continue;  // diagonal point, v != 0
      const Biconj c = conjugate_of_hamiltonian(pt, window, v, variant);
      // On the diagonal H vanishes identically and the sup sits at the window
      // edge for every v != 0; only v = 0 carries information there.
      const bool diagonal = variant.kind() != ModelVariant::Kind::Approx && pt.t == pt.x;
      if (!diagonal && v != 0.0 &&
          (c.argmax_index == 0 || c.argmax_index == window.count - 1)) {
        edge_hit = true;
        break;
      }
      const double gap = std::abs(c.value - L.value());
      if (gap > rep.sup_abs_gap) {
        rep.sup_abs_gap = gap;
        rep.argmax_slope = v;
      }
    }
    if (!edge_hit) {
      rep.sample_grid = window;
      return rep;
    }
    if (attempt >= 1)
      throw std::runtime_error("biconjugate_gap: sup not attained interiorly after widening");
    const double mid = 0.5 * (window.lo + window.hi);
    const double half = 2.0 * (window.hi - window.lo);  // 4x wider
    window = Grid1D(mid - half, mid + half, 4 * (window.count - 1) + 1);
  }
}

}  // namespace hjb
