#include "hjb/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hjb {

namespace {

// f(s) = s exp(2s); phi = f(sigma-variant(|t-x|)).
double shape(double s) { return s * std::exp(2.0 * s); }

// Antikink profile 1/f(sqrt(w)) used by the V_n gradient formulas.
double inv_f_sqrt(double w) { return 1.0 / shape(std::sqrt(w)); }

double gap_of(SpacetimePoint pt) { return std::abs(pt.t - pt.x); }

}  // namespace

double sigma(double z) {
  if (z < 0) throw std::invalid_argument("sigma: z < 0");
  return std::sqrt(z);
}

double sigma_n(int n, double z) {
  if (n < 1) throw std::invalid_argument("sigma_n: n < 1");
  if (z < 0) throw std::invalid_argument("sigma_n: z < 0");
  return z >= 1.0 / n ? std::sqrt(z) : 1.0 / std::sqrt(static_cast<double>(n));
}

double eval_phi(SpacetimePoint pt, const ModelVariant& variant) {
  const double u = gap_of(pt);
  switch (variant.kind()) {
    case ModelVariant::Kind::Original: return shape(std::sqrt(u));
    case ModelVariant::Kind::Hat: return shape(u);
    case ModelVariant::Kind::Approx: return shape(sigma_n(variant.approx_n(), u));
  }
  return 0.0;
}

double eval_hamiltonian(SpacetimePoint pt, double p, const ModelVariant& variant) {
  if (variant.kind() != ModelVariant::Kind::Approx && pt.t == pt.x) return 0.0;
  const double phi = eval_phi(pt, variant);
  const double excess = 2.0 * std::abs(p) - 1.0 / phi;
  return excess > 0.0 ? excess : 0.0;
}

ExtendedReal eval_lagrangian(SpacetimePoint pt, double v, const ModelVariant& variant,
                             Horizon horizon) {
  SpacetimePoint q{std::clamp(pt.t, 0.0, horizon.T), pt.x};
  if (variant.kind() != ModelVariant::Kind::Approx && q.t == q.x) {
    if (v == 0.0) return ExtendedReal(0.0);
    return ExtendedReal::infinity();
  }
  if (std::abs(v) > 2.0) return ExtendedReal::infinity();
  return ExtendedReal(std::abs(v) / (2.0 * eval_phi(q, variant)));
}

double eval_terminal_g(double x, Horizon horizon) {
  if (x >= horizon.T) return std::exp(-2.0 * std::sqrt(x - horizon.T)) - 1.0;
  return 1.0;
}

double eval_solution_U(SpacetimePoint pt, Horizon) {
  if (pt.x >= pt.t) return std::exp(-2.0 * std::sqrt(pt.x - pt.t)) - 1.0;
  return 1.0;
}

double eval_solution_V(SpacetimePoint pt, Horizon horizon) {
  if (pt.x >= pt.t) return eval_solution_U(pt, horizon);
  if (pt.x >= 2.0 * pt.t - horizon.T) return 1.0 - std::exp(-2.0 * std::sqrt(pt.t - pt.x));
  return 1.0;
}

namespace {

// Case formulas for V_n over x >= 2t-T; u = t-x, w = T-2t+x.
double vn_case_a(int n, double u, double /*w*/) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double cn = std::exp(-2.0 / rn);
  return u * rn * cn + (1.0 + 1.0 / rn) * cn - 1.0;
}

double vn_case_b(int n, double Tt, double w) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double cn = std::exp(-2.0 / rn);
  return std::exp(-2.0 * std::sqrt(w)) + Tt * rn * cn - 1.0;
}

double vn_case_c(int n, double u, double /*w*/) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double cn = std::exp(-2.0 / rn);
  return 2.0 * (1.0 + 1.0 / rn) * cn - std::exp(-2.0 * std::sqrt(u)) - 1.0;
}

double vn_case_d(int n, double u, double w) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double cn = std::exp(-2.0 / rn);
  return (1.0 + rn * w + 1.0 / rn) * cn + std::exp(-2.0 * std::sqrt(w)) -
         std::exp(-2.0 * std::sqrt(u)) - 1.0;
}

double vn_case_e(double u) { return std::exp(-2.0 * std::sqrt(-u)) - 1.0; }

}  // namespace

double eval_Vn(int n, SpacetimePoint pt, Horizon horizon) {
  if (n < 1) throw std::invalid_argument("eval_Vn: n must be >= 1");
  const double w = horizon.T - 2.0 * pt.t + pt.x;
  if (w < 0.0) return 1.0;
  const double u = pt.t - pt.x;
  const double inv = 1.0 / n;
  double value;
  if (-u >= inv) {
    value = vn_case_e(u);
  } else if (std::abs(u) <= inv) {
    value = w >= inv ? vn_case_a(n, u, w) : vn_case_b(n, horizon.T - pt.t, w);
  } else {
    value = w >= inv ? vn_case_c(n, u, w) : vn_case_d(n, u, w);
  }
  assert(vn_case_spread(n, pt, horizon) <= 1e-9);
  return value;
}

double vn_case_spread(int n, SpacetimePoint pt, Horizon horizon) {
  if (n < 1) throw std::invalid_argument("vn_case_spread: n must be >= 1");
  const double w = horizon.T - 2.0 * pt.t + pt.x;
  if (w < 0.0) return 0.0;
  const double u = pt.t - pt.x;
  const double inv = 1.0 / n;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto take = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  if (std::abs(u) <= inv && w >= inv) take(vn_case_a(n, u, w));
  if (std::abs(u) <= inv && w <= inv) take(vn_case_b(n, horizon.T - pt.t, w));
  if (u >= inv && w >= inv) take(vn_case_c(n, u, w));
  if (u >= inv && w <= inv) take(vn_case_d(n, u, w));
  if (-u >= inv) take(vn_case_e(u));
  if (!(lo <= hi)) return 0.0;
  return hi - lo;
}

std::optional<Costate> analytic_gradient(Solution which, SpacetimePoint pt, Horizon horizon) {
  if (!(pt.t > 0.0 && pt.t < horizon.T))
    throw std::invalid_argument("analytic_gradient: boundary or exterior time");
  if (pt.x == pt.t) return std::nullopt;
  if (pt.x > pt.t) {
    const double psi = 1.0 / eval_phi(pt, ModelVariant::original());
    return Costate{psi, -psi};
  }
  // x < t
  if (which == Solution::U) return Costate{0.0, 0.0};
  const double jump = 2.0 * pt.t - horizon.T;
  if (pt.x == jump) return std::nullopt;
  if (pt.x > jump) {
    const double psi = 1.0 / eval_phi(pt, ModelVariant::original());
    return Costate{psi, -psi};
  }
  return Costate{0.0, 0.0};
}

std::optional<Costate> vn_gradient(int n, SpacetimePoint pt, Horizon horizon) {
  if (n < 1) throw std::invalid_argument("vn_gradient: n must be >= 1");
  const double w = horizon.T - 2.0 * pt.t + pt.x;
  if (w == 0.0) return std::nullopt;
  if (w < 0.0) return Costate{0.0, 0.0};
  const double u = pt.t - pt.x;
  const double inv = 1.0 / n;
  const double cn = 1.0 / shape(sigma_n(n, 0.0));  // 1/phi_n on the plateau
  if (std::abs(u) <= inv && w >= inv) return Costate{cn, -cn};
  if (std::abs(u) <= inv) {
    const double psi_w = inv_f_sqrt(w);
    return Costate{2.0 * psi_w - cn, -psi_w};
  }
  if (u >= inv && w >= inv) {
    const double psi_u = inv_f_sqrt(u);
    return Costate{psi_u, -psi_u};
  }
  if (u >= inv) {
    const double psi_u = inv_f_sqrt(u);
    const double psi_w = inv_f_sqrt(w);
    return Costate{2.0 * psi_w + psi_u - 2.0 * cn, cn - psi_w - psi_u};
  }
  // -u >= inv: ahead of the diagonal, V_n agrees with U there.
  const double psi = inv_f_sqrt(-u);
  return Costate{psi, -psi};
}

Trajectory optimal_trajectory(double t0, double x0, Horizon horizon, int sample_count) {
  if (t0 >= horizon.T) throw std::invalid_argument("optimal_trajectory: t0 >= T");
  if (sample_count < 2) throw std::invalid_argument("optimal_trajectory: need >= 2 samples");
  Trajectory traj;
  traj.t0 = t0;
  traj.x0 = x0;
  const bool fast = x0 >= 2.0 * t0 - horizon.T;
  traj.kind = fast ? Trajectory::Kind::FastRay : Trajectory::Kind::Constant;
  traj.samples.reserve(static_cast<std::size_t>(sample_count));
  for (int i = 0; i < sample_count; ++i) {
    const double t = (t0 * (sample_count - 1 - i) + horizon.T * i) / (sample_count - 1);
    const double x = fast ? 2.0 * (t - t0) + x0 : x0;
    const double v = (i + 1 < sample_count) ? (fast ? 2.0 : 0.0) : 0.0;
    traj.samples.push_back({t, x, v});
  }
  return traj;
}

ModelVariant parse_variant(const std::string& s) {
  if (s == "original") return ModelVariant::original();
  if (s == "hat") return ModelVariant::hat();
  const std::string prefix = "approx:";
  if (s.rfind(prefix, 0) == 0) {
    const std::string num = s.substr(prefix.size());
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("parse_variant: bad approx index in '" + s + "'");
    const long n = std::stol(num);
    if (n < 1 || n > 1000000) throw std::invalid_argument("parse_variant: approx index out of range");
    return ModelVariant::approx(static_cast<int>(n));
  }
  throw std::invalid_argument("parse_variant: unknown variant '" + s + "'");
}

}  // namespace hjb
