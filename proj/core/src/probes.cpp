#include "hjb/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hjb/random.hpp"

namespace hjb {

namespace {

double shape_sqrt(double u) {  // phi as a function of the gap u = |t-x|
  const double s = std::sqrt(u);
  return s * std::exp(2.0 * s);
}

double shape_hat(double u) { return u * std::exp(2.0 * u); }

// Least-squares log-log fit over the last (up to) 5 strictly positive points.
void fit_tail(RatioScan& scan) {
  std::vector<double> lx, ly;
  for (std::size_t i = scan.parameters.size(); i-- > 0 && lx.size() < 5;) {
    if (scan.ratios[i] > 0.0) {
      lx.push_back(std::log(scan.parameters[i]));
      ly.push_back(std::log(scan.ratios[i]));
    }
  }
  scan.sup_ratio = scan.ratios.empty()
                       ? 0.0
                       : *std::max_element(scan.ratios.begin(), scan.ratios.end());
  // a divergence verdict needs a genuine power-law tail; with fewer than 4
  // positive points the fit is degenerate (2 points always give R^2 = 1)
  if (lx.size() < 4) {
    scan.diverges = false;
    return;
  }
  const std::size_t n = lx.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  scan.fitted_exponent = (n * sxy - sx * sy) / denom;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - scan.fitted_exponent * (sxy - sx * sy / n);
  scan.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  scan.diverges = scan.fitted_exponent <= -0.25 && scan.r_squared >= 0.99;
}

}  // namespace

double llc_constant(const BoxSpec& box, int samples, const ModelVariant& variant,
                    Horizon horizon, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("llc_constant: samples must be >= 2");
  if (!(box.r > 0.0)) throw std::invalid_argument("llc_constant: r must be > 0");
  const double t_lo = std::max(0.0, box.t0 - box.r);
  const double t_hi = std::min(horizon.T, box.t0 + box.r);
  Rng rng(seed);
  struct Node {
    double t, x, p, h;
  };
  std::vector<Node> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    Node nd{rng.uniform(t_lo, t_hi), rng.uniform(box.x0 - box.r, box.x0 + box.r),
            rng.uniform(box.p0 - box.r, box.p0 + box.r), 0.0};
    nd.h = eval_hamiltonian({nd.t, nd.x}, nd.p, variant);
    pts.push_back(nd);
  }
  double k = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double denom = std::abs(pts[i].t - pts[j].t) + std::abs(pts[i].x - pts[j].x) +
                           std::abs(pts[i].p - pts[j].p);
      if (denom < 1e-12) continue;
      k = std::max(k, std::abs(pts[i].h - pts[j].h) / denom);
    }
  }
  return k;
}

RatioScan slc_ratio_scan(SpacetimePoint anchor, std::span<const double> h_values,
                         const ModelVariant& variant, Horizon horizon) {
  if (anchor.t != anchor.x) throw std::invalid_argument("slc_ratio_scan: anchor must be diagonal");
  RatioScan scan;
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    const double h = h_values[i];
    if (!(h > 0.0)) throw std::invalid_argument("slc_ratio_scan: h must be > 0");
    if (i > 0 && !(h < h_values[i - 1]))
      throw std::invalid_argument("slc_ratio_scan: h ladder must decrease");
    const SpacetimePoint moved{anchor.t + h, anchor.x};
    const double p = 1.0 / eval_phi(moved, variant);
    const double num =
        std::abs(eval_hamiltonian(moved, p, variant) - eval_hamiltonian(anchor, p, variant));
    scan.parameters.push_back(h);
    scan.ratios.push_back(num / ((1.0 + std::abs(p)) * h));
    (void)horizon;
  }
  fit_tail(scan);
  return scan;
}

double lagrangian_w2(TightVariant variant, double u, double v, Horizon) {
  if (!(u > 0.0)) throw std::invalid_argument("lagrangian_w2: u must be > 0");
  if (variant == TightVariant::Original) {
    const double phi = shape_sqrt(u);
    return (v / (2.0 * phi)) * (1.0 / (2.0 * u) + 1.0 / std::sqrt(u));
  }
  const double phi = shape_hat(u);
  return (v / (2.0 * phi)) * (1.0 / u + 2.0);
}

RatioScan cond6_ratio_scan(std::span<const double> u_values, TightVariant variant,
                           Horizon horizon) {
  RatioScan scan;
  for (std::size_t i = 0; i < u_values.size(); ++i) {
    const double u = u_values[i];
    if (!(u > 0.0)) throw std::invalid_argument("cond6_ratio_scan: u must be > 0");
    if (i > 0 && !(u < u_values[i - 1]))
      throw std::invalid_argument("cond6_ratio_scan: u ladder must decrease");
    const double phi = variant == TightVariant::Original ? shape_sqrt(u) : shape_hat(u);
    const double v = 2.0 * phi;  // the adversarial test velocity
    const double w2 = lagrangian_w2(variant, u, v, horizon);
    const double L = v / (2.0 * phi);  // == 1
    const double p = 1.0 / (2.0 * phi);
    const double ls = std::sqrt(2.0) * w2;
    const double rs = (1.0 + v + L) * (1.0 + p);
    scan.parameters.push_back(u);
    scan.ratios.push_back(ls / rs);
  }
  fit_tail(scan);
  return scan;
}

double phi_modulus(double delta, double r, Horizon horizon) {
  if (!(delta >= 0.0)) throw std::invalid_argument("phi_modulus: delta must be >= 0");
  if (!(r > 0.0)) throw std::invalid_argument("phi_modulus: r must be > 0");
  const double D = horizon.T + r;  // largest attainable gap |t-x|
  if (delta >= D) return shape_sqrt(D);
  // Dense scan of a -> f(a+delta) - f(a), then golden-section refinement
  // around the best sample. The estimate is an upper envelope for the checks.
  const int kDense = 4096;
  double best = 0.0, best_a = 0.0;
  for (int i = 0; i <= kDense; ++i) {
    const double a = (D - delta) * i / kDense;
    const double diff = shape_sqrt(a + delta) - shape_sqrt(a);
    if (diff > best) {
      best = diff;
      best_a = a;
    }
  }
  const double step = (D - delta) / kDense;
  double lo = std::max(0.0, best_a - step), hi = std::min(D - delta, best_a + step);
  for (int it = 0; it < 60; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    const double f1 = shape_sqrt(m1 + delta) - shape_sqrt(m1);
    const double f2 = shape_sqrt(m2 + delta) - shape_sqrt(m2);
    if (f1 < f2)
      lo = m1;
    else
      hi = m2;
    best = std::max({best, f1, f2});
  }
  return best * (1.0 + 1e-9) + 1e-15;
}

double phi_hat_lipschitz(double r, Horizon horizon) {
  if (!(r > 0.0)) throw std::invalid_argument("phi_hat_lipschitz: r must be > 0");
  const double D = horizon.T + r;
  const int kDense = 8192;
  double k = 0.0;
  double prev = shape_hat(0.0);
  for (int i = 1; i <= kDense; ++i) {
    const double u = D * i / kDense;
    const double cur = shape_hat(u);
    k = std::max(k, (cur - prev) / (D / kDense));
    prev = cur;
  }
  return k * (1.0 + 1e-6);
}

ModulusReport modulus_condition_check(TightVariant variant, std::span<const PointPair> pairs,
                                      std::span<const double> v_samples, double r,
                                      Horizon horizon) {
  const ModelVariant mv =
      variant == TightVariant::Original ? ModelVariant::original() : ModelVariant::hat();
  const double lip_hat =
      variant == TightVariant::Hat ? phi_hat_lipschitz(r, horizon) : 0.0;

  ModulusReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& pr : pairs) {
    for (double v : v_samples) {
      const ExtendedReal Ltx = eval_lagrangian(pr.a, v, mv, horizon);
      if (!Ltx.is_finite())
        throw std::invalid_argument("modulus_condition_check: v outside dom L(t,x,.)");
      const double phi_tx = eval_phi(pr.a, mv);
      const double phi_sy = eval_phi(pr.b, mv);
      double nu;
      if (pr.a.t == pr.a.x) {
        nu = 0.0;  // dom L(t,x,.) = {0}
      } else if (phi_sy / phi_tx <= 1.0) {
        nu = v * (phi_sy / phi_tx);
      } else {
        nu = v;
      }
      const ExtendedReal Lsy = eval_lagrangian(pr.b, nu, mv, horizon);
      const double delta = std::abs(pr.b.t - pr.a.t) + std::abs(pr.b.x - pr.a.x);
      const double w = variant == TightVariant::Original ? phi_modulus(delta, r, horizon)
                                                         : lip_hat * delta;
      const double rs = 2.0 * (1.0 + std::abs(v) + Ltx.value()) * w;
      const double slack_i = rs - std::abs(nu - v);
      const double slack_ii = (Ltx.value() + rs) - Lsy.value();
      const double slack = std::min(slack_i, slack_ii);
      ++rep.checks;
      if (slack < rep.worst_slack) {
        rep.worst_slack = slack;
        rep.worst_pair = pr;
        rep.worst_v = v;
      }
      if (slack < -1e-12) ++rep.violations;
    }
  }
  return rep;
}

MonotoneReport monotone_family_check(const SampleGrids& grids, int n_max, Horizon horizon) {
  if (n_max < 2) throw std::invalid_argument("monotone_family_check: n_max must be >= 2");
  MonotoneReport rep;
  auto fail = [&rep](const std::string& what) {
    if (rep.pass) {
      rep.pass = false;
      rep.first_violation = what;
    }
  };

  for (int it = 0; it < grids.t.count && rep.pass; ++it) {
    const double t = grids.t.node(it);
    for (int ix = 0; ix < grids.x.count && rep.pass; ++ix) {
      const double x = grids.x.node(ix);
      const SpacetimePoint pt{t, x};
      const double z = std::abs(t - x);
      const double phi_lim = eval_phi(pt, ModelVariant::original());
      for (int n = 1; n < n_max && rep.pass; ++n) {
        ++rep.checks;
        const double s_n = sigma_n(n, z), s_n1 = sigma_n(n + 1, z);
        if (!(s_n >= s_n1 && s_n1 >= sigma(z))) {
          std::ostringstream os;
          os << "sigma chain broken at z=" << z << " n=" << n;
          fail(os.str());
          break;
        }
        const double f_n = eval_phi(pt, ModelVariant::approx(n));
        const double f_n1 = eval_phi(pt, ModelVariant::approx(n + 1));
        if (!(f_n >= f_n1 && f_n1 >= phi_lim)) {
          std::ostringstream os;
          os << "phi chain broken at (" << t << "," << x << ") n=" << n;
          fail(os.str());
          break;
        }
        for (int ip = 0; ip < grids.p.count; ++ip) {
          const double p = grids.p.node(ip);
          const double h_n = eval_hamiltonian(pt, p, ModelVariant::approx(n));
          const double h_n1 = eval_hamiltonian(pt, p, ModelVariant::approx(n + 1));
          const double h = eval_hamiltonian(pt, p, ModelVariant::original());
          if (!(h_n >= h_n1 && h_n1 >= h)) {
            std::ostringstream os;
            os << "H chain broken at (" << t << "," << x << "," << p << ") n=" << n;
            fail(os.str());
            break;
          }
        }
        for (int iv = 0; iv < grids.v.count && rep.pass; ++iv) {
          const double v = grids.v.node(iv);
          const ExtendedReal l_n = eval_lagrangian(pt, v, ModelVariant::approx(n), horizon);
          const ExtendedReal l_n1 = eval_lagrangian(pt, v, ModelVariant::approx(n + 1), horizon);
          const ExtendedReal l = eval_lagrangian(pt, v, ModelVariant::original(), horizon);
          if (!(l_n <= l_n1 && l_n1 <= l)) {
            std::ostringstream os;
            os << "L chain broken at (" << t << "," << x << "," << v << ") n=" << n;
            fail(os.str());
            break;
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace hjb
