#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include "hjb/model.hpp"
#include "hjb/random.hpp"

using namespace hjb;

namespace {

// Frozen reference values, computed with a 50-digit calculator (mpmath).
constexpr double kE2 = 7.3890560989306495;             // e^2
constexpr double kPhiHalf = 2.9085072355555432;        // phi at gap 0.5
constexpr double kInvPhiHalf = 0.34381898307672378;    // 1/phi(0.5)
constexpr double kHamHalf = 1.6561810169232762;        // 2 - 1/phi(0.5)
constexpr double kPhi4Zero = 1.3591409142295226;       // 0.5 e
constexpr double kExpM2Minus1 = -0.86466471676338731;  // e^{-2} - 1
constexpr double kOneMinusInvE = 0.63212055882855768;  // 1 - e^{-1}
constexpr double kInvE = 0.36787944117144233;          // e^{-1}
constexpr double kU0_05 = -0.75688326556578579;        // exp(-2 sqrt(0.5)) - 1
constexpr double kVnA4 = -0.44818083824283652;         // 1.5 e^{-1} - 1
constexpr double kPsiQuarter = 0.73575888234288464;    // 2/e = 1/phi(0.25)

Costate fd_gradient(const std::function<double(SpacetimePoint)>& f, SpacetimePoint z,
                    double h = 1e-6) {
  return {(f({z.t + h, z.x}) - f({z.t - h, z.x})) / (2.0 * h),
          (f({z.t, z.x + h}) - f({z.t, z.x - h})) / (2.0 * h)};
}

}  // namespace

TEST_CASE("phi evaluators") {
  CHECK(eval_phi({0.5, 0.5}, ModelVariant::original()) == 0.0);
  CHECK(eval_phi({1.0, 0.0}, ModelVariant::original()) == doctest::Approx(kE2).epsilon(1e-15));
  CHECK(eval_phi({0.5, 0.5}, ModelVariant::approx(4)) ==
        doctest::Approx(kPhi4Zero).epsilon(1e-15));
  CHECK(eval_phi({0.75, 0.25}, ModelVariant::original()) ==
        doctest::Approx(kPhiHalf).epsilon(1e-15));
  // hat variant: |t-x| e^{2|t-x|}
  CHECK(eval_phi({1.0, 0.0}, ModelVariant::hat()) == doctest::Approx(kE2).epsilon(1e-15));
  // Approx(n) is bounded below everywhere
  for (double t : {0.0, 0.3, 0.9}) {
    const double lower = eval_phi({t, t}, ModelVariant::approx(7));
    CHECK(eval_phi({t, t + 0.001}, ModelVariant::approx(7)) >= lower);
    CHECK(lower > 0.0);
  }
}

TEST_CASE("hamiltonian examples and bounds") {
  const auto orig = ModelVariant::original();
  CHECK(eval_hamiltonian({0.3, 0.3}, 7.0, orig) == 0.0);
  CHECK(eval_hamiltonian({0.75, 0.25}, 1.0, orig) == doctest::Approx(kHamHalf).epsilon(1e-15));
  CHECK(eval_hamiltonian({0.75, 0.25}, 0.1, orig) == 0.0);  // 2|p| <= 1/phi
  // Approx has no diagonal null branch
  CHECK(eval_hamiltonian({0.3, 0.3}, 7.0, ModelVariant::approx(4)) > 0.0);

  Rng rng(99);
  const std::vector<ModelVariant> variants = {orig, ModelVariant::hat(), ModelVariant::approx(3),
                                              ModelVariant::approx(17)};
  for (int i = 0; i < 4000; ++i) {
    const SpacetimePoint pt{rng.uniform(0, 1), rng.uniform(-2, 2)};
    const double p = rng.uniform(-8, 8);
    for (const auto& var : variants) {
      const double h = eval_hamiltonian(pt, p, var);
      CHECK(h >= 0.0);
      CHECK(h <= 2.0 * std::abs(p) + 1e-15);
      if (pt.t != pt.x && 2.0 * std::abs(p) <= 1.0 / eval_phi(pt, var)) CHECK(h == 0.0);
    }
  }
}

TEST_CASE("hamiltonian midpoint convexity in p") {
  Rng rng(7);
  const std::vector<ModelVariant> variants = {ModelVariant::original(), ModelVariant::hat(),
                                              ModelVariant::approx(6)};
  for (int i = 0; i < 3000; ++i) {
    const SpacetimePoint pt{rng.uniform(0, 1), rng.uniform(-2, 2)};
    const double p = rng.uniform(-6, 6), q = rng.uniform(-6, 6);
    for (const auto& var : variants) {
      const double mid = eval_hamiltonian(pt, 0.5 * (p + q), var);
      const double avg =
          0.5 * (eval_hamiltonian(pt, p, var) + eval_hamiltonian(pt, q, var));
      CHECK(mid <= avg + 1e-12);
    }
  }
}

TEST_CASE("lagrangian branches") {
  const auto orig = ModelVariant::original();
  CHECK(eval_lagrangian({0.4, 0.4}, 0.0, orig).value() == 0.0);
  CHECK(eval_lagrangian({0.4, 0.4}, 1.0, orig).is_infinite());
  CHECK(eval_lagrangian({0.75, 0.25}, 2.0, orig).value() ==
        doctest::Approx(kInvPhiHalf).epsilon(1e-15));
  CHECK(eval_lagrangian({0.5, 0.1}, 2.0000001, orig).is_infinite());
  CHECK(eval_lagrangian({0.5, 0.1}, -2.0, orig).is_finite());
  // time clamping extension: L(t<0) = L(0), L(t>T) = L(T)
  CHECK(eval_lagrangian({-0.7, 0.3}, 1.0, orig).raw() ==
        eval_lagrangian({0.0, 0.3}, 1.0, orig).raw());
  CHECK(eval_lagrangian({1.9, 0.3}, 1.0, orig).raw() ==
        eval_lagrangian({1.0, 0.3}, 1.0, orig).raw());
  // L >= 0 and effective domain [-2,2] off-diagonal
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const SpacetimePoint pt{rng.uniform(0, 1), rng.uniform(-2, 2)};
    const double v = rng.uniform(-3, 3);
    const ExtendedReal L = eval_lagrangian(pt, v, orig);
    if (L.is_finite()) {
      CHECK(L.value() >= 0.0);
      CHECK(std::abs(v) <= 2.0);
    } else if (pt.t != pt.x) {
      CHECK(std::abs(v) > 2.0);
    }
  }
}

TEST_CASE("terminal cost g") {
  CHECK(eval_terminal_g(1.0) == 0.0);
  CHECK(eval_terminal_g(0.5) == 1.0);
  CHECK(eval_terminal_g(2.0) == doctest::Approx(kExpM2Minus1).epsilon(1e-15));
  for (double x = -3.0; x <= 6.0; x += 0.1) {
    const double g = eval_terminal_g(x);
    CHECK(g > -1.0);
    CHECK(g <= 1.0);
  }
}

TEST_CASE("solutions U and V") {
  CHECK(eval_solution_U({0.5, 0.5}) == 0.0);
  CHECK(eval_solution_U({0.5, 0.25}) == 1.0);
  CHECK(eval_solution_U({0.0, 1.0}) == doctest::Approx(kExpM2Minus1).epsilon(1e-15));

  CHECK(eval_solution_V({0.5, 0.25}) == doctest::Approx(kOneMinusInvE).epsilon(1e-15));
  CHECK(eval_solution_V({0.2, -0.8}) == 1.0);
  CHECK(eval_solution_V({0.5, 0.75}) == eval_solution_U({0.5, 0.75}));

  // V(t,t) = 0 and continuity of V across the diagonal
  CHECK(eval_solution_V({0.3, 0.3}) == 0.0);
  CHECK(std::abs(eval_solution_V({0.3, 0.3 + 1e-12})) < 1e-5);
  CHECK(std::abs(eval_solution_V({0.3, 0.3 - 1e-12})) < 1e-5);

  // nonuniqueness witness, exact closed forms
  CHECK(std::abs((eval_solution_U({0.5, 0.25}) - eval_solution_V({0.5, 0.25})) - kInvE) < 1e-12);

  // V <= U everywhere; V < U exactly on 2t-T <= x < t
  Rng rng(11);
  for (int i = 0; i < 5000; ++i) {
    const SpacetimePoint pt{rng.uniform(0, 1), rng.uniform(-2.5, 2.5)};
    const double u = eval_solution_U(pt), v = eval_solution_V(pt);
    CHECK(v <= u);
    const bool strip = pt.x >= 2.0 * pt.t - 1.0 && pt.x < pt.t;
    if (strip) {
      CHECK(v < u);
      CHECK(u == 1.0);
    } else {
      CHECK(v == u);
    }
  }

  // identical terminal slices, bit-exact
  for (int i = 0; i <= 1000; ++i) {
    const double x = -5.0 + 10.0 * i / 1000.0;
    CHECK(eval_solution_U({1.0, x}) == eval_terminal_g(x));
    CHECK(eval_solution_V({1.0, x}) == eval_terminal_g(x));
  }
}

TEST_CASE("V_n closed forms") {
  CHECK(eval_Vn(100, {0.0, 0.5}) == doctest::Approx(kU0_05).epsilon(1e-15));
  CHECK(eval_Vn(100, {0.6, 0.1}) == 1.0);  // x < 2t-T
  CHECK(eval_Vn(4, {0.5, 0.5}) == doctest::Approx(kVnA4).epsilon(1e-15));
  CHECK_THROWS_AS(eval_Vn(0, {0.5, 0.5}), std::invalid_argument);

  // terminal slice is g, bit-exact
  for (int n : {3, 10, 40}) {
    for (int i = 0; i <= 200; ++i) {
      const double x = -2.0 + 4.0 * i / 200.0;
      CHECK(eval_Vn(n, {1.0, x}) == eval_terminal_g(x));
    }
  }

  // boundedness -1 <= V_n <= 1
  Rng rng(13);
  for (int i = 0; i < 5000; ++i) {
    const int n = rng.uniform_int(1, 60);
    const double vn = eval_Vn(n, {rng.uniform(0, 1), rng.uniform(-3, 3)});
    CHECK(vn >= -1.0 - 1e-15);
    CHECK(vn <= 1.0 + 1e-15);
  }
}

TEST_CASE("V_n case overlap agreement") {
  // walk the overlap boundaries |t-x| = 1/n and T-2t+x = 1/n
  for (int n : {2, 5, 10, 33}) {
    const double inv = 1.0 / n;
    for (double t = 0.02; t < 1.0; t += 0.037) {
      for (double x : {t - inv, t + inv, 2.0 * t - 1.0 + inv}) {
        const SpacetimePoint pt{t, x};
        if (x < 2.0 * t - 1.0) continue;
        CHECK(vn_case_spread(n, pt) <= 1e-9);
      }
      // crossing of both boundary families
      const double xc = t - inv;
      if (std::abs(1.0 - 2.0 * t + xc - inv) < 0.3) CHECK(vn_case_spread(n, {t, xc}) <= 1e-9);
    }
  }
  // generic points have a single applicable case
  CHECK(vn_case_spread(10, {0.5, 0.8}) == 0.0);
}

TEST_CASE("V_n monotone in n and converging to V") {
  Rng rng(17);
  for (int i = 0; i < 800; ++i) {
    const SpacetimePoint pt{rng.uniform(0, 1), rng.uniform(-2, 2)};
    double prev = -2.0;
    for (int n : {1, 2, 4, 8, 16, 32, 64}) {
      const double vn = eval_Vn(n, pt);
      CHECK(vn >= prev - 1e-12);
      prev = vn;
    }
    CHECK(prev <= eval_solution_V(pt) + 1e-12);
    // convergence with the 2/sqrt(n) envelope of the case formulas
    const double gap = std::abs(eval_Vn(4096, pt) - eval_solution_V(pt));
    CHECK(gap <= 2.2 / std::sqrt(4096.0) + 1e-12);
  }
  // exact agreement ahead of the diagonal once 1/n <= x-t
  CHECK(eval_Vn(40, {0.2, 0.3}) == eval_solution_V({0.2, 0.3}));
}

TEST_CASE("optimal trajectory selector") {
  const Trajectory fast = optimal_trajectory(0.0, 0.0);
  CHECK(fast.kind == Trajectory::Kind::FastRay);
  CHECK(fast.samples.back().x == doctest::Approx(2.0));

  const Trajectory constant = optimal_trajectory(0.9, 0.0);
  CHECK(constant.kind == Trajectory::Kind::Constant);
  CHECK(constant.samples.back().x == 0.0);

  // boundary x0 = 2 t0 - T belongs to the FastRay branch
  const Trajectory edge = optimal_trajectory(0.5, 0.0);
  CHECK(edge.kind == Trajectory::Kind::FastRay);
  CHECK(edge.samples.back().x == doctest::Approx(1.0));

  CHECK_THROWS_AS(optimal_trajectory(1.0, 0.0), std::invalid_argument);

  // speed bound along samples
  for (std::size_t k = 0; k + 1 < fast.samples.size(); ++k) {
    const auto& a = fast.samples[k];
    const auto& b = fast.samples[k + 1];
    CHECK(b.t > a.t);
    CHECK(std::abs((b.x - a.x) / (b.t - a.t)) <= 2.0 + 1e-9);
  }
}

TEST_CASE("analytic gradients") {
  const auto gU = analytic_gradient(Solution::U, {0.5, 0.75});
  REQUIRE(gU.has_value());
  CHECK(gU->pt == doctest::Approx(kPsiQuarter).epsilon(1e-15));
  CHECK(gU->px == doctest::Approx(-kPsiQuarter).epsilon(1e-15));

  const auto gU2 = analytic_gradient(Solution::U, {0.5, 0.25});
  REQUIRE(gU2.has_value());
  CHECK(gU2->pt == 0.0);
  CHECK(gU2->px == 0.0);

  CHECK(!analytic_gradient(Solution::U, {0.5, 0.5}).has_value());
  CHECK(!analytic_gradient(Solution::V, {0.5, 0.5}).has_value());
  CHECK(!analytic_gradient(Solution::V, {0.75, 0.5}).has_value());  // jump curve
  CHECK(analytic_gradient(Solution::V, {0.5, 0.25}).has_value());   // strip
  CHECK_THROWS_AS(analytic_gradient(Solution::U, {0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(analytic_gradient(Solution::U, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(23);
  const auto fU = [](SpacetimePoint z) { return eval_solution_U(z); };
  const auto fV = [](SpacetimePoint z) { return eval_solution_V(z); };
  int checked = 0;
  while (checked < 300) {
    const SpacetimePoint pt{rng.uniform(0.06, 0.94), rng.uniform(-1.5, 2.0)};
    const double dist_diag = std::abs(pt.x - pt.t);
    const double dist_jump = std::abs(pt.x - (2.0 * pt.t - 1.0));
    if (dist_diag < 0.05) continue;
    if (const auto g = analytic_gradient(Solution::U, pt)) {
      const Costate fd = fd_gradient(fU, pt);
      CHECK(std::abs(g->pt - fd.pt) <= 1e-6);
      CHECK(std::abs(g->px - fd.px) <= 1e-6);
    }
    if (dist_jump >= 0.05) {
      if (const auto g = analytic_gradient(Solution::V, pt)) {
        const Costate fd = fd_gradient(fV, pt);
        CHECK(std::abs(g->pt - fd.pt) <= 1e-6);
        CHECK(std::abs(g->px - fd.px) <= 1e-6);
      }
    }
    ++checked;
  }
}

TEST_CASE("V_n gradients match finite differences") {
  Rng rng(29);
  for (int n : {4, 10}) {
    const auto f = [n](SpacetimePoint z) { return eval_Vn(n, z); };
    int checked = 0;
    while (checked < 200) {
      const SpacetimePoint pt{rng.uniform(0.06, 0.94), rng.uniform(-1.5, 2.0)};
      if (std::abs(pt.x - (2.0 * pt.t - 1.0)) < 0.05) continue;
      const auto g = vn_gradient(n, pt);
      REQUIRE(g.has_value());
      const Costate fd = fd_gradient(f, pt);
      CHECK(std::abs(g->pt - fd.pt) <= 2e-5 * std::max(1.0, std::abs(g->pt)));
      CHECK(std::abs(g->px - fd.px) <= 2e-5 * std::max(1.0, std::abs(g->px)));
      ++checked;
    }
    CHECK(!vn_gradient(n, {0.75, 0.5}).has_value());  // jump curve
  }
}

namespace {

// liminf of f along the inbound ray z + rho e, estimated by double Richardson
// extrapolation in sqrt(rho) (the kink profiles behave like c sqrt(rho)).
double ray_liminf(const std::function<double(SpacetimePoint)>& f, SpacetimePoint z, double et,
                  double ex) {
  const double r0 = 1e-8, r1 = 1e-10, r2 = 1e-12;
  const double f0 = f({z.t + r0 * et, z.x + r0 * ex});
  const double f1 = f({z.t + r1 * et, z.x + r1 * ex});
  const double f2 = f({z.t + r2 * et, z.x + r2 * ex});
  const double a = (10.0 * f1 - f0) / 9.0;
  const double b = (10.0 * f2 - f1) / 9.0;
  return (100.0 * b - a) / 99.0;
}

}  // namespace

TEST_CASE("lower semicontinuity spot checks at kinks") {
  const double tol = 1e-9;
  // g at its jump x = T
  const auto g1 = [](SpacetimePoint z) { return eval_terminal_g(z.x); };
  CHECK(eval_terminal_g(1.0) == 0.0);
  CHECK(ray_liminf(g1, {0.0, 1.0}, 0.0, -1.0) >= eval_terminal_g(1.0) - tol);
  CHECK(ray_liminf(g1, {0.0, 1.0}, 0.0, 1.0) >= eval_terminal_g(1.0) - tol);

  const auto fU = [](SpacetimePoint z) { return eval_solution_U(z); };
  const auto fV = [](SpacetimePoint z) { return eval_solution_V(z); };
  const double rays[][2] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, 1}, {1, 2}};
  for (double t : {0.25, 0.5, 0.8}) {
    for (const auto& e : rays) {
      CHECK(ray_liminf(fU, {t, t}, e[0], e[1]) >= eval_solution_U({t, t}) - tol);
      CHECK(ray_liminf(fV, {t, t}, e[0], e[1]) >= eval_solution_V({t, t}) - tol);
    }
    // V and V_n at the jump curve. Rays tangent to the curve are skipped:
    // rounding flips such samples between the two branches, so they do not
    // represent any one approaching sequence; transversal rays cover both
    // sides.
    const double xj = 2.0 * t - 1.0;
    const double jump_rays[][2] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0},
                                   {1, 2.5}, {1, 1.5}, {-1, -1.5}};
    for (const auto& e : jump_rays) {
      CHECK(ray_liminf(fV, {t, xj}, e[0], e[1]) >= eval_solution_V({t, xj}) - tol);
      for (int n : {5, 20}) {
        const auto fn = [n](SpacetimePoint z) { return eval_Vn(n, z); };
        CHECK(ray_liminf(fn, {t, xj}, e[0], e[1]) >= eval_Vn(n, {t, xj}) - tol);
      }
    }
  }
}

TEST_CASE("sigma truncations") {
  CHECK(sigma_n(2, 0.25) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sigma_n(4, 0.25) == 0.5);  // z >= 1/n: exact sqrt
  CHECK(sigma_n(4, 0.25) == sigma(0.25));
  CHECK(sigma_n(2, 0.25) > sigma_n(3, 0.25));
  CHECK_THROWS_AS(sigma_n(0, 0.1), std::invalid_argument);
}

TEST_CASE("variant parsing") {
  CHECK(parse_variant("original") == ModelVariant::original());
  CHECK(parse_variant("hat") == ModelVariant::hat());
  CHECK(parse_variant("approx:12") == ModelVariant::approx(12));
  CHECK_THROWS_AS(parse_variant("approx:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_variant("approx:x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_variant("déjà"), std::invalid_argument);
}

TEST_CASE("horizon is a free parameter") {
  const Horizon h2{2.0};
  // gap U-V at (1.0, 0.5) with T=2: exp(-2 sqrt(0.5))
  const double gap = eval_solution_U({1.0, 0.5}, h2) - eval_solution_V({1.0, 0.5}, h2);
  CHECK(gap == doctest::Approx(std::exp(-2.0 * std::sqrt(0.5))).epsilon(1e-14));
  CHECK(eval_terminal_g(2.0, h2) == 0.0);
  CHECK(eval_solution_V({1.4, -1.0}, h2) == 1.0);  // below 2t-T = 0.8... x=-1 < 0.8
}
