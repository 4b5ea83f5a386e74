#include "doctest.h"

#include <cmath>
#include <vector>

#include "hjb/conjugate.hpp"
#include "hjb/random.hpp"

using namespace hjb;

TEST_CASE("grid nodes are endpoint-exact") {
  const Grid1D g(-2.0, 2.0, 4001);
  CHECK(g.node(0) == -2.0);
  CHECK(g.node(4000) == 2.0);
  CHECK(g.node(2000) == 0.0);
  CHECK_THROWS_AS(Grid1D(1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("discrete conjugate of the Lagrangian recovers H") {
  const auto orig = ModelVariant::original();
  const Grid1D v_grid(-2.0, 2.0, 4001);
  const SpacetimePoint pt{0.75, 0.25};
  const auto samples = sample_lagrangian(pt, v_grid, orig);

  // frozen: H(0.75, 0.25, 1) = 2 - 1/phi = 1.6561810169232762
  const double conj = discrete_conjugate(samples, 1.0);
  CHECK(std::abs(conj - 1.6561810169232762) <= 1e-3);  // spec-level tolerance
  CHECK(std::abs(conj - eval_hamiltonian(pt, 1.0, orig)) <= 1e-12);

  // diagonal: only v = 0 is finite, conjugate is identically 0
  const auto diag = sample_lagrangian({0.4, 0.4}, v_grid, orig);
  CHECK(discrete_conjugate(diag, 3.7) == 0.0);
  CHECK(discrete_conjugate(diag, -11.0) == 0.0);

  // constant-zero function on [-1,1], slope 0
  std::vector<FunctionSample> zeros;
  const Grid1D unit(-1.0, 1.0, 101);
  for (int i = 0; i < unit.count; ++i) zeros.push_back({unit.node(i), ExtendedReal(0.0)});
  CHECK(discrete_conjugate(zeros, 0.0) == 0.0);

  // improper input: all samples +infinity
  std::vector<FunctionSample> improper = {{0.0, ExtendedReal::infinity()},
                                          {1.0, ExtendedReal::infinity()}};
  CHECK_THROWS_AS(discrete_conjugate(improper, 1.0), std::invalid_argument);
}

TEST_CASE("duality gap reports") {
  const Grid1D p_grid(-5.0, 5.0, 1001);
  const Grid1D v_grid(-2.0, 2.0, 4001);

  const auto rep = duality_gap({0.75, 0.25}, p_grid, v_grid, ModelVariant::original());
  CHECK(rep.sup_abs_gap <= 1e-2);
  CHECK(rep.sup_abs_gap <= rep.theoretical_bound);
  CHECK(rep.slope_grid.count == p_grid.count);
  CHECK(rep.sample_grid.count == v_grid.count);

  const auto diag = duality_gap({0.4, 0.4}, p_grid, v_grid, ModelVariant::original());
  CHECK(diag.sup_abs_gap == 0.0);

  const auto apx = duality_gap({0.75, 0.25}, p_grid, v_grid, ModelVariant::approx(10));
  CHECK(apx.sup_abs_gap <= 1e-2);
}

TEST_CASE("duality gap monotone under nested v-grid refinement") {
  const Grid1D p_grid(-5.0, 5.0, 401);
  const SpacetimePoint pt{0.6, 0.15};
  double prev = -1.0;
  for (int count : {501, 1001, 2001}) {  // nested: 2(n-1)+1
    const auto rep = duality_gap(pt, p_grid, Grid1D(-2.0, 2.0, count), ModelVariant::original());
    if (prev >= 0.0) CHECK(rep.sup_abs_gap <= prev + 1e-12);
    prev = rep.sup_abs_gap;
  }
}

TEST_CASE("discrete conjugate is convex in the slope") {
  Rng rng(31);
  const Grid1D v_grid(-2.0, 2.0, 801);
  const auto samples = sample_lagrangian({0.7, 0.2}, v_grid, ModelVariant::original());
  for (int i = 0; i < 500; ++i) {
    const double p = rng.uniform(-6, 6), q = rng.uniform(-6, 6);
    const double mid = discrete_conjugate(samples, 0.5 * (p + q));
    const double avg =
        0.5 * (discrete_conjugate(samples, p) + discrete_conjugate(samples, q));
    CHECK(mid <= avg + 1e-12);
  }
}

TEST_CASE("biconjugate recovers L on the effective domain") {
  const SpacetimePoint pt{0.75, 0.25};
  const auto orig = ModelVariant::original();
  const Grid1D v_probe(-1.9, 1.9, 191);
  const Grid1D p_grid(-10.0, 10.0, 4001);

  const auto rep = biconjugate_gap(pt, v_probe, p_grid, orig);
  CHECK(rep.sup_abs_gap <= 1e-2);

  // v = 0 recovered exactly: H >= 0 with H(.,0) = 0 forces sup_p(0 - H) = 0;
  // the +-0.5 companions carry the usual kink-node discretization error
  const Grid1D just_zero(-0.5, 0.5, 3);  // nodes -0.5, 0, 0.5
  const auto rep0 = biconjugate_gap(pt, just_zero, p_grid, orig);
  CHECK(rep0.sup_abs_gap <= 1e-2);
  double rec0 = -1e300;
  for (int i = 0; i < p_grid.count; ++i)
    rec0 = std::max(rec0, 0.0 * p_grid.node(i) - eval_hamiltonian(pt, p_grid.node(i), orig));
  CHECK(rec0 == 0.0);

  // diagonal point: only v = 0 is informative and it recovers L = 0
  const auto repd = biconjugate_gap({0.4, 0.4}, just_zero, p_grid, orig);
  CHECK(repd.sup_abs_gap == 0.0);
}

TEST_CASE("biconjugate widens a too-small window once") {
  const SpacetimePoint pt{0.75, 0.25};  // kink at |p| = 1/(2 phi) ~ 0.172
  const Grid1D v_probe(-1.0, 1.0, 21);
  // [-0.1, 0.1] misses the kink; one 4x widening reaches [-0.4, 0.4]
  const auto rep = biconjugate_gap(pt, v_probe, Grid1D(-0.1, 0.1, 201), ModelVariant::original());
  CHECK(rep.sup_abs_gap <= 1e-2);

  // near-diagonal point has 1/(2 phi) ~ 49: widening once is not enough
  CHECK_THROWS_AS(biconjugate_gap({0.5, 0.5 + 1e-4}, v_probe, Grid1D(-0.001, 0.001, 11),
                                  ModelVariant::original()),
                  std::runtime_error);
}

TEST_CASE("discrete biconjugate diverges outside the speed bound") {
  // for |v| > 2 the conjugate of H grows like (|v|-2) p_max: L = +infinity
  const SpacetimePoint pt{0.75, 0.25};
  const auto orig = ModelVariant::original();
  double prev = -1e300;
  for (double P : {10.0, 20.0, 40.0}) {
    const Grid1D window(-P, P, 2001);
    double best = -1e300;
    for (int i = 0; i < window.count; ++i) {
      const double p = window.node(i);
      best = std::max(best, 2.5 * p - eval_hamiltonian(pt, p, orig));
    }
    CHECK(best >= 0.5 * P - 1.0);
    CHECK(best > prev);
    prev = best;
  }
}
