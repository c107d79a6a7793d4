#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "simresnet/errors.hpp"
#include "simresnet/rng.hpp"
#include "simresnet/shakedown.hpp"

using namespace simresnet;

namespace {

ShakedownInstance single_point(std::vector<StressVec> vertices, double sigma_y,
                               bool pin_residual) {
  ShakedownInstance inst;
  inst.points.push_back({std::move(vertices), sigma_y});
  if (pin_residual) {
    inst.equilibrium.rows = Mat(3, 3);
    for (std::size_t i = 0; i < 3; ++i) inst.equilibrium.rows(i, i) = 1.0;
  } else {
    inst.equilibrium.rows = Mat(0, 3);
  }
  return inst;
}

double min_nonzero_vm(const ShakedownInstance& inst) {
  double ms = 1e300;
  for (const auto& pt : inst.points)
    for (const auto& se : pt.elastic_stress) {
      double vm = von_mises(se);
      if (vm > 0.0) ms = std::min(ms, vm);
    }
  return ms;
}

}  // namespace

TEST_CASE("von mises hand cases") {
  CHECK(von_mises({100.0, 0.0, 0.0}) == doctest::Approx(100.0));
  CHECK(von_mises({85.0, 85.0, 0.0}) == doctest::Approx(85.0));
  CHECK(von_mises({0.0, 0.0, 10.0}) == doctest::Approx(10.0 * std::sqrt(3.0)));
}

TEST_CASE("von mises is positively homogeneous and convex") {
  Rng rng(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    StressVec a{rng.uniform(-200, 200), rng.uniform(-200, 200), rng.uniform(-120, 120)};
    StressVec b{rng.uniform(-200, 200), rng.uniform(-200, 200), rng.uniform(-120, 120)};
    double c = rng.uniform(0.0, 3.0);
    CHECK(von_mises({c * a.sxx, c * a.syy, c * a.txy}) ==
          doctest::Approx(c * von_mises(a)).epsilon(1e-12));
    double t = rng.uniform();
    StressVec mix{t * a.sxx + (1 - t) * b.sxx, t * a.syy + (1 - t) * b.syy,
                  t * a.txy + (1 - t) * b.txy};
    CHECK(von_mises(mix) <= t * von_mises(a) + (1 - t) * von_mises(b) + 1e-9);
  }
}

TEST_CASE("alpha zero is immediately feasible with a zero residual") {
  ShakedownInstance inst = single_point({{100, 0, 0}}, 250.0, false);
  auto rho = feasible(inst, 0.0, 1e-6, 10);
  REQUIRE(rho.has_value());
  CHECK(rho->size() == 1);
  CHECK((*rho)[0].sxx == 0.0);
}

TEST_CASE("pulsating uniaxial feasibility matches the analytic bound") {
  ShakedownInstance inst = single_point({{0, 0, 0}, {100, 0, 0}}, 250.0, false);
  double tol = default_feasibility_tol(inst);
  // alpha = 4.9: rho = (-245, 0, 0) certifies feasibility
  auto rho = feasible(inst, 4.9, tol, 10000);
  CHECK(rho.has_value());
  // alpha = 5.1: range 510 exceeds 2 sigma_Y, infeasible
  auto none = feasible(inst, 5.1, tol, 10000);
  CHECK(!none.has_value());
}

TEST_CASE("feasible certificates pass the independent re-check") {
  ShakedownInstance inst = single_point({{0, 0, 0}, {80, 30, 15}}, 220.0, false);
  double tol = default_feasibility_tol(inst);
  auto rho = feasible(inst, 2.0, tol, 10000);
  REQUIRE(rho.has_value());
  CHECK(check_certificate(inst, 2.0, *rho).passes(tol));
}

TEST_CASE("elastic-limit instance: forced zero residual") {
  ShakedownInstance inst = single_point({{100, 0, 0}}, 250.0, true);
  ShakedownSolution sol = shakedown_factor(inst);
  CHECK(std::abs(sol.alpha - 2.5) / 2.5 <= 1e-3);
  CHECK(std::abs(sol.residual[0].sxx) <= 1e-9);
  CHECK(check_certificate(inst, sol.alpha, sol.residual)
            .passes(default_feasibility_tol(inst)));
}

TEST_CASE("pulsating uniaxial instance reaches 2 sigma_Y / sigma") {
  ShakedownInstance inst = single_point({{0, 0, 0}, {100, 0, 0}}, 250.0, false);
  ShakedownSolution sol = shakedown_factor(inst);
  CHECK(std::abs(sol.alpha - 5.0) <= 1e-2);
  CHECK(check_certificate(inst, sol.alpha, sol.residual)
            .passes(default_feasibility_tol(inst)));
}

TEST_CASE("alpha scales inversely with the elastic stresses") {
  ShakedownInstance inst = single_point({{0, 0, 0}, {60, 25, -10}}, 240.0, false);
  ShakedownSolution base = shakedown_factor(inst);

  const double c = 2.5;
  ShakedownInstance scaled = inst;
  for (StressVec& se : scaled.points[0].elastic_stress) {
    se.sxx *= c;
    se.syy *= c;
    se.txy *= c;
  }
  ShakedownSolution after = shakedown_factor(scaled);
  CHECK(std::abs(after.alpha - base.alpha / c) <= 2e-3 * base.alpha / c + 2e-3);
}

TEST_CASE("feasibility is monotone in alpha") {
  ShakedownInstance inst = single_point({{0, 0, 0}, {90, -40, 20}}, 260.0, false);
  double tol = default_feasibility_tol(inst);
  ShakedownSolution sol = shakedown_factor(inst);
  for (double frac : {0.2, 0.5, 0.9}) {
    auto rho = feasible(inst, frac * sol.alpha, tol, 10000);
    CHECK(rho.has_value());
  }
}

TEST_CASE("all-zero elastic stresses are an unbounded-alpha error") {
  ShakedownInstance inst = single_point({{0, 0, 0}}, 250.0, false);
  CHECK_THROWS_AS(shakedown_factor(inst), UnboundedAlphaError);
}

TEST_CASE("brute force scope checks") {
  ShakedownInstance big;
  for (int i = 0; i < 3; ++i) big.points.push_back({{{100, 0, 0}}, 250.0});
  big.equilibrium.rows = Mat(0, 9);
  CHECK_THROWS_AS(brute_force_factor(big, 10.0), OracleScopeError);

  ShakedownInstance coupled = single_point({{100, 0, 0}}, 250.0, false);
  coupled.equilibrium.rows = Mat(1, 3);
  coupled.equilibrium.rows(0, 0) = 1.0;
  coupled.equilibrium.rows(0, 1) = -1.0;  // couples two components
  CHECK_THROWS_AS(brute_force_factor(coupled, 10.0), OracleScopeError);
}

TEST_CASE("brute force agrees with the solver on the derived instances") {
  ShakedownInstance elastic = single_point({{100, 0, 0}}, 250.0, true);
  double oracle = brute_force_factor(elastic, 5.0);
  CHECK(std::abs(oracle - 2.5) <= 1e-9);  // pinned residual: exact

  ShakedownInstance pulsating = single_point({{0, 0, 0}, {100, 0, 0}}, 250.0, false);
  oracle = brute_force_factor(pulsating, 5.0);
  ShakedownSolution sol = shakedown_factor(pulsating);
  double band = 2.0 * 5.0 / min_nonzero_vm(pulsating) + 2e-3 * sol.alpha;
  CHECK(std::abs(oracle - sol.alpha) <= band);
}

TEST_CASE("brute force grid refinement never loses more than a step") {
  ShakedownInstance inst = single_point({{0, 0, 0}, {120, 40, 0}}, 250.0, false);
  double coarse = brute_force_factor(inst, 20.0);
  double fine = brute_force_factor(inst, 10.0);
  CHECK(fine >= coarse - 20.0 / min_nonzero_vm(inst));
  // oracle never exceeds twice the elastic limit on pulsating loads
  double elastic_limit = 250.0 / von_mises({120, 40, 0});
  CHECK(coarse <= 2.0 * elastic_limit + 1e-9);
  CHECK(fine <= 2.0 * elastic_limit + 1e-9);
}

TEST_CASE("solver tracks the brute force oracle on random tiny instances") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(900 + seed, 0);
    ShakedownInstance inst;
    std::size_t ng = 1 + rng.next() % 2;
    for (std::size_t i = 0; i < ng; ++i) {
      GaussPointData pt;
      pt.elastic_stress.push_back({0, 0, 0});
      pt.elastic_stress.push_back({rng.uniform(-150, 150), rng.uniform(-150, 150),
                                   rng.uniform(-90, 90)});
      pt.yield_strength = rng.uniform(150, 350);
      inst.points.push_back(pt);
    }
    std::vector<std::size_t> pins;
    for (std::size_t c = 0; c < 3 * ng; ++c)
      if (rng.uniform() < 0.25) pins.push_back(c);
    inst.equilibrium.rows = Mat(pins.size(), 3 * ng);
    for (std::size_t r = 0; r < pins.size(); ++r)
      inst.equilibrium.rows(r, pins[r]) = 1.0;

    ShakedownSolution sol = shakedown_factor(inst);
    const double grid_step = 4.0;
    double oracle = brute_force_factor(inst, grid_step);
    double band = 2.0 * grid_step / min_nonzero_vm(inst) + 2e-3 * sol.alpha;
    CAPTURE(seed);
    CHECK(std::abs(sol.alpha - oracle) <= band);
    CHECK(check_certificate(inst, sol.alpha, sol.residual)
              .passes(default_feasibility_tol(inst)));
    ++checked;
  }
  CHECK(checked == 8);
}
