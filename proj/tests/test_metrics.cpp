#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "simresnet/errors.hpp"
#include "simresnet/metrics.hpp"
#include "simresnet/rng.hpp"

using namespace simresnet;

TEST_CASE("picture_error hand cases") {
  CHECK(picture_error({{0.4}, {0.6}}, 0.5) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(picture_error({{0.5}, {0.5}}, 0.5) == 0.0);
  CHECK(picture_error({{0.2, 0.8}}, 0.5) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("picture_error detects uniform translations") {
  const double delta = 0.07;
  std::vector<Vec> outputs = {{0.6, 0.7}, {0.8, 0.9}};  // all above target
  double base = picture_error(outputs, 0.5);
  for (Vec& out : outputs)
    for (double& c : out) c += delta;
  double shifted = picture_error(outputs, 0.5);
  CHECK(shifted - base == doctest::Approx(4.0 * delta).epsilon(1e-12));
}

TEST_CASE("aggregate_errors hand cases") {
  auto [eta_bar, theta] = aggregate_errors({0.2, 0.4});
  CHECK(eta_bar == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(theta == doctest::Approx(0.01).epsilon(1e-12));

  auto [c_bar, c_var] = aggregate_errors({2.5, 2.5, 2.5});
  CHECK(c_bar == 2.5);
  CHECK(c_var == 0.0);

  auto [single, zero] = aggregate_errors({1.7});
  CHECK(single == 1.7);
  CHECK(zero == 0.0);

  CHECK_THROWS_AS(aggregate_errors({}), std::invalid_argument);
}

TEST_CASE("population variance equals mean-of-squares identity") {
  Rng rng(77, 0);
  std::vector<double> etas;
  for (int i = 0; i < 70; ++i) etas.push_back(rng.uniform(0.0, 10.0));
  auto [mean, var] = aggregate_errors(etas);
  double mean_sq = 0.0;
  for (double e : etas) mean_sq += e * e;
  mean_sq /= static_cast<double>(etas.size());
  CHECK(var == doctest::Approx(mean_sq - mean * mean).epsilon(1e-12));
}

TEST_CASE("histogram hand case and conservation") {
  Histogram h = histogram({0.0, 1.0, 2.0, 3.0}, 2);
  CHECK(h.edges[0] == 0.0);
  CHECK(h.edges[1] == doctest::Approx(1.5));
  CHECK(h.edges[2] == 3.0);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 2);

  Rng rng(8, 0);
  std::vector<double> values;
  for (int i = 0; i < 137; ++i) values.push_back(rng.uniform(-5.0, 5.0));
  h = histogram(values, 13);
  std::size_t total = 0;
  for (std::size_t c : h.counts) total += c;
  CHECK(total == values.size());
}

TEST_CASE("degenerate histogram collapses to one expanded bin") {
  Histogram h = histogram({4.2, 4.2, 4.2}, 5);
  CHECK(h.counts.size() == 1);
  CHECK(h.counts[0] == 3);
  CHECK(h.edges[0] < 4.2);
  CHECK(h.edges[1] > 4.2);
}

TEST_CASE("fit_lognormal hand cases") {
  const double e = std::exp(1.0);
  LognormalFit fit = fit_lognormal({1.0, e * e});
  CHECK(fit.mu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.s == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_lognormal({e, e, e, e}), DegenerateFitError);
  CHECK_THROWS_AS(fit_lognormal({1.0, -1.0}), std::domain_error);
  CHECK_THROWS_AS(fit_lognormal({1.0}), std::invalid_argument);
}

TEST_CASE("fit_lognormal recovers parameters from 70 draws") {
  // Monte Carlo tolerance calibrated at n=70: mu within 5%, s within 20%.
  const double mu_true = 5.5, s_true = 0.1;
  Rng rng(123, 0);
  std::vector<double> values;
  for (int i = 0; i < 70; ++i) values.push_back(std::exp(mu_true + s_true * rng.normal()));
  LognormalFit fit = fit_lognormal(values);
  CHECK(std::abs(fit.mu - mu_true) / mu_true < 0.05);
  CHECK(std::abs(fit.s - s_true) / s_true < 0.20);
}

TEST_CASE("fit_lognormal is scale-equivariant") {
  Rng rng(9, 0);
  std::vector<double> values;
  for (int i = 0; i < 40; ++i) values.push_back(std::exp(rng.uniform(1.0, 2.0)));
  LognormalFit base = fit_lognormal(values);
  const double c = 3.7;
  for (double& v : values) v *= c;
  LognormalFit scaled = fit_lognormal(values);
  CHECK(scaled.mu == doctest::Approx(base.mu + std::log(c)).epsilon(1e-12));
  CHECK(scaled.s == doctest::Approx(base.s).epsilon(1e-12));
}
