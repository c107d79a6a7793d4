#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "simresnet/gradient.hpp"
#include "simresnet/rng.hpp"

using namespace simresnet;

namespace {

double max_relative_error(const ParamGradients& a, const ParamGradients& b) {
  // Floor of 1e-4: below that magnitude the eps=1e-6 central difference
  // carries ~1e-10 of cancellation noise, so a pure ratio is meaningless.
  double worst = 0.0;
  auto update = [&](double x, double y) {
    double denom = std::max({std::abs(x), std::abs(y), 1e-4});
    worst = std::max(worst, std::abs(x - y) / denom);
  };
  for (std::size_t k = 0; k < a.weight.size(); ++k) {
    for (std::size_t i = 0; i < a.weight[k].data.size(); ++i)
      update(a.weight[k].data[i], b.weight[k].data[i]);
    for (std::size_t i = 0; i < a.bias[k].size(); ++i)
      update(a.bias[k][i], b.bias[k][i]);
  }
  return worst;
}

Network random_net(std::size_t d, std::size_t depth, std::uint64_t seed) {
  Rng rng(seed, rng_stream::kInit);
  return make_network(d, 1, depth, Activation::Sigmoid, rng);
}

}  // namespace

TEST_CASE("loss hand cases") {
  CHECK(loss({0.5}, {0.5}) == 0.0);
  CHECK(loss({1.0, 0.0}, {0.0, 1.0}) == 2.0);
  CHECK(loss({0.3}, {0.8}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(loss({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("loss is nonnegative and zero only at the target") {
  Rng rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec out = {rng.uniform(), rng.uniform()};
    Vec target = {rng.uniform(), rng.uniform()};
    double l = loss(out, target);
    CHECK(l >= 0.0);
    if (out != target) CHECK(l > 0.0);
  }
}

TEST_CASE("single-layer hand gradient") {
  // L=1, dt=1, N=1, sigmoid, w=0, b=0, x0=0, h=0:
  // output = 0.5, dLoss/db = 2*0.5*0.25, dLoss/dw = 0.
  Network net;
  net.width = 1;
  net.feature_dim = 1;
  net.dt = 1.0;
  net.activation = Activation::Sigmoid;
  LayerParams layer;
  layer.weight = Mat(1, 1);
  layer.bias = {0.0};
  net.layers.push_back(layer);

  ParamGradients g = backprop_gradients(net, {0.0}, {0.0});
  CHECK(g.bias[0][0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.weight[0](0, 0) == 0.0);
}

TEST_CASE("zero gradient when the output equals the target") {
  Network net = random_net(2, 4, 7);
  Vec x0 = {0.3, 0.6};
  Vec target = forward_trajectory(x0, net).output();
  ParamGradients g = backprop_gradients(net, x0, target);
  for (std::size_t k = 0; k < g.weight.size(); ++k) {
    for (double w : g.weight[k].data) CHECK(std::abs(w) < 1e-14);
    for (double b : g.bias[k]) CHECK(std::abs(b) < 1e-14);
  }
}

TEST_CASE("analytic gradients match the finite-difference oracle") {
  double worst = 0.0;
  int trial = 0;
  for (std::size_t d : {1u, 2u, 3u}) {
    for (std::size_t depth : {2u, 4u, 8u}) {
      for (int rep = 0; rep < 4; ++rep, ++trial) {
        Network net = random_net(d, depth, 100 + static_cast<std::uint64_t>(trial));
        Rng rng(200 + static_cast<std::uint64_t>(trial), 0);
        Vec x0(d), target(d);
        for (double& x : x0) x = rng.uniform();
        for (double& h : target) h = rng.uniform();
        ParamGradients analytic = backprop_gradients(net, x0, target);
        ParamGradients numeric = finite_diff_gradients(net, x0, target, 1e-6);
        worst = std::max(worst, max_relative_error(analytic, numeric));
      }
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("finite differences converge quadratically on smooth cases") {
  Network net = random_net(2, 4, 42);
  Rng rng(43, 0);
  Vec x0 = {rng.uniform(), rng.uniform()};
  Vec target = {rng.uniform(), rng.uniform()};
  ParamGradients exact = backprop_gradients(net, x0, target);

  auto disagreement = [&](double eps) {
    return max_relative_error(exact, finite_diff_gradients(net, x0, target, eps));
  };
  // Large eps so truncation (quadratic in eps) dominates roundoff.
  double coarse = disagreement(1e-2);
  double fine = disagreement(5e-3);
  CHECK(fine < coarse);
  CHECK(fine <= coarse / 4.0 * 1.5);  // ~quadratic, 50% slack
}

TEST_CASE("zero-gradient case reproduces zeros at the oracle too") {
  Network net = random_net(1, 2, 9);
  Vec x0 = {0.4};
  Vec target = forward_trajectory(x0, net).output();
  ParamGradients numeric = finite_diff_gradients(net, x0, target, 1e-6);
  for (std::size_t k = 0; k < numeric.weight.size(); ++k) {
    for (double w : numeric.weight[k].data) CHECK(std::abs(w) < 1e-9);
    for (double b : numeric.bias[k]) CHECK(std::abs(b) < 1e-9);
  }
}
