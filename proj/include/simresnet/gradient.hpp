#pragma once

#include <cstddef>
#include <vector>

#include "simresnet/forward.hpp"
#include "simresnet/network.hpp"

namespace simresnet {

// Per-layer dLoss/dw(t_k) and dLoss/db(t_k), shaped like Network::layers.
struct ParamGradients {
  std::vector<Mat> weight;
  std::vector<Vec> bias;
};

ParamGradients make_zero_gradients(const Network& net);

// Squared L2 distance sum_n (output_n - target_n)^2.
double loss(const Vec& output, const Vec& target);

namespace detail {

// Scratch buffers so the training loop does not allocate per measurement.
struct GradWorkspace {
  std::vector<Vec> states;
  std::vector<Vec> preact;
  Vec lambda;
  Vec dl;

  void resize(std::size_t depth, std::size_t width);
};

// Reverse accumulation through the residual recursion. Returns the loss at
// the current parameters; grads must already have the network's shapes.
double backprop_into(const Network& net, const Vec& x0, const Vec& target,
                     ParamGradients& grads, GradWorkspace& ws);

}  // namespace detail

// Exact gradient of loss(forward_trajectory(x0, net).output, target) with
// respect to every weight and bias.
ParamGradients backprop_gradients(const Network& net, const Vec& x0,
                                  const Vec& target);

// Central-difference oracle: (loss(theta+eps) - loss(theta-eps)) / (2 eps)
// per scalar parameter. Verification only; independent of the adjoint path.
ParamGradients finite_diff_gradients(const Network& net, const Vec& x0,
                                     const Vec& target, double eps);

}  // namespace simresnet
