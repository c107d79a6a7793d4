#pragma once

#include <cstddef>
#include <vector>

#include "simresnet/network.hpp"

namespace simresnet {

// Dense record of x(t_0) ... x(t_L). Kept whole because the gradient pass
// needs every intermediate state.
struct Trajectory {
  std::vector<Vec> states;

  const Vec& output() const { return states.back(); }
};

// One Euler step: state + dt * sigma((1/width) * weight * state + bias).
Vec forward_step(const Vec& state, const LayerParams& layer, double dt,
                 Activation kind, std::size_t width);

// Iterates forward_step over all layers; states[0] == x0.
Trajectory forward_trajectory(const Vec& x0, const Network& net);

// Network with factor-times more layers, dt/factor, each layer repeated
// factor times. Parameters stay piecewise-constant on the original grid.
Network refine_layers(const Network& net, std::size_t factor);

}  // namespace simresnet
