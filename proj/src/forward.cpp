#include "simresnet/forward.hpp"

#include <stdexcept>

namespace simresnet {

Vec forward_step(const Vec& state, const LayerParams& layer, double dt,
                 Activation kind, std::size_t width) {
  if (layer.weight.rows != state.size() || layer.weight.cols != state.size() ||
      layer.bias.size() != state.size())
    throw std::invalid_argument("forward_step: dimension mismatch");
  if (dt < 0.0) throw std::invalid_argument("forward_step: dt must be >= 0");
  if (width == 0) throw std::invalid_argument("forward_step: width must be positive");

  Vec pre(state.size());
  matvec_scaled_add(layer.weight, state, 1.0 / static_cast<double>(width), layer.bias, pre);
  Vec next(state.size());
  for (std::size_t i = 0; i < state.size(); ++i)
    next[i] = state[i] + dt * activation_eval(kind, pre[i]);
  return next;
}

Trajectory forward_trajectory(const Vec& x0, const Network& net) {
  if (x0.size() != net.width)
    throw std::invalid_argument("forward_trajectory: input length != network width");

  Trajectory traj;
  traj.states.reserve(net.depth() + 1);
  traj.states.push_back(x0);
  for (const LayerParams& layer : net.layers)
    traj.states.push_back(
        forward_step(traj.states.back(), layer, net.dt, net.activation, net.width));
  return traj;
}

Network refine_layers(const Network& net, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("refine_layers: factor must be >= 1");

  Network fine = net;
  fine.dt = net.dt / static_cast<double>(factor);
  fine.layers.clear();
  fine.layers.reserve(net.depth() * factor);
  for (const LayerParams& layer : net.layers)
    for (std::size_t r = 0; r < factor; ++r) fine.layers.push_back(layer);
  return fine;
}

}  // namespace simresnet
