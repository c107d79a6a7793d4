#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "simresnet/activation.hpp"
#include "simresnet/linalg.hpp"
#include "simresnet/rng.hpp"

namespace simresnet {

// One layer's w(t_k) in R^{NxN} and b(t_k) in R^N.
struct LayerParams {
  Mat weight;
  Vec bias;
};

// Euler-stepped residual network: L layers over t in [0, L*dt], all of
// width N, where N is a multiple of the feature count d (N == d is the
// micro-width case).
struct Network {
  std::vector<LayerParams> layers;
  double dt = 0.0;
  Activation activation = Activation::Sigmoid;
  std::size_t width = 0;        // N
  std::size_t feature_dim = 0;  // d

  std::size_t depth() const { return layers.size(); }

  // Checks all structural invariants; throws std::invalid_argument.
  void validate() const;
};

// Fresh network with parameters uniform on [-0.5, 0.5] and dt = 1/depth.
Network make_network(std::size_t feature_dim, std::size_t width_multiplier,
                     std::size_t depth, Activation activation, Rng& rng);

bool same_structure(const Network& a, const Network& b);

}  // namespace simresnet
