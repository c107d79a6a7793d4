#include "simresnet/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simresnet {

void Network::validate() const {
  if (layers.empty()) throw std::invalid_argument("network: depth must be >= 1");
  if (width == 0) throw std::invalid_argument("network: width must be positive");
  if (feature_dim == 0 || width % feature_dim != 0)
    throw std::invalid_argument("network: width must be a positive multiple of feature_dim");
  if (!(dt > 0.0)) throw std::invalid_argument("network: dt must be positive");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const LayerParams& layer = layers[k];
    if (layer.weight.rows != width || layer.weight.cols != width ||
        layer.bias.size() != width)
      throw std::invalid_argument("network: layer " + std::to_string(k) +
                                  " has mismatched shapes");
    for (double w : layer.weight.data)
      if (!std::isfinite(w))
        throw std::invalid_argument("network: non-finite weight in layer " +
                                    std::to_string(k));
    for (double b : layer.bias)
      if (!std::isfinite(b))
        throw std::invalid_argument("network: non-finite bias in layer " +
                                    std::to_string(k));
  }
}

Network make_network(std::size_t feature_dim, std::size_t width_multiplier,
                     std::size_t depth, Activation activation, Rng& rng) {
  if (feature_dim == 0) throw std::invalid_argument("make_network: feature_dim must be positive");
  if (width_multiplier == 0) throw std::invalid_argument("make_network: width_multiplier must be positive");
  if (depth == 0) throw std::invalid_argument("make_network: depth must be positive");

  Network net;
  net.activation = activation;
  net.feature_dim = feature_dim;
  net.width = feature_dim * width_multiplier;
  net.dt = 1.0 / static_cast<double>(depth);
  net.layers.resize(depth);
  for (LayerParams& layer : net.layers) {
    layer.weight = Mat(net.width, net.width);
    layer.bias.assign(net.width, 0.0);
    for (double& w : layer.weight.data) w = rng.uniform(-0.5, 0.5);
    for (double& b : layer.bias) b = rng.uniform(-0.5, 0.5);
  }
  return net;
}

bool same_structure(const Network& a, const Network& b) {
  return a.depth() == b.depth() && a.width == b.width &&
         a.feature_dim == b.feature_dim && a.dt == b.dt &&
         a.activation == b.activation;
}

}  // namespace simresnet
