#include "simresnet/gradient.hpp"

#include <stdexcept>

namespace simresnet {

ParamGradients make_zero_gradients(const Network& net) {
  ParamGradients g;
  g.weight.assign(net.depth(), Mat(net.width, net.width));
  g.bias.assign(net.depth(), Vec(net.width, 0.0));
  return g;
}

double loss(const Vec& output, const Vec& target) {
  if (output.size() != target.size())
    throw std::invalid_argument("loss: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    double r = output[i] - target[i];
    acc += r * r;
  }
  return acc;
}

namespace detail {

void GradWorkspace::resize(std::size_t depth, std::size_t width) {
  states.assign(depth + 1, Vec(width, 0.0));
  preact.assign(depth, Vec(width, 0.0));
  lambda.assign(width, 0.0);
  dl.assign(width, 0.0);
}

double backprop_into(const Network& net, const Vec& x0, const Vec& target,
                     ParamGradients& grads, GradWorkspace& ws) {
  const std::size_t n = net.width;
  const std::size_t depth = net.depth();
  const double dt = net.dt;
  const double inv_n = 1.0 / static_cast<double>(n);

  if (x0.size() != n || target.size() != n)
    throw std::invalid_argument("backprop: dimension mismatch");
  if (ws.states.size() != depth + 1 || ws.states[0].size() != n)
    ws.resize(depth, n);

  // Forward, recording states and pre-activations.
  ws.states[0] = x0;
  for (std::size_t k = 0; k < depth; ++k) {
    const LayerParams& layer = net.layers[k];
    matvec_scaled_add(layer.weight, ws.states[k], inv_n, layer.bias, ws.preact[k]);
    for (std::size_t i = 0; i < n; ++i)
      ws.states[k + 1][i] =
          ws.states[k][i] + dt * activation_eval(net.activation, ws.preact[k][i]);
  }

  double loss_value = loss(ws.states[depth], target);

  // Adjoint: lambda(t_L) = 2 (x(t_L) - h); then walk layers backwards.
  for (std::size_t i = 0; i < n; ++i)
    ws.lambda[i] = 2.0 * (ws.states[depth][i] - target[i]);

  for (std::size_t k = depth; k-- > 0;) {
    const LayerParams& layer = net.layers[k];
    const Vec& x_k = ws.states[k];

    for (std::size_t i = 0; i < n; ++i)
      ws.dl[i] = activation_deriv(net.activation, ws.preact[k][i]) * ws.lambda[i];

    Vec& gb = grads.bias[k];
    Mat& gw = grads.weight[k];
    for (std::size_t i = 0; i < n; ++i) {
      gb[i] = dt * ws.dl[i];
      double row_scale = dt * inv_n * ws.dl[i];
      double* grow = &gw.data[i * n];
      for (std::size_t j = 0; j < n; ++j) grow[j] = row_scale * x_k[j];
    }

    // lambda(t_k) = lambda(t_{k+1}) + (dt/N) w^T (D lambda(t_{k+1}))
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += layer.weight(i, j) * ws.dl[i];
      ws.lambda[j] += dt * inv_n * acc;
    }
  }
  return loss_value;
}

}  // namespace detail

ParamGradients backprop_gradients(const Network& net, const Vec& x0,
                                  const Vec& target) {
  ParamGradients grads = make_zero_gradients(net);
  detail::GradWorkspace ws;
  detail::backprop_into(net, x0, target, grads, ws);
  return grads;
}

ParamGradients finite_diff_gradients(const Network& net, const Vec& x0,
                                     const Vec& target, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_gradients: eps must be > 0");

  Network probe = net;
  auto loss_at = [&]() {
    return loss(forward_trajectory(x0, probe).output(), target);
  };

  ParamGradients grads = make_zero_gradients(net);
  for (std::size_t k = 0; k < net.depth(); ++k) {
    for (std::size_t idx = 0; idx < probe.layers[k].weight.data.size(); ++idx) {
      double& theta = probe.layers[k].weight.data[idx];
      double saved = theta;
      theta = saved + eps;
      double up = loss_at();
      theta = saved - eps;
      double down = loss_at();
      theta = saved;
      grads.weight[k].data[idx] = (up - down) / (2.0 * eps);
    }
    for (std::size_t idx = 0; idx < probe.layers[k].bias.size(); ++idx) {
      double& theta = probe.layers[k].bias[idx];
      double saved = theta;
      theta = saved + eps;
      double up = loss_at();
      theta = saved - eps;
      double down = loss_at();
      theta = saved;
      grads.bias[k][idx] = (up - down) / (2.0 * eps);
    }
  }
  return grads;
}

}  // namespace simresnet
