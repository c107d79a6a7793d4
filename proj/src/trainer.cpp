#include "simresnet/trainer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "simresnet/errors.hpp"
#include "simresnet/forward.hpp"
#include "simresnet/metrics.hpp"
#include "simresnet/rng.hpp"

namespace simresnet {

namespace {

std::size_t multiplier_for(const Network& net, const PictureSample& picture) {
  if (picture.feature_dim() == 0 || net.width % picture.feature_dim() != 0)
    throw std::invalid_argument("network width is not a multiple of the picture's feature count");
  return net.width / picture.feature_dim();
}

// One epoch, in place; returns the mean pre-update loss over measurements.
double run_epoch(Network& net, const PictureSample& picture, double learning_rate,
                 std::span<const std::size_t> order, ParamGradients& grads,
                 detail::GradWorkspace& ws) {
  const std::size_t wm = multiplier_for(net, picture);
  const Vec target(net.width, picture.target);

  double total = 0.0;
  for (std::size_t row : order) {
    Vec x0 = lift_input(picture.features, row, wm);
    total += detail::backprop_into(net, x0, target, grads, ws);
    for (std::size_t k = 0; k < net.depth(); ++k) {
      LayerParams& layer = net.layers[k];
      const Mat& gw = grads.weight[k];
      const Vec& gb = grads.bias[k];
      for (std::size_t idx = 0; idx < gw.data.size(); ++idx)
        layer.weight.data[idx] -= learning_rate * gw.data[idx];
      for (std::size_t i = 0; i < gb.size(); ++i)
        layer.bias[i] -= learning_rate * gb[i];
    }
  }
  return total / static_cast<double>(order.size());
}

std::vector<std::size_t> natural_order(std::size_t count) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

}  // namespace

Vec lift_input(const Mat& features, std::size_t row, std::size_t width_multiplier) {
  Vec x(features.cols * width_multiplier);
  for (std::size_t f = 0; f < features.cols; ++f)
    for (std::size_t r = 0; r < width_multiplier; ++r)
      x[f * width_multiplier + r] = features(row, f);
  return x;
}

Network sgd_epoch(Network net, const PictureSample& picture, double learning_rate,
                  std::span<const std::size_t> order) {
  ParamGradients grads = make_zero_gradients(net);
  detail::GradWorkspace ws;
  run_epoch(net, picture, learning_rate, order, grads, ws);
  return net;
}

Network sgd_epoch(Network net, const PictureSample& picture, double learning_rate) {
  std::vector<std::size_t> order = natural_order(picture.measurement_count());
  return sgd_epoch(std::move(net), picture, learning_rate, order);
}

TrainReport train(const PictureSample& picture, const TrainConfig& cfg) {
  if (picture.measurement_count() == 0)
    throw std::invalid_argument("train: picture has no measurements");

  Rng init_rng(cfg.seed, rng_stream::kInit);
  TrainReport report;
  report.net = make_network(picture.feature_dim(), cfg.width_multiplier, cfg.depth,
                            cfg.activation, init_rng);

  std::vector<std::size_t> order = natural_order(picture.measurement_count());
  Rng shuffle_rng(cfg.seed, rng_stream::kShuffle);
  shuffle_rng.shuffle(order);

  ParamGradients grads = make_zero_gradients(report.net);
  detail::GradWorkspace ws;

  report.stop_reason = StopReason::IterationCap;
  for (std::size_t epoch = 0; epoch < cfg.max_iterations; ++epoch) {
    double mean_loss =
        run_epoch(report.net, picture, cfg.learning_rate, order, grads, ws);
    if (!std::isfinite(mean_loss))
      throw TrainingDivergedError(
          "training diverged at epoch " + std::to_string(epoch + 1), epoch + 1);
    report.loss_history.push_back(mean_loss);
    if (report.loss_history.size() > kPlateauWindow) {
      double before = report.loss_history[report.loss_history.size() - 1 - kPlateauWindow];
      if (before - mean_loss < kPlateauImprovement) {
        report.stop_reason = StopReason::Plateau;
        break;
      }
    }
  }
  report.iterations_used = report.loss_history.size();
  return report;
}

Network train_averaged(const std::vector<PictureSample>& pictures,
                       const TrainConfig& cfg) {
  if (pictures.empty()) throw std::invalid_argument("train_averaged: empty picture list");
  if (pictures.size() != cfg.averaging_count)
    throw std::invalid_argument("train_averaged: list length != cfg.averaging_count");

  Network mean = train(pictures.front(), cfg).net;
  for (std::size_t p = 1; p < pictures.size(); ++p) {
    Network member = train(pictures[p], cfg).net;
    if (!same_structure(mean, member))
      throw std::invalid_argument("train_averaged: member networks differ in structure");
    for (std::size_t k = 0; k < mean.depth(); ++k) {
      for (std::size_t idx = 0; idx < mean.layers[k].weight.data.size(); ++idx)
        mean.layers[k].weight.data[idx] += member.layers[k].weight.data[idx];
      for (std::size_t i = 0; i < mean.layers[k].bias.size(); ++i)
        mean.layers[k].bias[i] += member.layers[k].bias[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(pictures.size());
  for (LayerParams& layer : mean.layers) {
    for (double& w : layer.weight.data) w *= inv;
    for (double& b : layer.bias) b *= inv;
  }
  return mean;
}

std::size_t select_depth(const std::vector<PictureSample>& pictures_train,
                         const std::vector<PictureSample>& pictures_val,
                         const std::vector<std::size_t>& candidate_depths,
                         const TrainConfig& cfg) {
  if (candidate_depths.empty())
    throw std::invalid_argument("select_depth: no candidate depths");
  if (pictures_train.empty() || pictures_val.empty())
    throw std::invalid_argument("select_depth: empty train or validation set");

  double best_error = 0.0;
  std::size_t best_depth = 0;
  bool first = true;
  for (std::size_t depth : candidate_depths) {
    TrainConfig candidate_cfg = cfg;
    candidate_cfg.depth = depth;
    candidate_cfg.averaging_count = pictures_train.size();
    Network net = pictures_train.size() == 1
                      ? train(pictures_train.front(), candidate_cfg).net
                      : train_averaged(pictures_train, candidate_cfg);
    double err = 0.0;
    for (const PictureSample& pic : pictures_val) err += picture_eta(net, pic);
    err /= static_cast<double>(pictures_val.size());
    if (first || err < best_error || (err == best_error && depth < best_depth)) {
      best_error = err;
      best_depth = depth;
      first = false;
    }
  }
  return best_depth;
}

double picture_eta(const Network& net, const PictureSample& picture) {
  const std::size_t wm = multiplier_for(net, picture);
  std::vector<Vec> outputs;
  outputs.reserve(picture.measurement_count());
  for (std::size_t row = 0; row < picture.measurement_count(); ++row)
    outputs.push_back(
        forward_trajectory(lift_input(picture.features, row, wm), net).output());
  return picture_error(outputs, picture.target);
}

double predict_limit(const Network& net, const PictureSample& picture,
                     const NormalizationTransform& transform) {
  const std::size_t wm = multiplier_for(net, picture);
  double mean = 0.0;
  for (std::size_t row = 0; row < picture.measurement_count(); ++row) {
    const Vec out =
        forward_trajectory(lift_input(picture.features, row, wm), net).output();
    for (double component : out) mean += component;
  }
  mean /= static_cast<double>(picture.measurement_count() * net.width);
  return transform.denormalize_target(mean);
}

Network make_wide(std::size_t feature_dim, std::size_t width_multiplier,
                  const TrainConfig& cfg) {
  Rng init_rng(cfg.seed, rng_stream::kInit);
  return make_network(feature_dim, width_multiplier, cfg.depth, cfg.activation, init_rng);
}

}  // namespace simresnet
