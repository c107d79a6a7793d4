#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "simresnet/data_io.hpp"
#include "simresnet/errors.hpp"
#include "simresnet/forward.hpp"
#include "simresnet/trainer.hpp"

using namespace simresnet;

namespace {

PictureSample normalized_picture(const std::string& id, std::vector<double> values,
                                 double target) {
  PictureSample pic;
  pic.picture_id = id;
  pic.group = Group::V;
  pic.feature_names = {feature::kFeret};
  pic.features = Mat(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) pic.features(i, 0) = values[i];
  pic.target = target;
  return pic;
}

bool networks_equal(const Network& a, const Network& b) {
  if (!same_structure(a, b)) return false;
  for (std::size_t k = 0; k < a.depth(); ++k) {
    if (a.layers[k].weight.data != b.layers[k].weight.data) return false;
    if (a.layers[k].bias != b.layers[k].bias) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("lift_input replicates features blockwise") {
  Mat features(1, 2);
  features(0, 0) = 3.0;
  features(0, 1) = 7.0;
  Vec lifted = lift_input(features, 0, 2);
  CHECK(lifted == Vec{3.0, 3.0, 7.0, 7.0});
  CHECK(lift_input(features, 0, 1) == Vec{3.0, 7.0});
}

TEST_CASE("sgd_epoch with zero learning rate is the identity") {
  PictureSample pic = normalized_picture("p", {0.2, 0.5, 0.8}, 0.6);
  Rng rng(5, rng_stream::kInit);
  Network net = make_network(1, 1, 4, Activation::Sigmoid, rng);
  Network after = sgd_epoch(net, pic, 0.0);
  CHECK(networks_equal(net, after));
}

TEST_CASE("single-measurement epoch equals one gradient step (hand case)") {
  // L=1 hand case: w=0, b=0, x0=0, h=0; dLoss/db = 0.25, so with xi=0.1
  // the bias becomes -0.025.
  Network net;
  net.width = 1;
  net.feature_dim = 1;
  net.dt = 1.0;
  net.activation = Activation::Sigmoid;
  LayerParams layer;
  layer.weight = Mat(1, 1);
  layer.bias = {0.0};
  net.layers.push_back(layer);

  PictureSample pic = normalized_picture("p", {0.0}, 0.0);
  Network after = sgd_epoch(net, pic, 0.1);
  CHECK(after.layers[0].bias[0] == doctest::Approx(-0.025).epsilon(1e-15));
  CHECK(after.layers[0].weight(0, 0) == 0.0);
}

TEST_CASE("train is reproducible and honors the iteration cap") {
  PictureSample pic = normalized_picture("p", {0.1, 0.3, 0.5}, 0.7);
  TrainConfig cfg;
  cfg.max_iterations = 40;
  cfg.seed = 9;

  TrainReport a = train(pic, cfg);
  TrainReport b = train(pic, cfg);
  CHECK(a.iterations_used == b.iterations_used);
  CHECK(a.loss_history == b.loss_history);
  CHECK(networks_equal(a.net, b.net));
  CHECK(a.iterations_used <= 40);
  CHECK(!a.loss_history.empty());
}

TEST_CASE("train stops on plateau when the output already matches") {
  // Zero-parameter sigmoid net moves every input by L*dt*sigmoid(~0); target
  // chosen equal to the untrained output so gradients start near zero.
  PictureSample pic = normalized_picture("p", {0.25}, 0.0);
  TrainConfig cfg;
  cfg.seed = 4;
  cfg.depth = 4;
  cfg.learning_rate = 0.0;  // fixed point regardless of picture
  TrainReport report = train(pic, cfg);
  CHECK(report.stop_reason == StopReason::Plateau);
  CHECK(report.iterations_used == kPlateauWindow + 1);
}

TEST_CASE("training diverges loudly at an absurd learning rate") {
  // Target far above the reachable output so the first update pushes a
  // weight to ~+1e150; the unbounded ReLU then overflows the next forward.
  PictureSample pic = normalized_picture("p", {1.0}, 5.0);
  TrainConfig cfg;
  cfg.learning_rate = 1e150;
  cfg.activation = Activation::ReLU;
  cfg.seed = 20;
  cfg.max_iterations = 50;
  bool diverged = false;
  std::size_t at_iteration = 0;
  try {
    train(pic, cfg);
  } catch (const TrainingDivergedError& e) {
    diverged = true;
    at_iteration = e.iteration();
  }
  CHECK(diverged);
  CHECK(at_iteration >= 1);
}

TEST_CASE("train_averaged degenerate cases") {
  PictureSample pic = normalized_picture("p", {0.2, 0.4}, 0.6);
  TrainConfig cfg;
  cfg.seed = 3;
  cfg.max_iterations = 30;

  cfg.averaging_count = 1;
  Network averaged = train_averaged({pic}, cfg);
  CHECK(networks_equal(averaged, train(pic, cfg).net));

  cfg.averaging_count = 3;
  Network triple = train_averaged({pic, pic, pic}, cfg);
  CHECK(networks_equal(triple, train(pic, cfg).net));

  CHECK_THROWS_AS(train_averaged({}, cfg), std::invalid_argument);
}

TEST_CASE("select_depth picks the validation winner") {
  auto corpus = gen_synthetic(default_group_spec(Group::V), 4, 40, 17);
  auto sel = select_features(corpus, {feature::kFeret});
  auto [normalized, tr] = normalize(sel);

  TrainConfig cfg;
  cfg.seed = 2;
  cfg.max_iterations = 120;

  std::vector<PictureSample> train_pics = {normalized[0]};
  std::vector<PictureSample> val_pics = {normalized[1], normalized[2]};

  CHECK(select_depth(train_pics, val_pics, {6}, cfg) == 6);

  std::vector<std::size_t> candidates = {2, 4, 8};
  std::size_t best = select_depth(train_pics, val_pics, candidates, cfg);
  double best_err = 0.0;
  bool found = false;
  for (std::size_t depth : candidates) {
    TrainConfig c = cfg;
    c.depth = depth;
    Network net = train(train_pics[0], c).net;
    double err = 0.0;
    for (const auto& pic : val_pics) err += picture_eta(net, pic);
    if (depth == best) {
      best_err = err;
      found = true;
    }
  }
  REQUIRE(found);
  for (std::size_t depth : candidates) {
    TrainConfig c = cfg;
    c.depth = depth;
    Network net = train(train_pics[0], c).net;
    double err = 0.0;
    for (const auto& pic : val_pics) err += picture_eta(net, pic);
    CHECK(best_err <= err + 1e-12);
  }
}

TEST_CASE("predict_limit denormalizes the mean output") {
  // Zero weights, relu: the network output equals the input. Mean of
  // normalized inputs {0.4, 0.6} is 0.5; target range [200, 400] gives 300.
  Network net;
  net.width = 1;
  net.feature_dim = 1;
  net.dt = 1.0;
  net.activation = Activation::ReLU;
  LayerParams layer;
  layer.weight = Mat(1, 1);
  layer.bias = {0.0};
  net.layers.push_back(layer);

  NormalizationTransform tr;
  tr.feature_names = {feature::kFeret};
  tr.feature_min = {0.0};
  tr.feature_max = {1.0};
  tr.target_min = 200.0;
  tr.target_max = 400.0;

  PictureSample pic = normalized_picture("p", {0.4, 0.6}, 0.5);
  CHECK(predict_limit(net, pic, tr) == doctest::Approx(300.0).epsilon(1e-12));
}

TEST_CASE("make_wide lifts the width and stays trainable") {
  TrainConfig cfg;
  cfg.seed = 12;
  cfg.depth = 4;

  Network plain = make_wide(2, 1, cfg);
  CHECK(plain.width == 2);

  Network wide = make_wide(2, 3, cfg);
  CHECK(wide.width == 6);
  CHECK(wide.feature_dim == 2);

  PictureSample pic;
  pic.picture_id = "p";
  pic.group = Group::V;
  pic.feature_names = {feature::kFeret, feature::kArea};
  pic.features = Mat(2, 2);
  pic.features(0, 0) = 0.2;
  pic.features(0, 1) = 0.4;
  pic.features(1, 0) = 0.6;
  pic.features(1, 1) = 0.8;
  pic.target = 0.5;

  Network trained = sgd_epoch(wide, pic, 0.1);
  CHECK(trained.width == 6);
  CHECK(picture_eta(trained, pic) >= 0.0);
}

TEST_CASE("training converges on an easy synthetic picture") {
  auto corpus = gen_synthetic(default_group_spec(Group::V), 8, 60, 31);
  auto sel = select_features(corpus, {feature::kFeret});
  auto [normalized, tr] = normalize(sel);

  TrainConfig cfg;
  cfg.seed = 1;
  cfg.max_iterations = 1500;
  const PictureSample& pic = normalized[0];
  TrainReport report = train(pic, cfg);
  double mean_abs =
      picture_eta(report.net, pic) / static_cast<double>(pic.measurement_count());
  CHECK(mean_abs < 0.1);
  // smoothed loss history should mostly decrease
  const auto& h = report.loss_history;
  if (h.size() > 100) {
    std::size_t improving = 0, total = 0;
    for (std::size_t e = 50; e < h.size(); ++e, ++total)
      if (h[e] <= h[e - 50] + 1e-12) ++improving;
    CHECK(static_cast<double>(improving) / static_cast<double>(total) >= 0.95);
  }
}
