#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simresnet/dataset.hpp"
#include "simresnet/gradient.hpp"
#include "simresnet/network.hpp"

namespace simresnet {

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_iterations = 10000;  // epochs over the M measurements
  std::size_t depth = 4;
  Activation activation = Activation::Sigmoid;
  double validation_fraction = 0.0;
  std::uint64_t seed = 0;
  std::size_t averaging_count = 1;
  std::size_t width_multiplier = 1;
};

// Plateau rule: stop once the mean epoch loss has improved by less than
// kPlateauImprovement over kPlateauWindow consecutive epochs.
inline constexpr std::size_t kPlateauWindow = 50;
inline constexpr double kPlateauImprovement = 1e-10;

enum class StopReason { IterationCap, Plateau };

struct TrainReport {
  Network net;
  std::vector<double> loss_history;  // mean per-measurement loss per epoch
  std::size_t iterations_used = 0;
  StopReason stop_reason = StopReason::IterationCap;
};

// Input vector for one measurement row, each feature replicated
// width_multiplier times: [a, b] lifted by 2 gives [a, a, b, b].
Vec lift_input(const Mat& features, std::size_t row, std::size_t width_multiplier);

// One pass over the picture's measurements in the given order; per
// measurement w <- w - xi * grad_w, b <- b - xi * grad_b. The overload
// without an order visits rows 0..M-1.
Network sgd_epoch(Network net, const PictureSample& picture, double learning_rate,
                  std::span<const std::size_t> order);
Network sgd_epoch(Network net, const PictureSample& picture, double learning_rate);

// Full protocol on one (normalized) picture: seeded init, seeded fixed
// measurement shuffle, epochs until plateau or the iteration cap.
// Throws TrainingDivergedError when the loss stops being finite.
TrainReport train(const PictureSample& picture, const TrainConfig& cfg);

// Trains one network per picture from the identical seeded initialization
// and returns the parameter-wise arithmetic mean.
Network train_averaged(const std::vector<PictureSample>& pictures,
                       const TrainConfig& cfg);

// Trains per candidate depth, evaluates mean eta on the validation
// pictures, returns the best depth; ties go to the smaller depth.
std::size_t select_depth(const std::vector<PictureSample>& pictures_train,
                         const std::vector<PictureSample>& pictures_val,
                         const std::vector<std::size_t>& candidate_depths,
                         const TrainConfig& cfg);

// eta_j of one picture under the network (normalized units).
double picture_eta(const Network& net, const PictureSample& picture);

// Mean network output over all measurements and components, denormalized
// through the target channel: one scalar limit in MPa per micrograph.
double predict_limit(const Network& net, const PictureSample& picture,
                     const NormalizationTransform& transform);

// Comparison model with N = d * width_multiplier, same init protocol.
Network make_wide(std::size_t feature_dim, std::size_t width_multiplier,
                  const TrainConfig& cfg);

}  // namespace simresnet
