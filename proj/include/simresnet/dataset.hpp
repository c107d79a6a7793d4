#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "simresnet/linalg.hpp"

namespace simresnet {

enum class Group { V, RN };

const char* group_name(Group g);
Group group_from_name(const std::string& name);

// Canonical feature column names, in fixed order.
namespace feature {
inline constexpr const char* kFeret = "feret_um";
inline constexpr const char* kArea = "area_um2";
inline constexpr const char* kAspectRatio = "aspect_ratio";
}  // namespace feature

// One micrograph's data: M rows of d feature measurements sharing a single
// scalar shakedown-limit target.
struct PictureSample {
  std::string picture_id;
  Group group = Group::V;
  std::vector<std::string> feature_names;  // d entries
  Mat features;                            // M x d
  double target = 0.0;                     // MPa raw, [0,1] once normalized

  std::size_t measurement_count() const { return features.rows; }
  std::size_t feature_dim() const { return features.cols; }

  // Raw-data invariants (positivity, finiteness, aspect_ratio >= 1).
  void validate() const;
};

// Corpus-wide min-max ranges; maps every channel onto [0,1] and back.
struct NormalizationTransform {
  std::vector<std::string> feature_names;
  Vec feature_min;
  Vec feature_max;
  double target_min = 0.0;
  double target_max = 0.0;

  double normalize_feature(std::size_t channel, double x) const;
  double normalize_target(double t) const;
  double denormalize_target(double t) const;
};

// Computes corpus-wide extrema and returns normalized copies plus the
// transform. Throws DegenerateDataError when a channel has max == min.
std::pair<std::vector<PictureSample>, NormalizationTransform> normalize(
    const std::vector<PictureSample>& pictures);

// Normalizes a corpus with a previously computed transform (cross-group
// evaluation uses the training corpus' transform). Values may leave [0,1].
std::vector<PictureSample> apply_transform(
    const std::vector<PictureSample>& pictures,
    const NormalizationTransform& transform);

}  // namespace simresnet
