#include "simresnet/dataset.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "simresnet/errors.hpp"

namespace simresnet {

const char* group_name(Group g) { return g == Group::V ? "V" : "RN"; }

Group group_from_name(const std::string& name) {
  if (name == "V") return Group::V;
  if (name == "RN") return Group::RN;
  throw std::invalid_argument("unknown group: " + name);
}

void PictureSample::validate() const {
  if (features.rows == 0) throw std::invalid_argument("picture " + picture_id + ": M must be >= 1");
  if (features.cols == 0 || features.cols != feature_names.size())
    throw std::invalid_argument("picture " + picture_id + ": feature columns inconsistent");
  if (!(target > 0.0) || !std::isfinite(target))
    throw std::invalid_argument("picture " + picture_id + ": target must be positive and finite");
  for (std::size_t c = 0; c < features.cols; ++c) {
    const std::string& name = feature_names[c];
    for (std::size_t r = 0; r < features.rows; ++r) {
      double v = features(r, c);
      if (!std::isfinite(v))
        throw std::invalid_argument("picture " + picture_id + ": non-finite " + name);
      if (name == feature::kAspectRatio && v < 1.0)
        throw std::invalid_argument("picture " + picture_id + ": aspect_ratio < 1");
      if ((name == feature::kFeret || name == feature::kArea) && !(v > 0.0))
        throw std::invalid_argument("picture " + picture_id + ": " + name + " must be > 0");
    }
  }
}

double NormalizationTransform::normalize_feature(std::size_t channel, double x) const {
  return (x - feature_min[channel]) / (feature_max[channel] - feature_min[channel]);
}

double NormalizationTransform::normalize_target(double t) const {
  return (t - target_min) / (target_max - target_min);
}

double NormalizationTransform::denormalize_target(double t) const {
  return target_min + t * (target_max - target_min);
}

std::pair<std::vector<PictureSample>, NormalizationTransform> normalize(
    const std::vector<PictureSample>& pictures) {
  if (pictures.empty()) throw std::invalid_argument("normalize: empty corpus");

  const std::size_t d = pictures.front().feature_dim();
  NormalizationTransform tr;
  tr.feature_names = pictures.front().feature_names;
  tr.feature_min.assign(d, std::numeric_limits<double>::infinity());
  tr.feature_max.assign(d, -std::numeric_limits<double>::infinity());
  tr.target_min = std::numeric_limits<double>::infinity();
  tr.target_max = -std::numeric_limits<double>::infinity();

  for (const PictureSample& pic : pictures) {
    if (pic.feature_dim() != d || pic.feature_names != tr.feature_names)
      throw std::invalid_argument("normalize: pictures disagree on feature columns");
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t r = 0; r < pic.features.rows; ++r) {
        double v = pic.features(r, c);
        tr.feature_min[c] = std::min(tr.feature_min[c], v);
        tr.feature_max[c] = std::max(tr.feature_max[c], v);
      }
    }
    tr.target_min = std::min(tr.target_min, pic.target);
    tr.target_max = std::max(tr.target_max, pic.target);
  }

  for (std::size_t c = 0; c < d; ++c)
    if (!(tr.feature_max[c] > tr.feature_min[c]))
      throw DegenerateDataError("normalize: constant feature channel " + tr.feature_names[c]);
  if (!(tr.target_max > tr.target_min))
    throw DegenerateDataError("normalize: constant target channel");

  return {apply_transform(pictures, tr), tr};
}

std::vector<PictureSample> apply_transform(
    const std::vector<PictureSample>& pictures,
    const NormalizationTransform& transform) {
  std::vector<PictureSample> out;
  out.reserve(pictures.size());
  for (const PictureSample& pic : pictures) {
    if (pic.feature_names != transform.feature_names)
      throw std::invalid_argument("apply_transform: feature columns do not match transform");
    PictureSample n = pic;
    for (std::size_t c = 0; c < n.features.cols; ++c)
      for (std::size_t r = 0; r < n.features.rows; ++r)
        n.features(r, c) = transform.normalize_feature(c, pic.features(r, c));
    n.target = transform.normalize_target(pic.target);
    out.push_back(std::move(n));
  }
  return out;
}

}  // namespace simresnet
