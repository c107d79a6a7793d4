#include <stdexcept>

#include <doctest.h>

#include "simresnet/dataset.hpp"
#include "simresnet/errors.hpp"

using namespace simresnet;

namespace {

PictureSample make_picture(const std::string& id, std::vector<double> ferets,
                           double target) {
  PictureSample pic;
  pic.picture_id = id;
  pic.group = Group::V;
  pic.feature_names = {feature::kFeret};
  pic.features = Mat(ferets.size(), 1);
  for (std::size_t i = 0; i < ferets.size(); ++i) pic.features(i, 0) = ferets[i];
  pic.target = target;
  return pic;
}

}  // namespace

TEST_CASE("min-max normalization maps extrema to 0 and 1") {
  std::vector<PictureSample> corpus = {make_picture("a", {2.0, 4.0}, 200.0),
                                       make_picture("b", {6.0}, 400.0)};
  auto [normalized, tr] = normalize(corpus);
  CHECK(normalized[0].features(0, 0) == doctest::Approx(0.0));
  CHECK(normalized[0].features(1, 0) == doctest::Approx(0.5));
  CHECK(normalized[1].features(0, 0) == doctest::Approx(1.0));
  CHECK(normalized[0].target == doctest::Approx(0.0));
  CHECK(normalized[1].target == doctest::Approx(1.0));
}

TEST_CASE("normalization round trip is exact to 1e-12") {
  std::vector<PictureSample> corpus = {make_picture("a", {13.5, 77.25, 41.0}, 311.0),
                                       make_picture("b", {22.0, 59.5, 18.75}, 287.5)};
  auto [normalized, tr] = normalize(corpus);
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    for (std::size_t r = 0; r < corpus[p].features.rows; ++r) {
      double back = tr.feature_min[0] +
                    normalized[p].features(r, 0) * (tr.feature_max[0] - tr.feature_min[0]);
      CHECK(back == doctest::Approx(corpus[p].features(r, 0)).epsilon(1e-12));
    }
    CHECK(tr.denormalize_target(normalized[p].target) ==
          doctest::Approx(corpus[p].target).epsilon(1e-12));
  }
}

TEST_CASE("constant channel is a degenerate-data error") {
  std::vector<PictureSample> corpus = {make_picture("a", {5.0, 5.0}, 200.0),
                                       make_picture("b", {5.0}, 300.0)};
  CHECK_THROWS_AS(normalize(corpus), DegenerateDataError);

  corpus = {make_picture("a", {1.0, 2.0}, 250.0), make_picture("b", {3.0}, 250.0)};
  CHECK_THROWS_AS(normalize(corpus), DegenerateDataError);
}

TEST_CASE("picture invariants are enforced") {
  PictureSample pic = make_picture("x", {1.0}, -2.0);
  CHECK_THROWS_AS(pic.validate(), std::invalid_argument);

  pic = make_picture("x", {0.0}, 250.0);  // feret must be positive
  CHECK_THROWS_AS(pic.validate(), std::invalid_argument);

  pic = make_picture("x", {10.0}, 250.0);
  pic.feature_names = {feature::kAspectRatio};
  pic.features(0, 0) = 0.5;  // aspect ratio below 1
  CHECK_THROWS_AS(pic.validate(), std::invalid_argument);
}

TEST_CASE("apply_transform reuses a foreign transform") {
  std::vector<PictureSample> corpus = {make_picture("a", {2.0, 6.0}, 200.0),
                                       make_picture("b", {4.0}, 400.0)};
  auto [normalized, tr] = normalize(corpus);

  std::vector<PictureSample> other = {make_picture("c", {8.0}, 500.0)};
  auto mapped = apply_transform(other, tr);
  CHECK(mapped[0].features(0, 0) == doctest::Approx(1.5));  // beyond the seen range
  CHECK(mapped[0].target == doctest::Approx(1.5));
}
