#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "simresnet/dataset.hpp"
#include "simresnet/metrics.hpp"
#include "simresnet/network.hpp"

namespace simresnet {

// Log-space lognormal parameters of one channel.
struct ChannelSpec {
  double mu = 0.0;
  double s = 1.0;
};

// Generator settings for one synthetic group. The built-in constants are
// synthetic stand-ins, chosen to reproduce the qualitative group orderings
// (RN: higher mean target, higher scatter, rounder nodules).
struct GroupSpec {
  Group group = Group::V;
  ChannelSpec feret;
  ChannelSpec area;
  ChannelSpec aspect_ratio;
  ChannelSpec target;
};

GroupSpec default_group_spec(Group g);

// Draws P pictures of M measurements each (all three feature columns) plus
// one target per picture. Deterministic for a given (spec, P, M, seed).
std::vector<PictureSample> gen_synthetic(const GroupSpec& spec,
                                         std::size_t picture_count,
                                         std::size_t measurement_count,
                                         std::uint64_t seed);

// Keeps only the named feature columns, in the given order.
std::vector<PictureSample> select_features(
    const std::vector<PictureSample>& pictures,
    const std::vector<std::string>& names);

// CSV corpus: header row, one measurement per row. Required columns
// picture_id, group, target_mpa; features are whichever of feret_um,
// area_um2, aspect_ratio are present.
std::vector<PictureSample> load_pictures(const std::filesystem::path& path);
void save_corpus_csv(const std::vector<PictureSample>& pictures,
                     const std::filesystem::path& path);

// Model file: JSON, bit-exact parameter round trip.
void save_model(const Network& net, const NormalizationTransform& transform,
                std::uint64_t seed, const std::filesystem::path& path);

struct LoadedModel {
  Network net;
  NormalizationTransform transform;
  std::uint64_t seed = 0;
};
LoadedModel load_model(const std::filesystem::path& path);

// Plot-ready exports.
void save_error_report_csv(const ErrorReport& report,
                           const std::filesystem::path& path);
void save_histogram_csv(const Histogram& hist,
                        const std::filesystem::path& path);

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace simresnet
