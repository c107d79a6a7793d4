#include "simresnet/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "simresnet/errors.hpp"
#include "simresnet/rng.hpp"

namespace simresnet {

namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

const std::vector<std::string>& all_feature_names() {
  static const std::vector<std::string> names = {
      feature::kFeret, feature::kArea, feature::kAspectRatio};
  return names;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, std::size_t row,
                    const std::string& column) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("row " + std::to_string(row) + ": non-numeric value '" +
                     text + "' in column " + column);
  return value;
}

}  // namespace

GroupSpec default_group_spec(Group g) {
  GroupSpec spec;
  spec.group = g;
  if (g == Group::V) {
    spec.feret = {std::log(40.0), 0.3};
    spec.area = {std::log(1200.0), 0.5};
    spec.aspect_ratio = {std::log(2.0), 0.25};
    spec.target = {std::log(300.0), 0.08};
  } else {
    spec.feret = {std::log(25.0), 0.5};
    spec.area = {std::log(500.0), 0.8};
    spec.aspect_ratio = {std::log(1.15), 0.12};
    spec.target = {std::log(340.0), 0.16};
  }
  return spec;
}

std::vector<PictureSample> gen_synthetic(const GroupSpec& spec,
                                         std::size_t picture_count,
                                         std::size_t measurement_count,
                                         std::uint64_t seed) {
  if (picture_count == 0) throw std::invalid_argument("gen_synthetic: picture_count must be >= 1");
  if (measurement_count == 0) throw std::invalid_argument("gen_synthetic: measurement_count must be >= 1");

  Rng rng(seed, rng_stream::kSynthetic);
  std::vector<PictureSample> pictures;
  pictures.reserve(picture_count);
  for (std::size_t j = 0; j < picture_count; ++j) {
    PictureSample pic;
    char id[16];
    std::snprintf(id, sizeof id, "%s%03zu", group_name(spec.group), j + 1);
    pic.picture_id = id;
    pic.group = spec.group;
    pic.feature_names = all_feature_names();
    pic.target = std::exp(spec.target.mu + spec.target.s * rng.normal());
    pic.features = Mat(measurement_count, 3);
    for (std::size_t i = 0; i < measurement_count; ++i) {
      pic.features(i, 0) = std::exp(spec.feret.mu + spec.feret.s * rng.normal());
      pic.features(i, 1) = std::exp(spec.area.mu + spec.area.s * rng.normal());
      // aspect ratio is a shape parameter, clipped to its lower bound 1
      pic.features(i, 2) =
          std::max(1.0, std::exp(spec.aspect_ratio.mu + spec.aspect_ratio.s * rng.normal()));
    }
    pic.validate();
    pictures.push_back(std::move(pic));
  }
  return pictures;
}

std::vector<PictureSample> select_features(
    const std::vector<PictureSample>& pictures,
    const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("select_features: empty feature set");
  std::vector<PictureSample> out;
  out.reserve(pictures.size());
  for (const PictureSample& pic : pictures) {
    PictureSample sel;
    sel.picture_id = pic.picture_id;
    sel.group = pic.group;
    sel.target = pic.target;
    sel.feature_names = names;
    sel.features = Mat(pic.features.rows, names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
      auto it = std::find(pic.feature_names.begin(), pic.feature_names.end(), names[c]);
      if (it == pic.feature_names.end())
        throw std::invalid_argument("select_features: corpus has no column " + names[c]);
      auto src = static_cast<std::size_t>(it - pic.feature_names.begin());
      for (std::size_t r = 0; r < pic.features.rows; ++r)
        sel.features(r, c) = pic.features(r, src);
    }
    out.push_back(std::move(sel));
  }
  return out;
}

std::vector<PictureSample> load_pictures(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  std::vector<std::string> header = split_csv_line(line);

  auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };

  const int id_col = column("picture_id");
  const int group_col = column("group");
  const int target_col = column("target_mpa");
  if (id_col < 0 || group_col < 0 || target_col < 0)
    throw ParseError(path.string() + ": missing required column (picture_id, group, target_mpa)");

  std::vector<std::pair<std::string, int>> feature_cols;
  for (const std::string& name : all_feature_names()) {
    int c = column(name);
    if (c >= 0) feature_cols.emplace_back(name, c);
  }
  if (feature_cols.empty())
    throw ParseError(path.string() + ": no feature column present");
  for (const std::string& name : header) {
    bool known = name == "picture_id" || name == "group" || name == "target_mpa" ||
                 std::find(all_feature_names().begin(), all_feature_names().end(), name) !=
                     all_feature_names().end();
    if (!known) throw ParseError(path.string() + ": unknown column " + name);
  }

  std::vector<PictureSample> pictures;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<Vec>> rows_per_picture;

  std::size_t row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));

    const std::string& id = fields[static_cast<std::size_t>(id_col)];
    Group group;
    try {
      group = group_from_name(fields[static_cast<std::size_t>(group_col)]);
    } catch (const std::invalid_argument& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what());
    }
    double target = parse_number(fields[static_cast<std::size_t>(target_col)], row, "target_mpa");

    Vec feats(feature_cols.size());
    for (std::size_t c = 0; c < feature_cols.size(); ++c)
      feats[c] = parse_number(fields[static_cast<std::size_t>(feature_cols[c].second)], row,
                              feature_cols[c].first);

    auto it = index.find(id);
    if (it == index.end()) {
      index.emplace(id, pictures.size());
      PictureSample pic;
      pic.picture_id = id;
      pic.group = group;
      pic.target = target;
      for (const auto& [name, c] : feature_cols) pic.feature_names.push_back(name);
      pictures.push_back(std::move(pic));
      rows_per_picture.emplace_back();
      it = index.find(id);
    } else {
      const PictureSample& pic = pictures[it->second];
      if (pic.target != target)
        throw ParseError("row " + std::to_string(row) + ": target " +
                         format_double(target) + " differs from picture " + id +
                         "'s first target " + format_double(pic.target));
      if (pic.group != group)
        throw ParseError("row " + std::to_string(row) + ": group differs within picture " + id);
    }
    rows_per_picture[it->second].push_back(std::move(feats));
  }

  if (pictures.empty()) throw ParseError(path.string() + ": no data rows");

  for (std::size_t p = 0; p < pictures.size(); ++p) {
    const auto& rows = rows_per_picture[p];
    pictures[p].features = Mat(rows.size(), feature_cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < feature_cols.size(); ++c)
        pictures[p].features(r, c) = rows[r][c];
    pictures[p].validate();
  }
  return pictures;
}

void save_corpus_csv(const std::vector<PictureSample>& pictures,
                     const std::filesystem::path& path) {
  if (pictures.empty()) throw std::invalid_argument("save_corpus_csv: empty corpus");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());

  out << "picture_id,group,target_mpa";
  for (const std::string& name : pictures.front().feature_names) out << ',' << name;
  out << '\n';
  for (const PictureSample& pic : pictures) {
    for (std::size_t r = 0; r < pic.features.rows; ++r) {
      out << pic.picture_id << ',' << group_name(pic.group) << ','
          << format_double(pic.target);
      for (std::size_t c = 0; c < pic.features.cols; ++c)
        out << ',' << format_double(pic.features(r, c));
      out << '\n';
    }
  }
}

void save_model(const Network& net, const NormalizationTransform& transform,
                std::uint64_t seed, const std::filesystem::path& path) {
  net.validate();
  json layers = json::array();
  for (const LayerParams& layer : net.layers) {
    json weight = json::array();
    for (std::size_t i = 0; i < layer.weight.rows; ++i) {
      json w_row = json::array();
      for (std::size_t j = 0; j < layer.weight.cols; ++j) w_row.push_back(layer.weight(i, j));
      weight.push_back(std::move(w_row));
    }
    layers.push_back({{"weight", std::move(weight)}, {"bias", layer.bias}});
  }
  json doc = {
      {"format_version", kModelFormatVersion},
      {"feature_dim", net.feature_dim},
      {"width", net.width},
      {"depth", net.depth()},
      {"dt", net.dt},
      {"activation", activation_name(net.activation)},
      {"layers", std::move(layers)},
      {"normalization",
       {{"feature_names", transform.feature_names},
        {"feature_min", transform.feature_min},
        {"feature_max", transform.feature_max},
        {"target_min", transform.target_min},
        {"target_max", transform.target_max}}},
      {"seed", seed},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion)
      throw ParseError(path.string() + ": unsupported format_version");

    LoadedModel model;
    model.net.feature_dim = doc.at("feature_dim").get<std::size_t>();
    model.net.width = doc.at("width").get<std::size_t>();
    model.net.dt = doc.at("dt").get<double>();
    model.net.activation = activation_from_name(doc.at("activation").get<std::string>().c_str());
    const auto depth = doc.at("depth").get<std::size_t>();

    for (const json& jl : doc.at("layers")) {
      LayerParams layer;
      const json& w = jl.at("weight");
      layer.weight = Mat(w.size(), model.net.width);
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i].size() != model.net.width)
          throw ParseError(path.string() + ": weight row length mismatch");
        for (std::size_t j = 0; j < model.net.width; ++j)
          layer.weight(i, j) = w[i][j].get<double>();
      }
      layer.bias = jl.at("bias").get<Vec>();
      model.net.layers.push_back(std::move(layer));
    }
    if (model.net.depth() != depth)
      throw ParseError(path.string() + ": depth does not match layer count");

    const json& norm = doc.at("normalization");
    model.transform.feature_names = norm.at("feature_names").get<std::vector<std::string>>();
    model.transform.feature_min = norm.at("feature_min").get<Vec>();
    model.transform.feature_max = norm.at("feature_max").get<Vec>();
    model.transform.target_min = norm.at("target_min").get<double>();
    model.transform.target_max = norm.at("target_max").get<double>();
    model.seed = doc.at("seed").get<std::uint64_t>();

    model.net.validate();
    if (model.transform.feature_names.size() != model.net.feature_dim ||
        model.transform.feature_min.size() != model.net.feature_dim ||
        model.transform.feature_max.size() != model.net.feature_dim)
      throw ParseError(path.string() + ": normalization shape mismatch");
    return model;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_error_report_csv(const ErrorReport& report,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "picture_id,eta\n";
  for (const auto& [id, eta] : report.per_picture)
    out << id << ',' << format_double(eta) << '\n';
}

void save_histogram_csv(const Histogram& hist, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "bin_left,bin_right,count\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b)
    out << format_double(hist.edges[b]) << ',' << format_double(hist.edges[b + 1]) << ','
        << hist.counts[b] << '\n';
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace simresnet
