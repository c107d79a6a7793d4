#include "simresnet/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "simresnet/data_io.hpp"
#include "simresnet/errors.hpp"
#include "simresnet/forward.hpp"
#include "simresnet/metrics.hpp"
#include "simresnet/rng.hpp"
#include "simresnet/shakedown.hpp"
#include "simresnet/trainer.hpp"

namespace simresnet::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_manifest(const fs::path& primary, const std::string& command,
                    const json& config, const std::vector<fs::path>& inputs,
                    const std::vector<fs::path>& outputs, double wall_seconds,
                    const std::string& error) {
  json jin = json::array();
  for (const fs::path& p : inputs) jin.push_back(p.string());
  json jout = json::array();
  for (const fs::path& p : outputs)
    jout.push_back({{"path", p.string()},
                    {"checksum_fnv1a64", fs::exists(p) ? file_checksum(p) : ""}});
  json doc = {
      {"command", command},
      {"config", config},
      {"seed", config.contains("seed") ? config.at("seed") : json()},
      {"inputs", std::move(jin)},
      {"outputs", std::move(jout)},
      {"status", error.empty() ? "ok" : "error"},
      {"timings", {{"wall_seconds", wall_seconds}}},
  };
  if (!error.empty()) doc["error"] = error;

  fs::path manifest_path = primary;
  manifest_path += ".manifest.json";
  std::ofstream out(manifest_path);
  if (out) out << doc.dump(2) << '\n';
}

// Runs the command body and writes the manifest afterwards, also when the
// body throws.
void with_manifest(const std::string& command, const json& config,
                   const fs::path& primary, const std::vector<fs::path>& inputs,
                   const std::function<void(std::vector<fs::path>&)>& body) {
  std::vector<fs::path> outputs;
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  try {
    body(outputs);
  } catch (const std::exception& e) {
    write_manifest(primary, command, config, inputs, outputs, elapsed(), e.what());
    throw;
  }
  write_manifest(primary, command, config, inputs, outputs, elapsed(), "");
}

TrainConfig to_train_config(const TrainOptions& opt) {
  TrainConfig cfg;
  cfg.learning_rate = opt.learning_rate;
  cfg.max_iterations = opt.iterations;
  cfg.depth = opt.depth;
  cfg.seed = opt.seed;
  cfg.averaging_count = opt.averaging;
  cfg.width_multiplier = opt.width_multiplier;
  return cfg;
}

json train_config_json(const TrainOptions& opt) {
  return {{"data", opt.data.string()},
          {"model_output", opt.model_output.string()},
          {"features", opt.features},
          {"depth", opt.depth},
          {"learning_rate", opt.learning_rate},
          {"iterations", opt.iterations},
          {"averaging", opt.averaging},
          {"seed", opt.seed},
          {"width_multiplier", opt.width_multiplier},
          {"picture_id", opt.picture_id ? json(*opt.picture_id) : json()}};
}

std::vector<std::size_t> select_picture_indices(
    const std::vector<PictureSample>& corpus, std::size_t count,
    const std::optional<std::string>& picture_id, std::uint64_t seed) {
  if (picture_id) {
    if (count != 1)
      throw std::invalid_argument("--picture requires averaging count 1");
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (corpus[i].picture_id == *picture_id) return {i};
    throw std::invalid_argument("picture " + *picture_id + " not in corpus");
  }
  if (count > corpus.size())
    throw std::invalid_argument("averaging count exceeds corpus size");
  std::vector<std::size_t> indices(corpus.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  Rng rng(seed, rng_stream::kSelect);
  rng.shuffle(indices);
  indices.resize(count);
  return indices;
}

Network average_networks(std::vector<Network> nets) {
  Network mean = std::move(nets.front());
  for (std::size_t m = 1; m < nets.size(); ++m)
    for (std::size_t k = 0; k < mean.depth(); ++k) {
      for (std::size_t i = 0; i < mean.layers[k].weight.data.size(); ++i)
        mean.layers[k].weight.data[i] += nets[m].layers[k].weight.data[i];
      for (std::size_t i = 0; i < mean.layers[k].bias.size(); ++i)
        mean.layers[k].bias[i] += nets[m].layers[k].bias[i];
    }
  const double inv = 1.0 / static_cast<double>(nets.size());
  for (LayerParams& layer : mean.layers) {
    for (double& w : layer.weight.data) w *= inv;
    for (double& b : layer.bias) b *= inv;
  }
  return mean;
}

// Per-measurement network outputs, averaged over components, in MPa.
std::vector<double> measurement_outputs_mpa(const Network& net,
                                            const PictureSample& pic,
                                            const NormalizationTransform& tr) {
  const std::size_t wm = net.width / pic.feature_dim();
  std::vector<double> out;
  out.reserve(pic.measurement_count());
  for (std::size_t row = 0; row < pic.measurement_count(); ++row) {
    const Vec y = forward_trajectory(lift_input(pic.features, row, wm), net).output();
    double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    out.push_back(tr.denormalize_target(mean));
  }
  return out;
}

}  // namespace

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checksum: cannot open " + path.string());
  std::uint64_t hash = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

void run_gen(const GenOptions& opt) {
  json config = {{"group", group_name(opt.group)},
                 {"pictures", opt.pictures},
                 {"measurements", opt.measurements},
                 {"seed", opt.seed},
                 {"output", opt.output.string()}};
  with_manifest("gen", config, opt.output, {}, [&](std::vector<fs::path>& outputs) {
    auto corpus = gen_synthetic(default_group_spec(opt.group), opt.pictures,
                                opt.measurements, opt.seed);
    save_corpus_csv(corpus, opt.output);
    outputs.push_back(opt.output);
    std::cout << "wrote " << opt.pictures << " pictures x " << opt.measurements
              << " measurements (group " << group_name(opt.group) << ", synthetic) to "
              << opt.output.string() << '\n';
  });
}

void run_train(const TrainOptions& opt) {
  json config = train_config_json(opt);
  with_manifest("train", config, opt.model_output, {opt.data},
                [&](std::vector<fs::path>& outputs) {
    auto corpus = select_features(load_pictures(opt.data), opt.features);
    auto [normalized, transform] = normalize(corpus);
    auto indices =
        select_picture_indices(normalized, opt.averaging, opt.picture_id, opt.seed);

    TrainConfig cfg = to_train_config(opt);
    std::vector<Network> nets;
    std::vector<TrainReport> reports;
    for (std::size_t idx : indices) {
      reports.push_back(train(normalized[idx], cfg));
      nets.push_back(reports.back().net);
    }
    Network model = average_networks(std::move(nets));
    save_model(model, transform, opt.seed, opt.model_output);
    outputs.push_back(opt.model_output);

    fs::path history_path =
        opt.model_output.parent_path() /
        (opt.model_output.stem().string() + "_history.csv");
    {
      std::ofstream hist(history_path);
      if (!hist) throw std::runtime_error("cannot write " + history_path.string());
      hist << "member,picture_id,epoch,mean_loss\n";
      for (std::size_t m = 0; m < reports.size(); ++m)
        for (std::size_t e = 0; e < reports[m].loss_history.size(); ++e)
          hist << m << ',' << normalized[indices[m]].picture_id << ',' << e + 1 << ','
               << format_double(reports[m].loss_history[e]) << '\n';
    }
    outputs.push_back(history_path);

    for (std::size_t m = 0; m < reports.size(); ++m)
      std::cout << "trained on " << normalized[indices[m]].picture_id << ": "
                << reports[m].iterations_used << " epochs, final mean loss "
                << reports[m].loss_history.back()
                << (reports[m].stop_reason == StopReason::Plateau ? " (plateau)"
                                                                  : " (iteration cap)")
                << '\n';
    std::cout << "model written to " << opt.model_output.string() << '\n';
  });
}

void run_eval(const EvalOptions& opt) {
  json config = {{"model", opt.model.string()},
                 {"data", opt.data.string()},
                 {"output_prefix", opt.output_prefix.string()},
                 {"bins", opt.bins}};
  with_manifest("eval", config, opt.output_prefix, {opt.model, opt.data},
                [&](std::vector<fs::path>& outputs) {
    LoadedModel model = load_model(opt.model);
    auto raw = select_features(load_pictures(opt.data), model.transform.feature_names);
    auto normalized = apply_transform(raw, model.transform);

    ErrorReport report;
    report.picture_count = normalized.size();
    std::vector<double> etas;
    for (const PictureSample& pic : normalized) {
      double eta = picture_eta(model.net, pic);
      report.per_picture.emplace_back(pic.picture_id, eta);
      etas.push_back(eta);
    }
    std::tie(report.eta_bar, report.theta) = aggregate_errors(etas);

    const std::string prefix = opt.output_prefix.string();
    fs::path report_path = prefix + "_report.csv";
    save_error_report_csv(report, report_path);
    outputs.push_back(report_path);

    fs::path summary_path = prefix + "_summary.json";
    {
      json summary = {{"eta_bar", report.eta_bar},
                      {"theta", report.theta},
                      {"P", report.picture_count},
                      {"config", config}};
      std::ofstream out(summary_path);
      if (!out) throw std::runtime_error("cannot write " + summary_path.string());
      out << summary.dump(2) << '\n';
    }
    outputs.push_back(summary_path);

    // Raw input histograms per picture and channel (figure left-hand sides).
    fs::path input_hist_path = prefix + "_input_hist.csv";
    {
      std::ofstream out(input_hist_path);
      if (!out) throw std::runtime_error("cannot write " + input_hist_path.string());
      out << "picture_id,feature,bin_left,bin_right,count\n";
      for (const PictureSample& pic : raw)
        for (std::size_t c = 0; c < pic.feature_dim(); ++c) {
          std::vector<double> column(pic.measurement_count());
          for (std::size_t r = 0; r < pic.measurement_count(); ++r)
            column[r] = pic.features(r, c);
          Histogram h = histogram(column, opt.bins);
          for (std::size_t b = 0; b < h.counts.size(); ++b)
            out << pic.picture_id << ',' << pic.feature_names[c] << ','
                << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1])
                << ',' << h.counts[b] << '\n';
        }
    }
    outputs.push_back(input_hist_path);

    // Output histograms in MPa with the target alongside (right-hand sides).
    fs::path output_hist_path = prefix + "_output_hist.csv";
    {
      std::ofstream out(output_hist_path);
      if (!out) throw std::runtime_error("cannot write " + output_hist_path.string());
      out << "picture_id,target_mpa,bin_left,bin_right,count\n";
      for (std::size_t p = 0; p < normalized.size(); ++p) {
        auto values = measurement_outputs_mpa(model.net, normalized[p], model.transform);
        Histogram h = histogram(values, opt.bins);
        for (std::size_t b = 0; b < h.counts.size(); ++b)
          out << raw[p].picture_id << ',' << format_double(raw[p].target) << ','
              << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1])
              << ',' << h.counts[b] << '\n';
      }
    }
    outputs.push_back(output_hist_path);

    std::cout << "eta_bar=" << report.eta_bar << " theta=" << report.theta
              << " over P=" << report.picture_count << " pictures\n";
  });
}

void run_predict(const PredictOptions& opt) {
  json config = {{"model", opt.model.string()},
                 {"data", opt.data.string()},
                 {"output_prefix", opt.output_prefix.string()},
                 {"per_picture", opt.per_picture}};
  if (opt.per_picture) config["train"] = train_config_json(opt.train);
  std::vector<fs::path> inputs = {opt.data};
  if (!opt.per_picture) inputs.insert(inputs.begin(), opt.model);

  with_manifest("predict", config, opt.output_prefix, inputs,
                [&](std::vector<fs::path>& outputs) {
    std::vector<PictureSample> raw;
    std::vector<double> predictions;

    if (opt.per_picture) {
      raw = select_features(load_pictures(opt.data), opt.train.features);
      auto [normalized, transform] = normalize(raw);
      TrainConfig cfg = to_train_config(opt.train);
      for (const PictureSample& pic : normalized)
        predictions.push_back(
            predict_limit(train(pic, cfg).net, pic, transform));
    } else {
      LoadedModel model = load_model(opt.model);
      raw = select_features(load_pictures(opt.data), model.transform.feature_names);
      auto normalized = apply_transform(raw, model.transform);
      for (const PictureSample& pic : normalized)
        predictions.push_back(predict_limit(model.net, pic, model.transform));
    }

    const std::string prefix = opt.output_prefix.string();
    fs::path csv_path = prefix + "_predictions.csv";
    std::vector<double> kept_predictions, true_targets;
    std::size_t excluded = 0;
    {
      std::ofstream out(csv_path);
      if (!out) throw std::runtime_error("cannot write " + csv_path.string());
      out << "picture_id,predicted_mpa,true_mpa,excluded_from_fit\n";
      for (std::size_t p = 0; p < raw.size(); ++p) {
        bool positive = predictions[p] > 0.0;
        if (positive)
          kept_predictions.push_back(predictions[p]);
        else
          ++excluded;
        true_targets.push_back(raw[p].target);
        out << raw[p].picture_id << ',' << format_double(predictions[p]) << ','
            << format_double(raw[p].target) << ',' << (positive ? 0 : 1) << '\n';
      }
    }
    outputs.push_back(csv_path);
    if (excluded > 0)
      std::cerr << "warning: " << excluded
                << " non-positive predicted limit(s) excluded from the fit\n";

    LognormalFit predicted_fit = fit_lognormal(kept_predictions);
    LognormalFit true_fit = fit_lognormal(true_targets);

    fs::path fit_path = prefix + "_fits.json";
    {
      json fits = {{"predicted_fit", {{"mu", predicted_fit.mu}, {"s", predicted_fit.s}}},
                   {"true_fit", {{"mu", true_fit.mu}, {"s", true_fit.s}}},
                   {"P", raw.size()},
                   {"excluded_from_fit", excluded},
                   {"config", config}};
      std::ofstream out(fit_path);
      if (!out) throw std::runtime_error("cannot write " + fit_path.string());
      out << fits.dump(2) << '\n';
    }
    outputs.push_back(fit_path);

    std::cout << "predicted fit mu=" << predicted_fit.mu << " s=" << predicted_fit.s
              << "; true fit mu=" << true_fit.mu << " s=" << true_fit.s << '\n';
  });
}

void run_bench(const BenchOptions& opt) {
  json config = {{"data", opt.data.string()},
                 {"output", opt.output.string()},
                 {"multipliers", opt.multipliers},
                 {"iterations", opt.iterations},
                 {"repeats", opt.repeats},
                 {"features", opt.features},
                 {"depth", opt.depth},
                 {"learning_rate", opt.learning_rate},
                 {"seed", opt.seed},
                 {"picture_id", opt.picture_id ? json(*opt.picture_id) : json()}};
  with_manifest("bench", config, opt.output, {opt.data},
                [&](std::vector<fs::path>& outputs) {
    if (opt.multipliers.empty())
      throw std::invalid_argument("bench: need at least one width multiplier");
    auto corpus = select_features(load_pictures(opt.data), opt.features);
    auto [normalized, transform] = normalize(corpus);
    auto indices = select_picture_indices(normalized, 1, opt.picture_id, opt.seed);
    const PictureSample& pic = normalized[indices.front()];

    std::ofstream out(opt.output);
    if (!out) throw std::runtime_error("cannot write " + opt.output.string());
    out << "multiplier,width,seconds,final_loss\n";
    for (std::size_t multiplier : opt.multipliers) {
      TrainConfig cfg;
      cfg.learning_rate = opt.learning_rate;
      cfg.max_iterations = opt.iterations;
      cfg.depth = opt.depth;
      cfg.seed = opt.seed;
      cfg.width_multiplier = multiplier;

      double best_seconds = 0.0;
      double final_loss = 0.0;
      for (std::size_t rep = 0; rep < std::max<std::size_t>(opt.repeats, 1); ++rep) {
        auto start = std::chrono::steady_clock::now();
        TrainReport report = train(pic, cfg);
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (rep == 0 || seconds < best_seconds) best_seconds = seconds;
        final_loss = report.loss_history.back();
      }
      out << multiplier << ',' << pic.feature_dim() * multiplier << ','
          << format_double(best_seconds) << ',' << format_double(final_loss) << '\n';
      std::cout << "multiplier " << multiplier << " (N=" << pic.feature_dim() * multiplier
                << "): " << best_seconds << " s, final loss " << final_loss << '\n';
    }
    outputs.push_back(opt.output);
  });
}

void run_shakedown(const ShakedownOptions& opt) {
  json config = {{"instance", opt.instance.string()},
                 {"output", opt.output.string()},
                 {"oracle", opt.oracle},
                 {"grid_step", opt.grid_step},
                 {"tol_bisect", opt.tol_bisect},
                 {"max_iter", opt.max_iter}};
  with_manifest("shakedown", config, opt.output, {opt.instance},
                [&](std::vector<fs::path>& outputs) {
    ShakedownInstance inst = load_instance(opt.instance);
    SolverSettings settings;
    settings.tol_bisect = opt.tol_bisect;
    settings.max_iter = opt.max_iter;

    ShakedownSolution sol = shakedown_factor(inst, settings);
    double tol_feas = default_feasibility_tol(inst);
    CertificateCheck check = check_certificate(inst, sol.alpha, sol.residual);
    if (!check.passes(tol_feas))
      throw std::runtime_error("certificate failed the independent re-check");

    save_solution(inst, sol, check, tol_feas, opt.output);
    outputs.push_back(opt.output);
    std::cout << "alpha=" << sol.alpha
              << " (certificate ok: |C rho|_inf=" << check.max_equilibrium_residual
              << ", max yield excess=" << check.max_yield_excess << ")\n";

    if (opt.oracle) {
      double oracle_alpha = brute_force_factor(inst, opt.grid_step);
      double min_vm = std::numeric_limits<double>::infinity();
      for (const GaussPointData& pt : inst.points)
        for (const StressVec& se : pt.elastic_stress) {
          double vm = von_mises(se);
          if (vm > 0.0) min_vm = std::min(min_vm, vm);
        }
      double band = 2.0 * opt.grid_step / min_vm + 2.0 * opt.tol_bisect * sol.alpha;
      std::cout << "oracle alpha=" << oracle_alpha << " (solver " << sol.alpha
                << ", tolerance " << band << ")\n";
      if (std::abs(oracle_alpha - sol.alpha) > band)
        throw std::runtime_error("solver and brute-force oracle disagree");
    }
  });
}

}  // namespace simresnet::cli
