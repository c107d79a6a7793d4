#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simresnet/commands.hpp"
#include "simresnet/dataset.hpp"

namespace {

using namespace simresnet;

// Short feature flags to canonical CSV column names.
std::vector<std::string> to_feature_columns(const std::vector<std::string>& flags) {
  std::vector<std::string> columns;
  for (const std::string& flag : flags) {
    if (flag == "feret")
      columns.push_back(feature::kFeret);
    else if (flag == "area")
      columns.push_back(feature::kArea);
    else if (flag == "ar")
      columns.push_back(feature::kAspectRatio);
    else
      throw CLI::ValidationError("--features", "unknown feature '" + flag +
                                                   "' (choose from feret, area, ar)");
  }
  return columns;
}

void add_train_flags(CLI::App* cmd, cli::TrainOptions& opt,
                     std::vector<std::string>& feature_flags) {
  cmd->add_option("--features", feature_flags, "comma-separated subset of feret,area,ar")
      ->delimiter(',');
  cmd->add_option("--depth", opt.depth, "number of layers L")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", opt.learning_rate, "learning rate xi")->check(CLI::PositiveNumber);
  cmd->add_option("--iterations", opt.iterations, "epoch cap")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opt.seed, "run seed")->envname("SIMRESNET_SEED");
  cmd->add_option("--width-multiplier", opt.width_multiplier,
                  "neurons per feature (1 = SimResNet)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SimResNet micro-width residual network and shakedown solver"};
  app.require_subcommand(1);

  // gen
  cli::GenOptions gen;
  std::string gen_group = "V";
  CLI::App* cmd_gen = app.add_subcommand("gen", "generate a synthetic corpus CSV");
  cmd_gen->add_option("--group", gen_group, "V or RN")->check(CLI::IsMember({"V", "RN"}));
  cmd_gen->add_option("--pictures", gen.pictures, "picture count P")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--measurements", gen.measurements, "measurements per picture M")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--seed", gen.seed, "generator seed")->envname("SIMRESNET_SEED");
  cmd_gen->add_option("-o,--output", gen.output, "output CSV path")->required();

  // train
  cli::TrainOptions train;
  std::vector<std::string> train_features = {"feret"};
  CLI::App* cmd_train = app.add_subcommand("train", "train a model on a corpus");
  cmd_train->add_option("--data", train.data, "corpus CSV")->required()->check(CLI::ExistingFile);
  cmd_train->add_option("-o,--output", train.model_output, "model JSON path")->required();
  add_train_flags(cmd_train, train, train_features);
  cmd_train->add_option("--avg", train.averaging, "pictures to train and average (1 or 5)")
      ->check(CLI::IsMember({1, 5}));
  std::string train_picture;
  cmd_train->add_option("--picture", train_picture, "train on this picture_id instead of a seeded pick");

  // eval
  cli::EvalOptions eval;
  CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a model over a corpus");
  cmd_eval->add_option("--model", eval.model, "model JSON")->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--data", eval.data, "corpus CSV")->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("-o,--output-prefix", eval.output_prefix, "output file prefix")->required();
  cmd_eval->add_option("--bins", eval.bins, "histogram bins")->check(CLI::PositiveNumber);

  // predict
  cli::PredictOptions predict;
  std::vector<std::string> predict_features = {"feret"};
  CLI::App* cmd_predict =
      app.add_subcommand("predict", "predict one shakedown limit per picture");
  cmd_predict->add_option("--model", predict.model, "model JSON (single-model mode)")
      ->check(CLI::ExistingFile);
  cmd_predict->add_option("--data", predict.data, "corpus CSV")->required()->check(CLI::ExistingFile);
  cmd_predict->add_option("-o,--output-prefix", predict.output_prefix, "output file prefix")
      ->required();
  cmd_predict->add_flag("--per-picture", predict.per_picture,
                        "retrain one network per picture and predict in-sample");
  add_train_flags(cmd_predict, predict.train, predict_features);

  // bench
  cli::BenchOptions bench;
  std::vector<std::string> bench_features = {"feret"};
  CLI::App* cmd_bench = app.add_subcommand("bench", "time training runs per width multiplier");
  cmd_bench->add_option("--data", bench.data, "corpus CSV")->required()->check(CLI::ExistingFile);
  cmd_bench->add_option("-o,--output", bench.output, "timing CSV path")->required();
  cmd_bench->add_option("--multipliers", bench.multipliers, "width multipliers")->delimiter(',');
  cmd_bench->add_option("--iterations", bench.iterations, "epoch cap per run")
      ->check(CLI::PositiveNumber);
  cmd_bench->add_option("--repeats", bench.repeats, "repeats per multiplier (min wall time wins)")
      ->check(CLI::PositiveNumber);
  cmd_bench->add_option("--features", bench_features, "feature subset")->delimiter(',');
  cmd_bench->add_option("--depth", bench.depth, "number of layers L")->check(CLI::PositiveNumber);
  cmd_bench->add_option("--lr", bench.learning_rate, "learning rate xi")->check(CLI::PositiveNumber);
  cmd_bench->add_option("--seed", bench.seed, "run seed")->envname("SIMRESNET_SEED");
  std::string bench_picture;
  cmd_bench->add_option("--picture", bench_picture, "picture_id to train on");

  // shakedown
  cli::ShakedownOptions shakedown;
  CLI::App* cmd_shakedown =
      app.add_subcommand("shakedown", "solve a discrete static shakedown instance");
  cmd_shakedown->add_option("--instance", shakedown.instance, "instance JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_shakedown->add_option("-o,--output", shakedown.output, "solution JSON path")->required();
  cmd_shakedown->add_flag("--oracle", shakedown.oracle,
                          "also run the brute-force oracle and assert agreement");
  cmd_shakedown->add_option("--grid-step", shakedown.grid_step, "oracle grid step (MPa)")
      ->check(CLI::PositiveNumber);
  cmd_shakedown->add_option("--tol-bisect", shakedown.tol_bisect, "relative bisection tolerance")
      ->check(CLI::PositiveNumber);
  cmd_shakedown->add_option("--max-iter", shakedown.max_iter, "projection sweeps per probe")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_gen) {
      gen.group = group_from_name(gen_group);
      cli::run_gen(gen);
    } else if (*cmd_train) {
      train.features = to_feature_columns(train_features);
      if (!train_picture.empty()) train.picture_id = train_picture;
      cli::run_train(train);
    } else if (*cmd_eval) {
      cli::run_eval(eval);
    } else if (*cmd_predict) {
      predict.train.features = to_feature_columns(predict_features);
      if (!predict.per_picture && predict.model.empty())
        throw std::invalid_argument("predict: --model is required unless --per-picture is set");
      cli::run_predict(predict);
    } else if (*cmd_bench) {
      bench.features = to_feature_columns(bench_features);
      if (!bench_picture.empty()) bench.picture_id = bench_picture;
      cli::run_bench(bench);
    } else if (*cmd_shakedown) {
      cli::run_shakedown(shakedown);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
