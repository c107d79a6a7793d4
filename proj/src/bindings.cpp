#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "simresnet/data_io.hpp"
#include "simresnet/forward.hpp"
#include "simresnet/gradient.hpp"
#include "simresnet/metrics.hpp"
#include "simresnet/shakedown.hpp"
#include "simresnet/trainer.hpp"

namespace py = pybind11;
using namespace simresnet;

namespace {

using PyMat = std::vector<std::vector<double>>;

Mat to_mat(const PyMat& rows) {
  Mat m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (rows[i].size() != m.cols)
      throw std::invalid_argument("matrix rows have unequal lengths");
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

PyMat from_mat(const Mat& m) {
  PyMat rows(m.rows, std::vector<double>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Micro-width residual network (Euler-stepped) and static shakedown solver";

  py::enum_<Activation>(m, "Activation")
      .value("Sigmoid", Activation::Sigmoid)
      .value("ReLU", Activation::ReLU);

  py::enum_<Group>(m, "Group").value("V", Group::V).value("RN", Group::RN);

  m.def("activation_eval", &activation_eval, py::arg("kind"), py::arg("x"));
  m.def("activation_deriv", &activation_deriv, py::arg("kind"), py::arg("x"));

  py::class_<LayerParams>(m, "LayerParams")
      .def(py::init([](const PyMat& weight, const Vec& bias) {
             return LayerParams{to_mat(weight), bias};
           }),
           py::arg("weight"), py::arg("bias"))
      .def_property_readonly("weight",
                             [](const LayerParams& l) { return from_mat(l.weight); })
      .def_readonly("bias", &LayerParams::bias);

  py::class_<Network>(m, "Network")
      .def_readonly("dt", &Network::dt)
      .def_readonly("activation", &Network::activation)
      .def_readonly("width", &Network::width)
      .def_readonly("feature_dim", &Network::feature_dim)
      .def_property_readonly("depth", &Network::depth)
      .def_readonly("layers", &Network::layers)
      .def("validate", &Network::validate);

  m.def(
      "make_network",
      [](std::size_t feature_dim, std::size_t width_multiplier, std::size_t depth,
         Activation activation, std::uint64_t seed) {
        Rng rng(seed, rng_stream::kInit);
        return make_network(feature_dim, width_multiplier, depth, activation, rng);
      },
      py::arg("feature_dim"), py::arg("width_multiplier"), py::arg("depth"),
      py::arg("activation"), py::arg("seed"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("states", &Trajectory::states)
      .def_property_readonly("output", [](const Trajectory& t) { return t.output(); });

  m.def("forward_step",
        [](const Vec& state, const LayerParams& layer, double dt, Activation kind,
           std::size_t width) { return forward_step(state, layer, dt, kind, width); },
        py::arg("state"), py::arg("layer"), py::arg("dt"), py::arg("kind"), py::arg("width"));
  m.def("forward_trajectory", &forward_trajectory, py::arg("x0"), py::arg("net"));
  m.def("refine_layers", &refine_layers, py::arg("net"), py::arg("factor"));

  m.def("loss", &loss, py::arg("output"), py::arg("target"));
  m.def("backprop_gradients",
        [](const Network& net, const Vec& x0, const Vec& target) {
          ParamGradients g = backprop_gradients(net, x0, target);
          std::vector<PyMat> weights;
          for (const Mat& w : g.weight) weights.push_back(from_mat(w));
          return py::make_tuple(weights, g.bias);
        },
        py::arg("net"), py::arg("x0"), py::arg("target"));
  m.def("finite_diff_gradients",
        [](const Network& net, const Vec& x0, const Vec& target, double eps) {
          ParamGradients g = finite_diff_gradients(net, x0, target, eps);
          std::vector<PyMat> weights;
          for (const Mat& w : g.weight) weights.push_back(from_mat(w));
          return py::make_tuple(weights, g.bias);
        },
        py::arg("net"), py::arg("x0"), py::arg("target"), py::arg("eps"));

  py::class_<PictureSample>(m, "PictureSample")
      .def(py::init([](std::string id, Group group, std::vector<std::string> names,
                       const PyMat& features, double target) {
             PictureSample pic;
             pic.picture_id = std::move(id);
             pic.group = group;
             pic.feature_names = std::move(names);
             pic.features = to_mat(features);
             pic.target = target;
             pic.validate();
             return pic;
           }),
           py::arg("picture_id"), py::arg("group"), py::arg("feature_names"),
           py::arg("features"), py::arg("target"))
      .def_readonly("picture_id", &PictureSample::picture_id)
      .def_readonly("group", &PictureSample::group)
      .def_readonly("feature_names", &PictureSample::feature_names)
      .def_property_readonly("features",
                             [](const PictureSample& p) { return from_mat(p.features); })
      .def_readonly("target", &PictureSample::target)
      .def_property_readonly("measurement_count", &PictureSample::measurement_count)
      .def_property_readonly("feature_dim", &PictureSample::feature_dim);

  py::class_<NormalizationTransform>(m, "NormalizationTransform")
      .def_readonly("feature_names", &NormalizationTransform::feature_names)
      .def_readonly("feature_min", &NormalizationTransform::feature_min)
      .def_readonly("feature_max", &NormalizationTransform::feature_max)
      .def_readonly("target_min", &NormalizationTransform::target_min)
      .def_readonly("target_max", &NormalizationTransform::target_max)
      .def("normalize_target", &NormalizationTransform::normalize_target)
      .def("denormalize_target", &NormalizationTransform::denormalize_target);

  m.def("normalize", &normalize, py::arg("pictures"));
  m.def("apply_transform", &apply_transform, py::arg("pictures"), py::arg("transform"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("max_iterations", &TrainConfig::max_iterations)
      .def_readwrite("depth", &TrainConfig::depth)
      .def_readwrite("activation", &TrainConfig::activation)
      .def_readwrite("validation_fraction", &TrainConfig::validation_fraction)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("averaging_count", &TrainConfig::averaging_count)
      .def_readwrite("width_multiplier", &TrainConfig::width_multiplier);

  py::enum_<StopReason>(m, "StopReason")
      .value("IterationCap", StopReason::IterationCap)
      .value("Plateau", StopReason::Plateau);

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("net", &TrainReport::net)
      .def_readonly("loss_history", &TrainReport::loss_history)
      .def_readonly("iterations_used", &TrainReport::iterations_used)
      .def_readonly("stop_reason", &TrainReport::stop_reason);

  m.def("train", &train, py::arg("picture"), py::arg("config"));
  m.def("train_averaged", &train_averaged, py::arg("pictures"), py::arg("config"));
  m.def("select_depth", &select_depth, py::arg("pictures_train"), py::arg("pictures_val"),
        py::arg("candidate_depths"), py::arg("config"));
  m.def("picture_eta", &picture_eta, py::arg("net"), py::arg("picture"));
  m.def("predict_limit", &predict_limit, py::arg("net"), py::arg("picture"),
        py::arg("transform"));
  m.def("make_wide", &make_wide, py::arg("feature_dim"), py::arg("width_multiplier"),
        py::arg("config"));

  m.def("picture_error", &picture_error, py::arg("outputs"), py::arg("target"));
  m.def("aggregate_errors", &aggregate_errors, py::arg("etas"));

  py::class_<Histogram>(m, "Histogram")
      .def_readonly("edges", &Histogram::edges)
      .def_readonly("counts", &Histogram::counts);
  m.def("histogram", &histogram, py::arg("values"), py::arg("bin_count"));

  py::class_<LognormalFit>(m, "LognormalFit")
      .def_readonly("mu", &LognormalFit::mu)
      .def_readonly("s", &LognormalFit::s);
  m.def("fit_lognormal", &fit_lognormal, py::arg("values"));

  py::class_<ChannelSpec>(m, "ChannelSpec")
      .def(py::init<double, double>(), py::arg("mu"), py::arg("s"))
      .def_readwrite("mu", &ChannelSpec::mu)
      .def_readwrite("s", &ChannelSpec::s);

  py::class_<GroupSpec>(m, "GroupSpec")
      .def_readwrite("group", &GroupSpec::group)
      .def_readwrite("feret", &GroupSpec::feret)
      .def_readwrite("area", &GroupSpec::area)
      .def_readwrite("aspect_ratio", &GroupSpec::aspect_ratio)
      .def_readwrite("target", &GroupSpec::target);
  m.def("default_group_spec", &default_group_spec, py::arg("group"));
  m.def("gen_synthetic", &gen_synthetic, py::arg("spec"), py::arg("picture_count"),
        py::arg("measurement_count"), py::arg("seed"));
  m.def("select_features", &select_features, py::arg("pictures"), py::arg("names"));
  m.def("load_pictures", &load_pictures, py::arg("path"));
  m.def("save_corpus_csv", &save_corpus_csv, py::arg("pictures"), py::arg("path"));
  m.def("save_model", &save_model, py::arg("net"), py::arg("transform"), py::arg("seed"),
        py::arg("path"));
  m.def(
      "load_model",
      [](const std::filesystem::path& path) {
        LoadedModel model = load_model(path);
        return py::make_tuple(model.net, model.transform, model.seed);
      },
      py::arg("path"));

  py::class_<StressVec>(m, "StressVec")
      .def(py::init<double, double, double>(), py::arg("sxx"), py::arg("syy"),
           py::arg("txy"))
      .def_readwrite("sxx", &StressVec::sxx)
      .def_readwrite("syy", &StressVec::syy)
      .def_readwrite("txy", &StressVec::txy);

  py::class_<GaussPointData>(m, "GaussPointData")
      .def(py::init([](std::vector<StressVec> stresses, double sigma_y) {
             return GaussPointData{std::move(stresses), sigma_y};
           }),
           py::arg("elastic_stress"), py::arg("yield_strength"))
      .def_readwrite("elastic_stress", &GaussPointData::elastic_stress)
      .def_readwrite("yield_strength", &GaussPointData::yield_strength);

  py::class_<ShakedownInstance>(m, "ShakedownInstance")
      .def(py::init([](std::vector<GaussPointData> points, const PyMat& equilibrium) {
             ShakedownInstance inst;
             inst.points = std::move(points);
             inst.equilibrium.rows = to_mat(equilibrium);
             if (inst.equilibrium.rows.rows == 0)
               inst.equilibrium.rows = Mat(0, 3 * inst.points.size());
             inst.validate();
             return inst;
           }),
           py::arg("points"), py::arg("equilibrium_rows") = PyMat{})
      .def_readonly("points", &ShakedownInstance::points)
      .def_property_readonly("gauss_point_count", &ShakedownInstance::gauss_point_count)
      .def_property_readonly("vertex_count", &ShakedownInstance::vertex_count);

  m.def("von_mises", &von_mises, py::arg("stress"));
  m.def(
      "feasible",
      [](const ShakedownInstance& inst, double alpha, double tol, std::size_t max_iter) {
        return feasible(inst, alpha, tol, max_iter);
      },
      py::arg("instance"), py::arg("alpha"), py::arg("tol"), py::arg("max_iter") = 10000);
  m.def(
      "shakedown_factor",
      [](const ShakedownInstance& inst, double tol_bisect, double tol_feas,
         std::size_t max_iter) {
        SolverSettings settings{tol_bisect, tol_feas, max_iter};
        ShakedownSolution sol = shakedown_factor(inst, settings);
        return py::make_tuple(sol.alpha, sol.residual);
      },
      py::arg("instance"), py::arg("tol_bisect") = 1e-3, py::arg("tol_feas") = -1.0,
      py::arg("max_iter") = 10000);
  m.def("brute_force_factor", &brute_force_factor, py::arg("instance"), py::arg("grid_step"));
}
