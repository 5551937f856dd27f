#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "exsf/attenuation.hpp"
#include "exsf/config.hpp"
#include "exsf/errors.hpp"
#include "exsf/experiment.hpp"
#include "exsf/field_model.hpp"
#include "exsf/gpr.hpp"
#include "exsf/kernel.hpp"
#include "exsf/metrics.hpp"
#include "exsf/pnn.hpp"
#include "exsf/serialization.hpp"
#include "exsf/simulation.hpp"
#include "exsf/specfun.hpp"
#include "exsf/swf.hpp"

namespace py = pybind11;
using namespace exsf;

namespace {

// Positions cross the boundary as (n, 3) float arrays.
PositionList to_positions(const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>>& a) {
  PositionList out;
  out.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out.emplace_back(a(i, 0), a(i, 1), a(i, 2));
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> from_positions(const PositionList& p) {
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> out(static_cast<Eigen::Index>(p.size()), 3);
  for (std::size_t i = 0; i < p.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = p[i].transpose();
  return out;
}

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

}  // namespace

PYBIND11_MODULE(_exsf, m) {
  m.doc() = "Exterior sound field interpolation with attenuated spherical wave kernels";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<LinearSolveError>(m, "LinearSolveError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IngestionError>(m, "IngestionError", base.ptr());

  m.def("sph_hankel1", &specfun::sph_hankel1, py::arg("order"), py::arg("x"));
  m.def("legendre_poly", &specfun::legendre_poly, py::arg("order"), py::arg("t"));
  m.def("assoc_legendre", &specfun::assoc_legendre, py::arg("order"), py::arg("mode"), py::arg("t"));
  m.def(
      "sph_harmonic",
      [](int n, int mm, const Eigen::Vector3d& d) { return specfun::sph_harmonic({n, mm}, d); },
      py::arg("order"), py::arg("mode"), py::arg("direction"));

  py::class_<WaveContext>(m, "WaveContext")
      .def(py::init<double, double>(), py::arg("frequency_hz"), py::arg("speed_of_sound") = kDefaultSpeedOfSound)
      .def_property_readonly("frequency", &WaveContext::frequency)
      .def_property_readonly("speed_of_sound", &WaveContext::speed_of_sound)
      .def_property_readonly("wavenumber", &WaveContext::wavenumber);

  m.def("green_free", &green_free, py::arg("ctx"), py::arg("source"), py::arg("point"));
  m.def("psi", [](const WaveContext& ctx, int n, int mm, const Eigen::Vector3d& r) { return psi(ctx, {n, mm}, r); },
        py::arg("ctx"), py::arg("order"), py::arg("mode"), py::arg("r"));

  py::class_<ConstraintBox>(m, "ConstraintBox")
      .def(py::init<>())
      .def_readwrite("delta_min", &ConstraintBox::delta_min)
      .def_readwrite("delta_max", &ConstraintBox::delta_max)
      .def_readwrite("beta_min", &ConstraintBox::beta_min)
      .def_readwrite("beta_max", &ConstraintBox::beta_max);

  m.def("xi", &xi, py::arg("order"), py::arg("alpha"), py::arg("beta"));
  m.def("log_xi", &log_xi, py::arg("order"), py::arg("alpha"), py::arg("beta"));

  m.def(
      "kernel_eval",
      [](const WaveContext& ctx, double alpha, double beta, int order, const Eigen::Vector3d& r,
         const Eigen::Vector3d& rp) {
        AttenuationParams p;
        p.alpha = alpha;
        p.beta = beta;
        return kernel_eval(ctx, p, order, r, rp);
      },
      py::arg("ctx"), py::arg("alpha"), py::arg("beta"), py::arg("max_order"), py::arg("r"), py::arg("r_prime"));
  m.def(
      "gram_matrix",
      [](const WaveContext& ctx, double alpha, double beta, int order, const Points& pts) {
        AttenuationParams p;
        p.alpha = alpha;
        p.beta = beta;
        return gram_matrix(ctx, p, order, to_positions(pts));
      },
      py::arg("ctx"), py::arg("alpha"), py::arg("beta"), py::arg("max_order"), py::arg("positions"));
  m.def("krr_fit", &krr_fit, py::arg("gram"), py::arg("samples"), py::arg("lam"));
  m.def(
      "gpr_objective",
      [](const WaveContext& ctx, double alpha, double beta, int order, const Points& pts, const CVector& s,
         double lam, double lam_cond) {
        AttenuationParams p;
        p.alpha = alpha;
        p.beta = beta;
        return gpr_objective(ctx, p, order, to_positions(pts), s, lam, lam_cond);
      },
      py::arg("ctx"), py::arg("alpha"), py::arg("beta"), py::arg("max_order"), py::arg("positions"),
      py::arg("samples"), py::arg("lam"), py::arg("lam_cond") = kDefaultLambdaCond);
  m.def(
      "optimize_hyperparams",
      [](const WaveContext& ctx, int order, const Points& pts, const CVector& s, double lam, double lam_cond,
         const ConstraintBox& box) {
        const auto r = optimize_hyperparams(ctx, order, to_positions(pts), s, lam, lam_cond, box);
        return py::dict(py::arg("alpha") = r.params.alpha, py::arg("beta") = r.params.beta,
                        py::arg("objective") = r.objective, py::arg("initial_objective") = r.initial_objective,
                        py::arg("iterations") = r.iterations, py::arg("message") = r.message);
      },
      py::arg("ctx"), py::arg("max_order"), py::arg("positions"), py::arg("samples"), py::arg("lam"),
      py::arg("lam_cond") = kDefaultLambdaCond, py::arg("box") = ConstraintBox{});
  m.def(
      "loo_cv_krr",
      [](const CMatrix& k, const CVector& s, const std::vector<double>& lams) {
        const auto r = loo_cv_krr(k, s, lams);
        return py::make_tuple(r.best_lambda, r.scores);
      },
      py::arg("gram"), py::arg("samples"), py::arg("lambdas"));

  py::class_<KernelModel>(m, "KernelModel")
      .def_property_readonly("alpha", [](const KernelModel& km) { return km.params.alpha; })
      .def_property_readonly("beta", [](const KernelModel& km) { return km.params.beta; })
      .def_readonly("lam", &KernelModel::lambda)
      .def_readonly("max_order", &KernelModel::max_order)
      .def_readonly("coefficients", &KernelModel::coefficients)
      .def("predict", [](const KernelModel& km, const Points& pts) { return KernelPredictor(km).predict(to_positions(pts)); })
      .def("to_json", [](const KernelModel& km) { return to_json(km).dump(); })
      .def_static("from_json", [](const std::string& s) { return kernel_model_from_json(nlohmann::json::parse(s)); });
  m.def(
      "fit_kernel_model",
      [](const WaveContext& ctx, double alpha, double beta, int order, const Points& pts, const CVector& s,
         double lam) {
        AttenuationParams p;
        p.alpha = alpha;
        p.beta = beta;
        return fit_kernel_model(ctx, p, order, to_positions(pts), s, lam);
      },
      py::arg("ctx"), py::arg("alpha"), py::arg("beta"), py::arg("max_order"), py::arg("positions"),
      py::arg("samples"), py::arg("lam"));

  m.def("swf_truncation", &swf_truncation, py::arg("mic_count"));
  m.def("swf_basis", [](const WaveContext& ctx, const Points& pts, int order) { return swf_basis(ctx, to_positions(pts), order); },
        py::arg("ctx"), py::arg("points"), py::arg("max_order"));
  m.def(
      "swf_fit",
      [](const WaveContext& ctx, const Points& pts, int order, const CVector& s, double lam) {
        return swf_fit(swf_design_matrices(ctx, to_positions(pts), order), s, lam);
      },
      py::arg("ctx"), py::arg("positions"), py::arg("max_order"), py::arg("samples"), py::arg("lam"));

  m.def(
      "pnn_fit",
      [](const WaveContext& ctx, const Points& pts, const CVector& s, int neurons, double lam, double radius,
         std::uint64_t seed, int iterations) {
        PnnOptions o;
        o.iterations = iterations;
        const auto model = pnn_fit(ctx, to_positions(pts), s, neurons, lam, radius, seed, o);
        return py::make_tuple(model.weights, from_positions(model.centers));
      },
      py::arg("ctx"), py::arg("positions"), py::arg("samples"), py::arg("neurons") = 100, py::arg("lam") = 1e-2,
      py::arg("radius_bound") = 0.4, py::arg("seed") = 0, py::arg("iterations") = 3000);

  m.def("nmse_db", &nmse_db, py::arg("truth"), py::arg("estimate"));

  m.def(
      "scene_field",
      [](const WaveContext& ctx, const Points& sources, const std::vector<cdouble>& coeffs, const Points& pts) {
        MonopoleScene scene{to_positions(sources), coeffs};
        CVector out(pts.rows());
        for (Eigen::Index i = 0; i < pts.rows(); ++i) out(i) = scene_field(ctx, scene, pts.row(i).transpose());
        return out;
      },
      py::arg("ctx"), py::arg("sources"), py::arg("coefficients"), py::arg("points"));
  m.def(
      "load_tdesign",
      [](int order, int count, const std::filesystem::path& file) { return from_positions(load_tdesign(order, count, file)); },
      py::arg("order"), py::arg("points"), py::arg("file"));

  m.def("default_data_dir", []() { return std::string(EXSF_DEFAULT_DATA_DIR); });
  m.def(
      "validate_config",
      [](const std::filesystem::path& file) {
        const auto cfg = load_config(file);
        return py::make_tuple(config_to_json(cfg).dump(), config_hash(cfg));
      },
      py::arg("file"));
}
