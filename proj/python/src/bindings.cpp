#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "lapreg/error.hpp"
#include "lapreg/experiments.hpp"
#include "lapreg/io.hpp"
#include "lapreg/rng.hpp"
#include "lapreg/semisup.hpp"
#include "lapreg/solver.hpp"
#include "lapreg/validate.hpp"

namespace py = pybind11;
using namespace lapreg;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array points_array(const PointCloud& cloud) {
  const auto n = static_cast<py::ssize_t>(cloud.size());
  const py::ssize_t d = cloud.dim();
  Array out({n, d});
  auto v = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i)
    for (py::ssize_t k = 0; k < d; ++k) v(i, k) = cloud.points[i][k];
  return out;
}

PointCloud cloud_from(const Array& pts, const std::string& manifold) {
  PointCloud cloud;
  cloud.manifold = parse_manifold(manifold);
  require(pts.ndim() == 2 && pts.shape(1) == cloud.dim(), ErrorKind::DimensionMismatch,
          "points must have shape (n, " + std::to_string(cloud.dim()) + ") for " + manifold);
  auto v = pts.unchecked<2>();
  cloud.points.resize(static_cast<std::size_t>(pts.shape(0)));
  for (py::ssize_t i = 0; i < pts.shape(0); ++i)
    for (py::ssize_t k = 0; k < pts.shape(1); ++k) cloud.points[i][k] = v(i, k);
  return cloud;
}

std::vector<double> vec(const Array& a) {
  require(a.ndim() == 1, ErrorKind::DimensionMismatch, "expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

Array arr(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Trend trend_from(const std::string& s) {
  if (s == "paper_sine") return Trend::paper_sine();
  if (s == "torus_sine") return Trend::sum_of_sines({{0.5, {1.0, 0.0, 0.0}}, {0.5, {0.0, 1.0, 0.0}}});
  if (s.rfind("constant:", 0) == 0) return Trend::constant_value(std::stod(s.substr(9)));
  throw Error(ErrorKind::ValidationError, "unknown trend '" + s + "'");
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["u"] = arr(r.u);
  d["converged"] = r.converged;
  d["status"] = std::string(to_string(r.status));
  d["newton_iters"] = r.newton_iters;
  d["cg_iters"] = r.cg_iters_total;
  d["objective_history"] = r.objective_history;
  d["residual_history"] = r.residual_history;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph Laplacian regularized regression";
  m.attr("__version__") = std::string(kVersion);

  static py::exception<Error> error_type(m, "LapregError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  m.def("sample_cloud", [](const std::string& manifold, std::size_t n, std::uint64_t seed) {
    return points_array(sample_cloud(parse_manifold(manifold), n, seed));
  }, py::arg("manifold"), py::arg("n"), py::arg("seed"));

  m.def("generate", [](const std::string& manifold, std::size_t n, std::size_t q, std::uint64_t seed,
                       const std::string& trend, const std::string& noise) {
    const auto cloud = sample_cloud(parse_manifold(manifold), n, derive_seed(seed, 0));
    const auto ds = make_dataset(cloud, trend_from(trend), parse_noise(noise), q == 0 ? n : q, derive_seed(seed, 1));
    return py::make_tuple(points_array(ds.cloud), arr(ds.labels), arr(ds.trend_values));
  }, py::arg("manifold"), py::arg("n"), py::arg("q") = 0, py::arg("seed") = 1, py::arg("trend") = "paper_sine",
     py::arg("noise") = "sym:0.3",
     "Points, the q labels and the noiseless trend, using the same seed streams as the CLI.");

  py::class_<GeometricGraph>(m, "Graph")
      .def_property_readonly("size", &GeometricGraph::size)
      .def_property_readonly("eps", &GeometricGraph::eps)
      .def_property_readonly("edge_count", &GeometricGraph::edge_count)
      .def("laplacian", [](const GeometricGraph& g, const Array& u) { return arr(laplacian_apply(g, vec(u))); })
      .def("dirichlet_energy", [](const GeometricGraph& g, const Array& u) { return dirichlet_energy(g, vec(u)); })
      .def("weighted_degrees", [](const GeometricGraph& g) { return arr(g.weighted_degrees()); });

  m.def("build_graph", [](const Array& pts, const std::string& manifold, double eps, const std::string& kernel) {
    const auto cloud = cloud_from(pts, manifold);
    return build_graph(cloud, eps, {parse_kernel(kernel), intrinsic_dim(cloud.manifold)});
  }, py::arg("points"), py::arg("manifold"), py::arg("eps"), py::arg("kernel") = "bump");

  m.def("solve", [](const GeometricGraph& g, const Array& y, double beta, const std::string& loss) {
    py::gil_scoped_release nogil;
    const auto r = solve_semilinear(g, vec(y), beta, parse_loss(loss));
    py::gil_scoped_acquire gil;
    return report_dict(r);
  }, py::arg("graph"), py::arg("y"), py::arg("beta"), py::arg("loss") = "quadratic",
     "Solve beta L u + f(u - y) = 0; beta is the PDE coefficient (4x the variational weight).");

  m.def("residual", [](const GeometricGraph& g, const Array& u, const Array& y, double beta, const std::string& loss) {
    return arr(residual(g, vec(u), vec(y), beta, parse_loss(loss)));
  }, py::arg("graph"), py::arg("u"), py::arg("y"), py::arg("beta"), py::arg("loss") = "quadratic");

  m.def("variational_beta", &variational_beta);
  m.def("pde_beta", &pde_beta);

  m.def("voronoi_extend", [](const Array& pts, const std::string& manifold, const Array& labels) {
    LabeledDataset ds;
    ds.cloud = cloud_from(pts, manifold);
    ds.labels = vec(labels);
    ds.q = ds.labels.size();
    ds.trend_values.assign(ds.cloud.size(), 0.0);
    const auto a = voronoi_extend(ds);
    return py::make_tuple(a.owner, arr(a.extended_y));
  }, py::arg("points"), py::arg("manifold"), py::arg("labels"),
     "Labels belong to the first len(labels) points; returns (owner, extended labels).");

  m.def("out_of_sample", [](const Array& pts, const std::string& manifold, const Array& u, const Array& queries) {
    const auto cloud = cloud_from(pts, manifold);
    const auto q = cloud_from(queries, manifold);
    return arr(out_of_sample(cloud, vec(u), q.points));
  }, py::arg("points"), py::arg("manifold"), py::arg("u"), py::arg("queries"));

  m.def("modified_trend", [](const std::string& loss, const std::string& noise, double mu) {
    return modified_trend(parse_loss(loss), parse_noise(noise), mu);
  }, py::arg("loss"), py::arg("noise"), py::arg("mu"));

  m.def("run_experiment", [](const std::string& config_json, std::optional<std::uint64_t> seed) {
    const auto cfg = parse_config(config_json);
    ErrorReport r;
    {
      py::gil_scoped_release nogil;
      r = seed ? run_experiment(cfg, *seed) : run_experiment(cfg);
    }
    py::dict d;
    d["points"] = points_array(r.cloud);
    d["u"] = arr(r.u);
    d["mu"] = arr(r.mu);
    d["mu_f"] = arr(r.mu_f);
    d["error"] = arr(r.error);
    for (auto [k, v] : {std::pair{"eps", r.eps}, {"beta", r.beta}, {"sup_error", r.sup_error},
                        {"interior_sup_error", r.interior_sup_error}, {"rmse", r.rmse},
                        {"interior_rmse", r.interior_rmse}, {"sup_error_mu", r.sup_error_mu},
                        {"interior_sup_error_mu", r.interior_sup_error_mu},
                        {"interior_mean_error_mu", r.interior_mean_error_mu},
                        {"interior_mean_offset", r.interior_mean_offset}, {"knn_sup_error", r.knn_sup_error},
                        {"knn_rmse", r.knn_rmse}})
      d[k] = v;
    d["knn_k"] = r.knn_k;
    d["converged"] = r.converged;
    d["status"] = std::string(to_string(r.status));
    return d;
  }, py::arg("config_json"), py::arg("seed") = py::none());

  m.def("bias_check", [](double beta, std::size_t grid, const std::string& loss, const std::string& noise,
                         const std::string& trend) {
    const auto t = trend_from(trend);
    const auto l = parse_loss(loss);
    const auto z = parse_noise(noise);
    const auto sol = continuum_solve(t, z, l, beta, grid);
    const auto b = bias_check(sol, t, l, z);
    py::dict d;
    d["sup_dev"] = b.sup_dev;
    d["bound"] = b.bound;
    d["c1"] = b.c1;
    d["status"] = std::string(to_string(sol.status));
    return d;
  }, py::arg("beta"), py::arg("grid") = 128, py::arg("loss") = "quartic", py::arg("noise") = "asym:0.3:0.8",
     py::arg("trend") = "torus_sine");
}
