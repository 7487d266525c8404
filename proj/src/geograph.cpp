#include "lapreg/geograph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lapreg/error.hpp"
#include "lapreg/spatial_grid.hpp"

namespace lapreg {

namespace {

// Surface area of the unit sphere S^{m-1} in R^m.
double sphere_area(int m) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

void check_kernel(const Kernel& k) {
  require(k.dim >= 1, ErrorKind::InvalidArgument, "kernel dimension must be >= 1");
}

void check_length(const GeometricGraph& g, std::size_t len) {
  require(len == g.size(), ErrorKind::DimensionMismatch,
          "vector of length " + std::to_string(len) + " on graph with " + std::to_string(g.size()) +
              " vertices");
}

template <typename Candidates>
GeometricGraph assemble(const PointCloud& cloud, double eps, const Kernel& kernel,
                        Candidates&& candidates) {
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::InvalidArgument, "eps must be positive");
  check_kernel(kernel);
  const std::size_t n = cloud.size();
  const double eps2 = eps * eps;
  const double raw_scale =
      kernel.normalization() / (static_cast<double>(n) * std::pow(eps, kernel.dim));
  const auto& pts = cloud.points;

  // Upper-triangle neighbours of i, ascending.
  std::vector<std::uint32_t> upper;
  auto upper_row = [&](std::size_t i) {
    upper.clear();
    candidates(i, [&](std::uint32_t j) {
      if (j > i && squared_distance(cloud.manifold, pts[i], pts[j]) < eps2) upper.push_back(j);
    });
    std::sort(upper.begin(), upper.end());
  };

  // Pass 1: row lengths.
  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    upper_row(i);
    offsets[i + 1] += upper.size();
    for (auto j : upper) ++offsets[j + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];

  // Pass 2: each pair evaluated once (i < j) and mirrored. Rows come out
  // sorted because row j receives all i < j before its own upper part.
  std::vector<std::uint32_t> columns(offsets[n]);
  std::vector<double> eta(offsets[n]);
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    upper_row(i);
    for (auto j : upper) {
      const double dist = std::sqrt(squared_distance(cloud.manifold, pts[i], pts[j]));
      const double value = raw_scale * kernel.profile(dist / eps);
      columns[fill[i]] = j;
      eta[fill[i]++] = value;
      columns[fill[j]] = static_cast<std::uint32_t>(i);
      eta[fill[j]++] = value;
    }
  }
  return GeometricGraph(n, eps, kernel, std::move(offsets), std::move(columns), std::move(eta));
}

}  // namespace

double Kernel::normalization() const {
  check_kernel(*this);
  // Integral of the unnormalized profile over R^m in polar coordinates.
  const double shell = sphere_area(dim);
  const double mass = kind == KernelKind::TriangularBump ? shell / (dim * (dim + 1.0)) : shell / dim;
  return 1.0 / mass;
}

double Kernel::tau() const {
  // (1/m) * c * |S^{m-1}| * integral_0^1 r^{m+1} profile(r) dr
  const double radial = kind == KernelKind::TriangularBump ? 1.0 / ((dim + 2.0) * (dim + 3.0))
                                                           : 1.0 / (dim + 2.0);
  return normalization() * sphere_area(dim) * radial / dim;
}

double tau_eta(const Kernel& kernel) { return kernel.tau(); }

KernelKind parse_kernel(std::string_view name) {
  if (name == "bump" || name == "triangular") return KernelKind::TriangularBump;
  if (name == "indicator") return KernelKind::Indicator;
  throw Error(ErrorKind::ValidationError, "unknown kernel '" + std::string(name) + "'");
}

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::TriangularBump ? "bump" : "indicator";
}

GeometricGraph::GeometricGraph(std::size_t n, double eps, Kernel kernel,
                               std::vector<std::size_t> offsets, std::vector<std::uint32_t> columns,
                               std::vector<double> eta)
    : n_(n),
      eps_(eps),
      kernel_(kernel),
      weight_scale_(2.0 / (kernel.tau() * eps * eps)),
      offsets_(std::move(offsets)),
      columns_(std::move(columns)),
      eta_(std::move(eta)),
      degrees_(n, 0.0) {
  for (std::size_t i = 0; i < n_; ++i)
    for (auto e = offsets_[i]; e < offsets_[i + 1]; ++e) degrees_[i] += eta_[e];
}

std::vector<double> GeometricGraph::weighted_degrees() const {
  std::vector<double> d(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (auto e = offsets_[i]; e < offsets_[i + 1]; ++e) d[i] += weight(e);
  return d;
}

GeometricGraph build_graph(const PointCloud& cloud, double eps, const Kernel& kernel) {
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::InvalidArgument, "eps must be positive");
  const detail::SpatialGrid grid(cloud.manifold, cloud.points, eps);
  return assemble(cloud, eps, kernel, [&](std::size_t i, auto&& emit) {
    grid.for_each_in_block(cloud.points[i], emit);
  });
}

GeometricGraph build_graph_all_pairs(const PointCloud& cloud, double eps, const Kernel& kernel) {
  return assemble(cloud, eps, kernel, [&](std::size_t, auto&& emit) {
    for (std::size_t j = 0; j < cloud.size(); ++j) emit(static_cast<std::uint32_t>(j));
  });
}

void laplacian_apply(const GeometricGraph& graph, std::span<const double> u, std::span<double> out) {
  check_length(graph, u.size());
  check_length(graph, out.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    double acc = 0.0;
    const double ui = u[i];
    for (auto e = graph.row_begin(i); e < graph.row_end(i); ++e)
      acc += graph.weight(e) * (ui - u[graph.column(e)]);
    out[i] = acc;
  }
}

std::vector<double> laplacian_apply(const GeometricGraph& graph, std::span<const double> u) {
  std::vector<double> out(graph.size());
  laplacian_apply(graph, u, out);
  return out;
}

std::vector<double> random_walk_laplacian_apply(const GeometricGraph& graph,
                                                std::span<const double> u) {
  check_length(graph, u.size());
  const auto d = graph.weighted_degrees();
  std::vector<double> out(graph.size(), 0.0);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (d[i] == 0.0) continue;
    double acc = 0.0;
    for (auto e = graph.row_begin(i); e < graph.row_end(i); ++e)
      acc += (graph.weight(e) / d[i]) * (u[i] - u[graph.column(e)]);
    out[i] = acc;
  }
  return out;
}

double dirichlet_energy(const GeometricGraph& graph, std::span<const double> u) {
  check_length(graph, u.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (auto e = graph.row_begin(i); e < graph.row_end(i); ++e) {
      const double diff = u[i] - u[graph.column(e)];
      acc += graph.weight(e) * diff * diff;
    }
  return acc / static_cast<double>(graph.size());
}

std::vector<double> degrees(const GeometricGraph& graph) { return graph.degrees(); }

Eigen::MatrixXd dense_laplacian(const GeometricGraph& graph) {
  require(graph.size() <= kDenseLimit, ErrorKind::TooLargeForDense,
          "dense Laplacian limited to n <= " + std::to_string(kDenseLimit));
  const auto n = static_cast<Eigen::Index>(graph.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (auto e = graph.row_begin(i); e < graph.row_end(i); ++e) {
      const double w = graph.weight(e);
      L(i, graph.column(e)) -= w;
      L(i, i) += w;
    }
  return L;
}

}  // namespace lapreg
