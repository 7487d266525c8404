#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lapreg/manifolds.hpp"

namespace lapreg {

enum class KernelKind {
  TriangularBump,  // c_m * (1 - t) on [0, 1]
  Indicator,       // c_m on [0, 1]; not Lipschitz
};

// Radial profile eta, normalized so that the integral of eta(|z|) over R^m is 1.
struct Kernel {
  KernelKind kind = KernelKind::TriangularBump;
  int dim = 2;  // intrinsic dimension m

  double normalization() const;  // c_m
  double operator()(double t) const { return normalization() * profile(t); }
  // Unnormalized shape on [0, 1], zero outside.
  double profile(double t) const {
    if (t < 0.0 || t > 1.0) return 0.0;
    return kind == KernelKind::TriangularBump ? 1.0 - t : 1.0;
  }
  // Second moment tau_eta = integral of |z_1|^2 eta(|z|) over R^m.
  double tau() const;
  // False for the indicator kernel, whose discontinuity violates the
  // Lipschitz hypothesis behind the pointwise consistency estimate.
  bool lipschitz() const { return kind == KernelKind::TriangularBump; }
};

double tau_eta(const Kernel& kernel);
KernelKind parse_kernel(std::string_view name);
std::string_view to_string(KernelKind kind);

// Epsilon-neighbourhood graph stored as CSR rows sorted by column. Each row
// holds the raw kernel values eta_ij = eta(|x_i - x_j| / eps) / (n eps^m);
// graph weights are w_ij = 2 / (tau_eta eps^2) * eta_ij, which equals
// 2 / (tau_eta eps^(m+2) n) * eta(|x_i - x_j| / eps).
class GeometricGraph {
 public:
  GeometricGraph() = default;
  GeometricGraph(std::size_t n, double eps, Kernel kernel, std::vector<std::size_t> offsets,
                 std::vector<std::uint32_t> columns, std::vector<double> eta);

  std::size_t size() const { return n_; }
  double eps() const { return eps_; }
  const Kernel& kernel() const { return kernel_; }
  std::size_t edge_count() const { return columns_.size(); }  // directed, both orderings

  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {columns_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> eta_row(std::size_t i) const {
    return {eta_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  double weight_scale() const { return weight_scale_; }
  double weight(std::size_t edge) const { return weight_scale_ * eta_[edge]; }
  std::size_t row_begin(std::size_t i) const { return offsets_[i]; }
  std::size_t row_end(std::size_t i) const { return offsets_[i + 1]; }
  std::uint32_t column(std::size_t edge) const { return columns_[edge]; }

  // g_i = sum_l eta_il over sampled neighbours (no self term).
  const std::vector<double>& degrees() const { return degrees_; }
  // d_i = sum_j w_ij.
  std::vector<double> weighted_degrees() const;

 private:
  std::size_t n_ = 0;
  double eps_ = 0.0;
  Kernel kernel_;
  double weight_scale_ = 0.0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> columns_;
  std::vector<double> eta_;
  std::vector<double> degrees_;
};

// Exact eps-graph (strict |x_i - x_j| < eps) via uniform buckets of side eps.
GeometricGraph build_graph(const PointCloud& cloud, double eps, const Kernel& kernel = {});

// Reference construction scanning all pairs; used to check build_graph.
GeometricGraph build_graph_all_pairs(const PointCloud& cloud, double eps, const Kernel& kernel = {});

// (L u)_i = sum_j w_ij (u_i - u_j), matrix-free.
std::vector<double> laplacian_apply(const GeometricGraph& graph, std::span<const double> u);
void laplacian_apply(const GeometricGraph& graph, std::span<const double> u, std::span<double> out);

// Random-walk variant with weights w_ij / d_i; isolated vertices map to 0.
std::vector<double> random_walk_laplacian_apply(const GeometricGraph& graph,
                                                std::span<const double> u);

// R(u) = (1/n) sum_{i,j} w_ij (u_i - u_j)^2 with both orderings counted.
double dirichlet_energy(const GeometricGraph& graph, std::span<const double> u);

std::vector<double> degrees(const GeometricGraph& graph);

// Dense Laplacian for small graphs (n <= 512) used by spectral oracles.
Eigen::MatrixXd dense_laplacian(const GeometricGraph& graph);
inline constexpr std::size_t kDenseLimit = 512;

}  // namespace lapreg
