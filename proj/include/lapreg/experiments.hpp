#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lapreg/geograph.hpp"
#include "lapreg/loss.hpp"
#include "lapreg/manifolds.hpp"
#include "lapreg/solver.hpp"

namespace lapreg {

struct Schedule {
  enum class Kind { Paper, Explicit };
  Kind kind = Kind::Paper;
  double eps = 0.0;   // Explicit only
  double beta = 0.0;  // Explicit only, PDE convention

  static Schedule paper() { return {}; }
  static Schedule explicit_values(double eps, double beta) { return {Kind::Explicit, eps, beta}; }

  // Paper: eps = beta = n^(-1/5).
  double eps_for(std::size_t n) const;
  double beta_for(std::size_t n) const;
  bool operator==(const Schedule&) const = default;
};

struct ExperimentConfig {
  Manifold manifold = Manifold::UnitSquare;
  Trend trend = Trend::paper_sine();
  NoiseModel noise = NoiseModel::symmetric(0.3);
  LossModel loss = LossModel::quadratic();
  KernelKind kernel = KernelKind::TriangularBump;
  std::size_t n = 0;
  std::size_t q = 0;  // 0 means q = n
  Schedule schedule;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = ".";
  std::size_t knn_k = 0;  // 0 means default_knn_k(q)
  SolverConfig solver;

  std::size_t labeled() const { return q == 0 ? n : q; }
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

struct StageTimes {
  double sample = 0.0;
  double label = 0.0;
  double extend = 0.0;
  double graph = 0.0;
  double solve = 0.0;
  double evaluate = 0.0;
  double total() const { return sample + label + extend + graph + solve + evaluate; }
};

struct ErrorReport {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t q = 0;
  double eps = 0.0;
  double beta = 0.0;
  PointCloud cloud;
  std::vector<double> u;
  std::vector<double> mu;
  std::vector<double> mu_f;
  std::vector<double> error;     // u - mu_f
  std::vector<double> error_mu;  // u - mu
  std::vector<bool> interior;

  double sup_error = 0.0;
  double interior_sup_error = 0.0;
  double rmse = 0.0;
  double interior_rmse = 0.0;
  double sup_error_mu = 0.0;
  double interior_sup_error_mu = 0.0;
  double interior_mean_error_mu = 0.0;  // mean of u - mu over the interior
  double interior_mean_offset = 0.0;    // mean of mu_f - mu over the interior

  std::size_t knn_k = 0;
  std::vector<double> knn_error;  // knn - mu_f
  double knn_sup_error = 0.0;
  double knn_interior_sup_error = 0.0;
  double knn_rmse = 0.0;

  std::size_t newton_iters = 0;
  std::size_t cg_iters = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  bool converged = false;
  std::vector<double> objective_history;
  StageTimes times;
};

// Interior region of experiment reports: [0.1, 0.9]^2 on the unit square,
// everything elsewhere.
bool in_report_interior(Manifold m, const Point& x);

ErrorReport run_experiment(const ExperimentConfig& config, std::uint64_t seed);
inline ErrorReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, config.seeds.empty() ? 1 : config.seeds.front());
}

struct RateRow {
  std::size_t n = 0;
  double eps = 0.0;
  double beta = 0.0;
  double median_sup = 0.0;
  double median_interior_sup = 0.0;
  double median_rmse = 0.0;
  bool operator==(const RateRow&) const = default;
};

double median(std::vector<double> values);

// Medians over seeds for each n (the schedule of base is kept).
std::vector<RateRow> rate_study(const ExperimentConfig& base, const std::vector<std::size_t>& n_list,
                                const std::vector<std::uint64_t>& seeds);

// Fixed n and eps, one row per beta.
std::vector<RateRow> beta_sweep(const ExperimentConfig& base, double eps,
                                const std::vector<double>& betas,
                                const std::vector<std::uint64_t>& seeds);

struct HeatmapImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> field;          // row-major, row 0 at the top (largest x2)
  std::vector<unsigned char> pixels;  // RGB
  double lo = 0.0;
  double hi = 0.0;
};

// Nearest-sample gridding of an idx,x1,x2,value CSV onto a size x size raster,
// written as binary PPM.
HeatmapImage render_heatmap(const std::string& csv_path, const std::string& out_path,
                            std::size_t size = 256);

}  // namespace lapreg
