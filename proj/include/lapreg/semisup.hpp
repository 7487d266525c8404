#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lapreg/manifolds.hpp"

namespace lapreg {

struct VoronoiAssignment {
  std::vector<std::size_t> owner;  // 0-based index of the nearest labeled point
  std::vector<double> extended_y;
};

// Nearest labeled point for every sample; ties go to the lowest index.
VoronoiAssignment voronoi_extend(const LabeledDataset& dataset);

// 1-NN extension of u to an arbitrary point; exact squared-distance ties are
// averaged.
double out_of_sample(const PointCloud& cloud, std::span<const double> u, const Point& x);

// Same rule for many queries, using a bucket index over the cloud.
std::vector<double> out_of_sample(const PointCloud& cloud, std::span<const double> u,
                                  std::span<const Point> queries);

struct VoronoiStats {
  double max_diameter = 0.0;
  std::size_t max_cell_count_in_ball = 0;
  std::size_t nonempty_cells_per_ball_max = 0;
};

// Empirical Voronoi diagnostics; balls are open with radius eps.
VoronoiStats voronoi_stats(const LabeledDataset& dataset, double eps);

// Mean label of the k nearest labeled points (ties by lowest index).
std::vector<double> knn_regress(const LabeledDataset& dataset, std::size_t k);

// k = round(sqrt(q)), clamped to [1, q].
std::size_t default_knn_k(std::size_t q);

}  // namespace lapreg
