#include "lapreg/semisup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "lapreg/error.hpp"
#include "lapreg/spatial_grid.hpp"

namespace lapreg {

namespace {

// Bucket side giving O(1) expected points per cell for `count` points.
double index_side(Manifold m, std::size_t count) {
  const double c = static_cast<double>(std::max<std::size_t>(count, 1));
  return m == Manifold::Sphere ? 2.0 / std::sqrt(c) : 1.0 / std::sqrt(c);
}

Point wrap(Manifold m, Point x) {
  if (m == Manifold::FlatTorus)
    for (int k = 0; k < 2; ++k) x[k] -= std::floor(x[k]);
  return x;
}

// Points of the cloud with index < count.
std::span<const Point> prefix(const PointCloud& cloud, std::size_t count) {
  return std::span<const Point>(cloud.points).first(count);
}

class NearestSearch {
 public:
  NearestSearch(Manifold m, std::span<const Point> pool)
      : manifold_(m), pool_(pool), grid_(m, pool, index_side(m, pool.size())) {}

  // All pool indices at the minimal squared distance, ascending.
  std::vector<std::uint32_t> nearest_ties(const Point& x) const {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> ties;
    grid_.for_each_by_ring(
        x,
        [&](std::uint32_t j) {
          const double d2 = squared_distance(manifold_, x, pool_[j]);
          if (d2 < best) {
            best = d2;
            ties.assign(1, j);
          } else if (d2 == best) {
            ties.push_back(j);
          }
        },
        [&](double bound2) { return best < bound2; });
    std::sort(ties.begin(), ties.end());
    return ties;
  }

  // k nearest by (squared distance, index).
  std::vector<std::uint32_t> k_nearest(const Point& x, std::size_t k) const {
    using Entry = std::pair<double, std::uint32_t>;
    std::priority_queue<Entry> heap;  // worst on top
    grid_.for_each_by_ring(
        x,
        [&](std::uint32_t j) {
          const Entry e{squared_distance(manifold_, x, pool_[j]), j};
          if (heap.size() < k) heap.push(e);
          else if (e < heap.top()) {
            heap.pop();
            heap.push(e);
          }
        },
        [&](double bound2) { return heap.size() == k && heap.top().first < bound2; });
    std::vector<std::uint32_t> out;
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top().second);
      heap.pop();
    }
    return out;
  }

 private:
  Manifold manifold_;
  std::span<const Point> pool_;
  detail::SpatialGrid grid_;
};

void check_dataset(const LabeledDataset& ds) {
  require(ds.q >= 1 && ds.q <= ds.size(), ErrorKind::InvalidLabelCount,
          "label count q=" + std::to_string(ds.q) + " outside [1, " + std::to_string(ds.size()) + "]");
  require(ds.labels.size() == ds.q, ErrorKind::DimensionMismatch, "labels must have length q");
}

}  // namespace

VoronoiAssignment voronoi_extend(const LabeledDataset& dataset) {
  check_dataset(dataset);
  const auto& cloud = dataset.cloud;
  VoronoiAssignment out;
  out.owner.resize(cloud.size());
  out.extended_y.resize(cloud.size());
  const NearestSearch search(cloud.manifold, prefix(cloud, dataset.q));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out.owner[i] = i < dataset.q ? i : search.nearest_ties(cloud.points[i]).front();
    out.extended_y[i] = dataset.labels[out.owner[i]];
  }
  return out;
}

double out_of_sample(const PointCloud& cloud, std::span<const double> u, const Point& query) {
  require(u.size() == cloud.size(), ErrorKind::DimensionMismatch, "u must have length n");
  const Point x = wrap(cloud.manifold, query);
  double best = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d2 = squared_distance(cloud.manifold, x, cloud.points[i]);
    if (d2 < best) {
      best = d2;
      sum = u[i];
      count = 1;
    } else if (d2 == best) {
      sum += u[i];
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

std::vector<double> out_of_sample(const PointCloud& cloud, std::span<const double> u,
                                  std::span<const Point> queries) {
  require(u.size() == cloud.size(), ErrorKind::DimensionMismatch, "u must have length n");
  const NearestSearch search(cloud.manifold, cloud.points);
  std::vector<double> out(queries.size());
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const auto ties = search.nearest_ties(wrap(cloud.manifold, queries[k]));
    double sum = 0.0;
    for (auto j : ties) sum += u[j];
    out[k] = sum / static_cast<double>(ties.size());
  }
  return out;
}

VoronoiStats voronoi_stats(const LabeledDataset& dataset, double eps) {
  require(eps > 0.0, ErrorKind::InvalidArgument, "eps must be positive");
  const auto assign = voronoi_extend(dataset);
  const auto& cloud = dataset.cloud;
  const std::size_t n = cloud.size();
  VoronoiStats stats;

  std::vector<std::vector<std::uint32_t>> cells(dataset.q);
  for (std::size_t i = 0; i < n; ++i) cells[assign.owner[i]].push_back(static_cast<std::uint32_t>(i));
  double max_d2 = 0.0;
  for (const auto& cell : cells)
    for (std::size_t a = 0; a < cell.size(); ++a)
      for (std::size_t b = a + 1; b < cell.size(); ++b)
        max_d2 = std::max(max_d2, squared_distance(cloud.manifold, cloud.points[cell[a]],
                                                   cloud.points[cell[b]]));
  stats.max_diameter = std::sqrt(max_d2);

  const detail::SpatialGrid grid(cloud.manifold, cloud.points, eps);
  const double eps2 = eps * eps;
  std::vector<std::size_t> counts(dataset.q, 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    grid.for_each_in_block(cloud.points[i], [&](std::uint32_t j) {
      if (squared_distance(cloud.manifold, cloud.points[i], cloud.points[j]) >= eps2) return;
      const auto l = assign.owner[j];
      if (counts[l]++ == 0) touched.push_back(l);
    });
    stats.nonempty_cells_per_ball_max = std::max(stats.nonempty_cells_per_ball_max, touched.size());
    for (auto l : touched) {
      stats.max_cell_count_in_ball = std::max(stats.max_cell_count_in_ball, counts[l]);
      counts[l] = 0;
    }
  }
  return stats;
}

std::vector<double> knn_regress(const LabeledDataset& dataset, std::size_t k) {
  check_dataset(dataset);
  require(k >= 1 && k <= dataset.q, ErrorKind::InvalidK,
          "k=" + std::to_string(k) + " outside [1, " + std::to_string(dataset.q) + "]");
  const auto& cloud = dataset.cloud;
  const NearestSearch search(cloud.manifold, prefix(cloud, dataset.q));
  std::vector<double> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto nearest = search.k_nearest(cloud.points[i], k);
    std::sort(nearest.begin(), nearest.end());
    double sum = 0.0;
    for (auto j : nearest) sum += dataset.labels[j];
    out[i] = sum / static_cast<double>(k);
  }
  return out;
}

std::size_t default_knn_k(std::size_t q) {
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(q))));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(q, 1));
}

}  // namespace lapreg
