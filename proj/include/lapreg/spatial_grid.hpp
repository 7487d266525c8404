#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "lapreg/manifolds.hpp"

namespace lapreg::detail {

// Uniform bucket grid over a point set. Every cell is at least `min_side`
// wide along each axis, so all points closer than min_side to a query lie in
// the 3^d block around the query's cell. On the torus the grid wraps; a torus
// grid with fewer than 3 cells per axis degenerates to a single cell, which
// turns every query into an exact all-pairs scan.
class SpatialGrid {
 public:
  SpatialGrid(Manifold manifold, std::span<const Point> points, double min_side)
      : dim_(ambient_dim(manifold)) {
    periodic_ = manifold == Manifold::FlatTorus;
    // Cap the cell count so tiny sides on small clouds stay cheap; coarser
    // cells never break exactness.
    const double max_per_axis =
        std::max(1.0, std::ceil(2.0 * std::pow(static_cast<double>(points.size()), 1.0 / dim_)));
    for (int k = 0; k < 3; ++k) {
      lo_[k] = 0.0;
      extent_[k] = 1.0;
      ncell_[k] = 1;
    }
    if (periodic_) {
      const double cells = std::min(std::floor(1.0 / min_side), max_per_axis);
      const int nc = cells >= 3.0 ? static_cast<int>(cells) : 1;
      ncell_[0] = ncell_[1] = nc;
    } else {
      for (int k = 0; k < dim_; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& p : points) {
          lo = std::min(lo, p[k]);
          hi = std::max(hi, p[k]);
        }
        if (points.empty()) lo = hi = 0.0;
        lo_[k] = lo;
        extent_[k] = std::max(hi - lo, 1e-300);
        const double cells = std::min(std::floor(extent_[k] / min_side), max_per_axis);
        ncell_[k] = std::max(1, static_cast<int>(cells));
      }
    }
    for (int k = 0; k < 3; ++k) side_[k] = extent_[k] / ncell_[k];
    min_cell_side_ = side_[0];
    for (int k = 1; k < dim_; ++k) min_cell_side_ = std::min(min_cell_side_, side_[k]);

    const std::size_t total = cell_count();
    cell_start_.assign(total + 1, 0);
    std::vector<std::uint32_t> owner(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      owner[i] = static_cast<std::uint32_t>(flat(cell_of(points[i])));
      ++cell_start_[owner[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) cell_start_[c + 1] += cell_start_[c];
    items_.resize(points.size());
    std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i)
      items_[fill[owner[i]]++] = static_cast<std::uint32_t>(i);
  }

  bool single_cell() const { return cell_count() == 1; }

  // Visits every indexed point in the 3^d cell block around x (each once).
  template <typename Fn>
  void for_each_in_block(const Point& x, Fn&& fn) const {
    const auto c = cell_of(x);
    std::array<std::size_t, 27> cells{};
    std::size_t count = 0;
    const int dz = dim_ == 3 ? 1 : 0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int e = -dz; e <= dz; ++e) {
          std::array<int, 3> o{c[0] + a, c[1] + b, c[2] + e};
          if (!normalize(o)) continue;
          cells[count++] = flat(o);
        }
    std::sort(cells.begin(), cells.begin() + count);
    count = static_cast<std::size_t>(std::unique(cells.begin(), cells.begin() + count) - cells.begin());
    for (std::size_t k = 0; k < count; ++k)
      for (auto idx = cell_start_[cells[k]]; idx < cell_start_[cells[k] + 1]; ++idx) fn(items_[idx]);
  }

  // Visits points ring by ring (Chebyshev distance in cells from x's cell).
  // Before ring r >= 1 is scanned, `done(bound2)` is asked whether the search
  // may stop, where bound2 is a lower bound on the squared distance of every
  // point not yet visited. Returns after all points were visited otherwise.
  template <typename Fn, typename Done>
  void for_each_by_ring(const Point& x, Fn&& fn, Done&& done) const {
    const auto c = cell_of(x);
    int max_ring = 0;
    for (int k = 0; k < dim_; ++k) max_ring = std::max(max_ring, ncell_[k]);
    if (periodic_) {
      // Beyond this ring wrapped offsets would alias; finish by brute force.
      const int safe = (std::min(ncell_[0], ncell_[1]) - 1) / 2;
      for (int r = 0; r <= safe; ++r) {
        if (r >= 1) {
          const double bound = (r - 1) * min_cell_side_;
          if (done(bound * bound)) return;
        }
        visit_ring(c, r, fn);
      }
      const double bound = safe * min_cell_side_;
      if (done(bound * bound)) return;
      // Remaining cells: everything outside the scanned block.
      for (std::size_t cell = 0; cell < cell_count(); ++cell) {
        const auto idx = unflat(cell);
        int cheb = 0;
        for (int k = 0; k < 2; ++k) {
          int d = std::abs(idx[k] - c[k]);
          d = std::min(d, ncell_[k] - d);
          cheb = std::max(cheb, d);
        }
        if (cheb <= safe) continue;
        for (auto it = cell_start_[cell]; it < cell_start_[cell + 1]; ++it) fn(items_[it]);
      }
      return;
    }
    for (int r = 0; r <= max_ring; ++r) {
      if (r >= 1) {
        const double bound = (r - 1) * min_cell_side_;
        if (done(bound * bound)) return;
      }
      visit_ring(c, r, fn);
    }
  }

 private:
  std::size_t cell_count() const {
    return static_cast<std::size_t>(ncell_[0]) * ncell_[1] * (dim_ == 3 ? ncell_[2] : 1);
  }

  std::array<int, 3> cell_of(const Point& x) const {
    std::array<int, 3> c{0, 0, 0};
    for (int k = 0; k < dim_; ++k) {
      double t = x[k];
      if (periodic_) t -= std::floor(t);
      const double rel = (t - lo_[k]) / side_[k];
      int idx = rel <= 0.0 ? 0 : static_cast<int>(std::min(rel, 1e9));
      c[k] = std::clamp(idx, 0, ncell_[k] - 1);
    }
    return c;
  }

  // Wraps (torus) or rejects (bounded) out-of-range cell coordinates.
  bool normalize(std::array<int, 3>& o) const {
    for (int k = 0; k < dim_; ++k) {
      if (periodic_) {
        o[k] = ((o[k] % ncell_[k]) + ncell_[k]) % ncell_[k];
      } else if (o[k] < 0 || o[k] >= ncell_[k]) {
        return false;
      }
    }
    return true;
  }

  std::size_t flat(const std::array<int, 3>& c) const {
    return (static_cast<std::size_t>(c[2]) * ncell_[1] + c[1]) * ncell_[0] + c[0];
  }

  std::array<int, 3> unflat(std::size_t cell) const {
    std::array<int, 3> c{};
    c[0] = static_cast<int>(cell % ncell_[0]);
    cell /= ncell_[0];
    c[1] = static_cast<int>(cell % ncell_[1]);
    c[2] = static_cast<int>(cell / ncell_[1]);
    return c;
  }

  template <typename Fn>
  void visit_ring(const std::array<int, 3>& c, int r, Fn& fn) const {
    const int rz = dim_ == 3 ? r : 0;
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b)
        for (int e = -rz; e <= rz; ++e) {
          if (std::max({std::abs(a), std::abs(b), std::abs(e)}) != r) continue;
          std::array<int, 3> o{c[0] + a, c[1] + b, c[2] + e};
          if (!normalize(o)) continue;
          const auto cell = flat(o);
          for (auto it = cell_start_[cell]; it < cell_start_[cell + 1]; ++it) fn(items_[it]);
        }
  }

  int dim_;
  bool periodic_ = false;
  std::array<double, 3> lo_{};
  std::array<double, 3> extent_{};
  std::array<double, 3> side_{};
  std::array<int, 3> ncell_{1, 1, 1};
  double min_cell_side_ = 1.0;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> items_;
};

}  // namespace lapreg::detail
