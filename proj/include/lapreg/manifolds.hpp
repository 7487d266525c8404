#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lapreg {

class Rng;

// Points are stored in a fixed 3-vector; unused trailing coordinates are 0.
using Point = std::array<double, 3>;

enum class Manifold {
  UnitSquare,  // [0,1]^2, d = m = 2, Euclidean metric
  FlatTorus,   // [0,1)^2 with the periodic metric, d = m = 2
  Sphere,      // unit sphere in R^3, d = 3, m = 2
};

int ambient_dim(Manifold m);
int intrinsic_dim(Manifold m);
bool has_boundary(Manifold m);
std::string_view to_string(Manifold m);
Manifold parse_manifold(std::string_view name);

// Squared distance in the metric used for graph construction and nearest
// neighbour search: Euclidean in R^d, periodic on the torus.
inline double squared_distance(Manifold m, const Point& a, const Point& b) {
  double dx = a[0] - b[0];
  double dy = a[1] - b[1];
  if (m == Manifold::FlatTorus) {
    dx = dx < 0 ? -dx : dx;
    dy = dy < 0 ? -dy : dy;
    if (dx > 0.5) dx = 1.0 - dx;
    if (dy > 0.5) dy = 1.0 - dy;
    return dx * dx + dy * dy;
  }
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

bool on_manifold(Manifold m, const Point& x, double tol = 1e-12);

struct PointCloud {
  Manifold manifold = Manifold::UnitSquare;
  std::vector<Point> points;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  int dim() const { return ambient_dim(manifold); }
};

// n i.i.d. uniform samples, drawn in index order from a seeded generator.
PointCloud sample_cloud(Manifold manifold, std::size_t n, std::uint64_t seed);

struct SineMode {
  double coefficient = 1.0;
  Point frequency{};  // integer wave vector k; the mode is a*sin(2*pi*<k,x>)

  bool operator==(const SineMode&) const = default;
};

struct Trend {
  enum class Kind { PaperSine, Constant, SumOfSines };
  Kind kind = Kind::PaperSine;
  double constant = 0.0;
  std::vector<SineMode> modes;

  static Trend paper_sine() { return {}; }
  static Trend constant_value(double c) { return {Kind::Constant, c, {}}; }
  static Trend sum_of_sines(std::vector<SineMode> modes) {
    return {Kind::SumOfSines, 0.0, std::move(modes)};
  }

  bool operator==(const Trend&) const = default;
};

double trend_eval(const Trend& trend, const Point& x);

// Laplace-Beltrami value with the positive sign convention -div(grad).
double trend_laplacian(const Trend& trend, Manifold manifold, const Point& x);

// Bounded mean-zero label noise.
struct NoiseModel {
  enum class Kind { SymmetricBernoulli, AsymmetricBernoulli, Uniform };
  Kind kind = Kind::SymmetricBernoulli;
  double sigma = 0.3;
  double p_plus = 0.8;  // AsymmetricBernoulli only

  static NoiseModel symmetric(double sigma) { return {Kind::SymmetricBernoulli, sigma, 0.5}; }
  static NoiseModel asymmetric(double sigma, double p_plus = 0.8) {
    return {Kind::AsymmetricBernoulli, sigma, p_plus};
  }
  static NoiseModel uniform(double sigma) { return {Kind::Uniform, sigma, 0.5}; }

  void validate() const;
  // Every draw lies in [-bound, bound].
  double support_bound() const;
  // Closed-form expectation.
  double mean() const;
  double sample(Rng& rng) const;

  bool operator==(const NoiseModel&) const = default;
};

struct LabeledDataset {
  PointCloud cloud;
  std::size_t q = 0;                // indices [0, q) are labeled
  std::vector<double> labels;       // size q
  std::vector<double> trend_values; // size n, for evaluation only
  std::uint64_t noise_seed = 0;

  std::size_t size() const { return cloud.size(); }
};

LabeledDataset make_dataset(const PointCloud& cloud, const Trend& trend, const NoiseModel& noise,
                            std::size_t q, std::uint64_t seed);

}  // namespace lapreg
