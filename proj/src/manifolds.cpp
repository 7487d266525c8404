#include "lapreg/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lapreg/error.hpp"
#include "lapreg/rng.hpp"

namespace lapreg {

namespace {

constexpr double kPi = std::numbers::pi;

// a*sin(<w,x>) with its flat and spherical Laplacians.
struct Wave {
  double amplitude;
  Point omega;
};

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

template <typename Fn>
void for_each_wave(const Trend& trend, Fn&& fn) {
  switch (trend.kind) {
    case Trend::Kind::PaperSine:
      fn(Wave{0.5, {kPi, 0.0, 0.0}});
      fn(Wave{0.5, {0.0, kPi, 0.0}});
      break;
    case Trend::Kind::Constant:
      break;
    case Trend::Kind::SumOfSines:
      for (const auto& mode : trend.modes) {
        const auto& k = mode.frequency;
        fn(Wave{mode.coefficient, {2 * kPi * k[0], 2 * kPi * k[1], 2 * kPi * k[2]}});
      }
      break;
  }
}

}  // namespace

int ambient_dim(Manifold m) { return m == Manifold::Sphere ? 3 : 2; }

int intrinsic_dim(Manifold) { return 2; }

bool has_boundary(Manifold m) { return m == Manifold::UnitSquare; }

std::string_view to_string(Manifold m) {
  switch (m) {
    case Manifold::UnitSquare: return "unit_square";
    case Manifold::FlatTorus: return "flat_torus";
    case Manifold::Sphere: return "sphere";
  }
  return "unknown";
}

Manifold parse_manifold(std::string_view name) {
  if (name == "unit_square" || name == "square") return Manifold::UnitSquare;
  if (name == "flat_torus" || name == "torus") return Manifold::FlatTorus;
  if (name == "sphere") return Manifold::Sphere;
  throw Error(ErrorKind::ValidationError, "unknown manifold '" + std::string(name) + "'");
}

bool on_manifold(Manifold m, const Point& x, double tol) {
  switch (m) {
    case Manifold::UnitSquare:
      return x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= 0.0 && x[1] <= 1.0 && x[2] == 0.0;
    case Manifold::FlatTorus:
      return x[0] >= 0.0 && x[0] < 1.0 && x[1] >= 0.0 && x[1] < 1.0 && x[2] == 0.0;
    case Manifold::Sphere:
      return std::abs(std::sqrt(dot(x, x)) - 1.0) <= tol;
  }
  return false;
}

PointCloud sample_cloud(Manifold manifold, std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidArgument, "point cloud needs n >= 1");
  PointCloud cloud;
  cloud.manifold = manifold;
  cloud.seed = seed;
  cloud.points.resize(n);
  Rng rng(seed);
  for (auto& p : cloud.points) {
    if (manifold == Manifold::Sphere) {
      double norm = 0.0;
      do {
        p = {rng.normal(), rng.normal(), rng.normal()};
        norm = std::sqrt(dot(p, p));
      } while (norm < 1e-8);
      for (auto& c : p) c /= norm;
    } else {
      p = {rng.uniform(), rng.uniform(), 0.0};
    }
  }
  return cloud;
}

double trend_eval(const Trend& trend, const Point& x) {
  double value = trend.kind == Trend::Kind::Constant ? trend.constant : 0.0;
  for_each_wave(trend, [&](const Wave& w) { value += w.amplitude * std::sin(dot(w.omega, x)); });
  return value;
}

double trend_laplacian(const Trend& trend, Manifold manifold, const Point& x) {
  if (manifold == Manifold::FlatTorus && trend.kind == Trend::Kind::SumOfSines) {
    for (const auto& mode : trend.modes)
      for (double k : mode.frequency)
        require(k == std::round(k), ErrorKind::UnsupportedTrendManifoldPair,
                "torus sine modes need integer frequencies");
  }
  double value = 0.0;
  for_each_wave(trend, [&](const Wave& w) {
    const double phase = dot(w.omega, x);
    const double omega2 = dot(w.omega, w.omega);
    if (manifold == Manifold::Sphere) {
      // Ambient Laplacian minus the radial part, evaluated at |x| = 1.
      const double radial = dot(w.omega, x);
      value += w.amplitude *
               ((omega2 - radial * radial) * std::sin(phase) + 2.0 * radial * std::cos(phase));
    } else {
      value += w.amplitude * omega2 * std::sin(phase);
    }
  });
  return value;
}

void NoiseModel::validate() const {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::ValidationError,
          "noise sigma must be positive");
  if (kind == Kind::AsymmetricBernoulli)
    require(p_plus > 0.0 && p_plus < 1.0, ErrorKind::ValidationError, "p_plus must lie in (0, 1)");
}

double NoiseModel::support_bound() const {
  if (kind == Kind::AsymmetricBernoulli) return std::max(sigma, sigma * p_plus / (1.0 - p_plus));
  return sigma;
}

double NoiseModel::mean() const {
  switch (kind) {
    case Kind::SymmetricBernoulli: return 0.0;
    case Kind::AsymmetricBernoulli: {
      const double minus = sigma * p_plus / (1.0 - p_plus);
      return p_plus * sigma - (1.0 - p_plus) * minus;
    }
    case Kind::Uniform: return 0.0;
  }
  return 0.0;
}

double NoiseModel::sample(Rng& rng) const {
  switch (kind) {
    case Kind::SymmetricBernoulli: return rng.bernoulli(0.5) ? sigma : -sigma;
    case Kind::AsymmetricBernoulli:
      return rng.bernoulli(p_plus) ? sigma : -sigma * p_plus / (1.0 - p_plus);
    case Kind::Uniform: return sigma * (2.0 * rng.uniform() - 1.0);
  }
  return 0.0;
}

LabeledDataset make_dataset(const PointCloud& cloud, const Trend& trend, const NoiseModel& noise,
                            std::size_t q, std::uint64_t seed) {
  require(q >= 1 && q <= cloud.size(), ErrorKind::InvalidLabelCount,
          "label count q=" + std::to_string(q) + " outside [1, " + std::to_string(cloud.size()) +
              "]");
  noise.validate();
  LabeledDataset ds;
  ds.cloud = cloud;
  ds.q = q;
  ds.noise_seed = seed;
  ds.trend_values.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) ds.trend_values[i] = trend_eval(trend, cloud.points[i]);
  Rng rng(seed);
  ds.labels.resize(q);
  for (std::size_t i = 0; i < q; ++i) ds.labels[i] = ds.trend_values[i] + noise.sample(rng);
  return ds;
}

}  // namespace lapreg
