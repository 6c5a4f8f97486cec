#pragma once

// Discretized curves, the L2 semi-metric and the smoothing kernel.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace relerr {

/// Equidistant, strictly increasing abscissae shared by every curve of a dataset.
class Grid {
 public:
  explicit Grid(std::vector<double> points);

  /// `count` equidistant points on [0, 1].
  static std::shared_ptr<const Grid> uniform(std::size_t count = 100);

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double spacing() const noexcept { return spacing_; }

  /// Trapezoid rule for samples taken on this grid.
  double integrate(std::span<const double> values) const;

  bool operator==(const Grid& other) const noexcept { return points_ == other.points_; }

 private:
  std::vector<double> points_;
  double spacing_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

class Curve {
 public:
  Curve(GridPtr grid, std::vector<double> values);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// True when both curves live on the same grid (same object or identical abscissae).
bool same_grid(const Curve& a, const Curve& b) noexcept;

enum class KernelKind { asymmetric_quadratic };

struct Kernel {
  KernelKind kind = KernelKind::asymmetric_quadratic;

  // K(u) = 1.5 (1 - u^2) on [0, 1), zero elsewhere. K(0) is kept so an exact
  // match receives full weight.
  double operator()(double u) const noexcept {
    return (u >= 0.0 && u < 1.0) ? 1.5 * (1.0 - u * u) : 0.0;
  }
};

double kernel_eval(const Kernel& k, double u) noexcept;

enum class SemiMetricKind { l2 };

struct SemiMetric {
  SemiMetricKind kind = SemiMetricKind::l2;
  double operator()(const Curve& a, const Curve& b) const;
};

/// sqrt(int (a - b)^2) by the trapezoid rule on the shared grid.
double l2_distance(const Curve& a, const Curve& b);

std::vector<double> pairwise_distances(std::span<const Curve> targets, const Curve& reference);

/// Symmetric n x n matrix of L2 distances, row-major.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::span<const Curve> curves);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(d_).subspan(i * n_, n_);
  }
  /// Strict upper triangle, i < j.
  std::vector<double> upper_triangle() const;

 private:
  std::size_t n_;
  std::vector<double> d_;
};

}  // namespace relerr
