#include "relerr/functional.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "relerr/errors.hpp"

namespace relerr {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidArgument("grid needs at least 2 points");
  for (double p : points_)
    if (!std::isfinite(p)) throw InvalidArgument("grid abscissae must be finite");
  const double span = points_.back() - points_.front();
  if (!(span > 0.0)) throw InvalidArgument("grid must be strictly increasing");
  spacing_ = span / static_cast<double>(points_.size() - 1);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double step = points_[i] - points_[i - 1];
    if (!(step > 0.0)) throw InvalidArgument("grid must be strictly increasing");
    if (std::abs(step - spacing_) > 1e-12 * spacing_ + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(points_[i]))
      throw InvalidArgument("grid must be equidistant (point " + std::to_string(i) + ")");
  }
}

GridPtr Grid::uniform(std::size_t count) {
  if (count < 2) throw InvalidArgument("grid needs at least 2 points");
  std::vector<double> pts(count);
  const double denom = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) pts[i] = static_cast<double>(i) / denom;
  return std::make_shared<const Grid>(std::move(pts));
}

double Grid::integrate(std::span<const double> values) const {
  if (values.size() != points_.size()) throw GridMismatch("value count differs from grid size");
  double inner = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) inner += values[i];
  return spacing_ * (0.5 * (values.front() + values.back()) + inner);
}

Curve::Curve(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("curve needs a grid");
  if (values_.size() != grid_->size())
    throw InvalidArgument("curve has " + std::to_string(values_.size()) + " values for a grid of " +
                          std::to_string(grid_->size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("curve values must be finite");
}

bool same_grid(const Curve& a, const Curve& b) noexcept {
  return a.grid_ptr() == b.grid_ptr() || a.grid() == b.grid();
}

double kernel_eval(const Kernel& k, double u) noexcept { return k(u); }

double l2_distance(const Curve& a, const Curve& b) {
  if (!same_grid(a, b)) throw GridMismatch("curves are observed on different grids");
  const auto x = a.values();
  const auto y = b.values();
  const std::size_t m = x.size();
  double inner = 0.0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double d = x[i] - y[i];
    inner += d * d;
  }
  const double d0 = x[0] - y[0];
  const double d1 = x[m - 1] - y[m - 1];
  const double integral = a.grid().spacing() * (0.5 * (d0 * d0 + d1 * d1) + inner);
  return std::sqrt(integral);
}

double SemiMetric::operator()(const Curve& a, const Curve& b) const { return l2_distance(a, b); }

std::vector<double> pairwise_distances(std::span<const Curve> targets, const Curve& reference) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& c : targets) out.push_back(l2_distance(c, reference));
  return out;
}

DistanceMatrix::DistanceMatrix(std::span<const Curve> curves)
    : n_(curves.size()), d_(curves.size() * curves.size(), 0.0) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double d = l2_distance(curves[i], curves[j]);
      d_[i * n_ + j] = d;
      d_[j * n_ + i] = d;
    }
}

std::vector<double> DistanceMatrix::upper_triangle() const {
  std::vector<double> out;
  out.reserve(n_ * (n_ - (n_ > 0)) / 2);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) out.push_back(d_[i * n_ + j]);
  return out;
}

}  // namespace relerr
