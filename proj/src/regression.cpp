#include "relerr/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "relerr/errors.hpp"

namespace relerr {

std::string_view to_string(EstimatorKind kind) noexcept {
  return kind == EstimatorKind::rer ? "rer" : "nw";
}

void EstimatorConfig::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw InvalidArgument("bandwidth must be positive and finite");
  if (!(weight_floor > 0.0)) throw InvalidArgument("weight floor must be positive");
}

std::vector<double> survival_weights(const LtrcSample& sample, double floor) {
  const SurvivalEstimates est(sample);
  std::vector<double> w(sample.size(), 0.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& r = sample[i];
    if (!r.delta()) continue;
    const double denom = est.L(r.z()) * (1.0 - est.G(r.z()));
    if (denom >= floor) w[i] = 1.0 / denom;
  }
  return w;
}

Prediction kernel_ratio(EstimatorKind kind, const Kernel& kernel, double bandwidth,
                        std::span<const double> distances, std::span<const double> weights,
                        std::span<const double> z, std::size_t skip) {
  Prediction p;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (i == skip || weights[i] == 0.0) continue;
    const double k = kernel(distances[i] / bandwidth);
    if (k == 0.0) continue;
    const double wk = weights[i] * k;
    ++p.neighbors;
    if (kind == EstimatorKind::rer) {
      const double inv = 1.0 / z[i];
      p.numerator += wk * inv;
      p.denominator += wk * inv * inv;
    } else {
      p.numerator += wk * z[i];
      p.denominator += wk;
    }
  }
  p.value = p.ok() ? p.numerator / p.denominator : std::numeric_limits<double>::quiet_NaN();
  return p;
}

FittedRegressor::FittedRegressor(LtrcSample sample, EstimatorConfig config, EstimatorKind kind)
    : sample_(std::move(sample)), config_(config), kind_(kind) {
  config_.validate();
  weights_ = survival_weights(sample_, config_.weight_floor);
  if (std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 0.0; }))
    throw DegenerateFit("every survival weight is zero (no usable uncensored record)");
}

Prediction FittedRegressor::evaluate(const Curve& query) const {
  std::vector<double> d(sample_.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = weights_[i] == 0.0 ? 0.0 : config_.semimetric(query, sample_[i].curve());
  const auto z = sample_.z();
  return kernel_ratio(kind_, config_.kernel, config_.bandwidth, d, weights_, z);
}

Prediction FittedRegressor::predict(const Curve& query) const {
  auto p = evaluate(query);
  if (!p.ok())
    throw EmptyNeighborhood("no uncensored training curve within bandwidth " +
                                std::to_string(config_.bandwidth) + " of the query",
                            p.neighbors);
  return p;
}

FittedRegressor fit(const LtrcSample& sample, const EstimatorConfig& config, EstimatorKind kind) {
  return FittedRegressor(sample, config, kind);
}

Prediction predict(const FittedRegressor& reg, const Curve& query) { return reg.predict(query); }

CrossValidator::CrossValidator(const LtrcSample& sample, double weight_floor, Kernel kernel)
    : kernel_(kernel),
      dist_(sample.curves()),
      weights_(survival_weights(sample, weight_floor)),
      z_(sample.z()) {}

CvScore CrossValidator::score(EstimatorKind kind, double bandwidth) const {
  CvScore s;
  s.bandwidth = bandwidth;
  double loss = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < z_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    const auto p = kernel_ratio(kind, kernel_, bandwidth, dist_.row(i), weights_, z_, i);
    if (!p.ok()) {
      ++s.skipped;
      continue;
    }
    double e = z_[i] - p.value;
    if (kind == EstimatorKind::rer) e /= z_[i];
    loss += weights_[i] * e * e;
    mass += weights_[i];
    ++s.evaluated;
  }
  s.score = s.evaluated > 0 ? loss / mass : std::numeric_limits<double>::infinity();
  return s;
}

BandwidthSelection CrossValidator::select(EstimatorKind kind,
                                          std::span<const double> candidates) const {
  if (candidates.empty()) throw InvalidArgument("bandwidth candidate grid is empty");
  BandwidthSelection sel;
  const CvScore* best = nullptr;
  for (double h : candidates) {
    if (!(h > 0.0)) throw InvalidArgument("bandwidth candidates must be positive");
    sel.scores.push_back(score(kind, h));
  }
  for (const auto& s : sel.scores) {
    if (!s.usable()) continue;
    if (best == nullptr || s.score < best->score ||
        (s.score == best->score && s.bandwidth < best->bandwidth))
      best = &s;
  }
  if (best == nullptr)
    throw BandwidthSelectionFailed("every candidate bandwidth leaves all leave-one-out "
                                   "neighborhoods empty");
  sel.bandwidth = best->bandwidth;
  return sel;
}

BandwidthSelection loo_cv_bandwidth(const LtrcSample& sample, EstimatorKind kind,
                                    std::span<const double> candidates) {
  if (sample.size() < 2) throw InvalidArgument("cross-validation needs at least 2 records");
  return CrossValidator(sample).select(kind, candidates);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sequence");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> bandwidth_grid_from_distances(std::vector<double> distances, std::size_t count,
                                                  double lo_prob, double hi_prob) {
  if (count == 0) throw InvalidArgument("bandwidth grid count must be positive");
  std::sort(distances.begin(), distances.end());
  if (distances.empty() || !(distances.back() > 0.0))
    throw DegenerateDesign("all pairwise curve distances are zero");
  std::vector<double> grid;
  for (std::size_t k = 0; k < count; ++k) {
    const double p = count == 1 ? hi_prob
                                : lo_prob + (hi_prob - lo_prob) * static_cast<double>(k) /
                                                static_cast<double>(count - 1);
    const double q = quantile_sorted(distances, p);
    if (q > 0.0 && (grid.empty() || q != grid.back())) grid.push_back(q);
  }
  if (grid.empty()) throw DegenerateDesign("every bandwidth quantile is zero");
  return grid;
}

std::vector<double> default_bandwidth_grid(const LtrcSample& sample, std::size_t count) {
  if (sample.size() < 2) throw InvalidArgument("bandwidth grid needs at least 2 records");
  return bandwidth_grid_from_distances(DistanceMatrix(sample.curves()).upper_triangle(), count);
}

}  // namespace relerr
