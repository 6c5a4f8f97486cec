#pragma once

// Relative-error kernel regression for LTRC responses and the weighted
// Nadaraya-Watson comparator, plus leave-one-out bandwidth selection.
//
// Both estimators use the survival weights w_i = delta_i / (L_n(Z_i) Gbar_n(Z_i)):
//   RER(x) = sum w_i K_i / Z_i   / sum w_i K_i / Z_i^2
//   NW(x)  = sum w_i K_i Z_i     / sum w_i K_i
// with K_i = K(d(x, x_i) / h). Normalizing constants cancel in the ratios.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "relerr/functional.hpp"
#include "relerr/survival.hpp"

namespace relerr {

enum class EstimatorKind { rer, nw };

std::string_view to_string(EstimatorKind kind) noexcept;

struct EstimatorConfig {
  Kernel kernel{};
  SemiMetric semimetric{};
  double bandwidth = 1.0;
  double weight_floor = 1e-10;

  void validate() const;
};

struct Prediction {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  std::size_t neighbors = 0;

  bool ok() const noexcept { return denominator > 0.0; }
};

/// Survival weights per record. Zero for censored records and wherever
/// L_n(Z_i) Gbar_n(Z_i) falls below `floor`.
std::vector<double> survival_weights(const LtrcSample& sample, double floor = 1e-10);

class FittedRegressor {
 public:
  FittedRegressor(LtrcSample sample, EstimatorConfig config, EstimatorKind kind);

  /// Never throws for an empty neighborhood; inspect Prediction::ok().
  Prediction evaluate(const Curve& query) const;
  /// Throws EmptyNeighborhood when no weighted record lies within the bandwidth.
  Prediction predict(const Curve& query) const;

  const LtrcSample& sample() const noexcept { return sample_; }
  const EstimatorConfig& config() const noexcept { return config_; }
  EstimatorKind kind() const noexcept { return kind_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  LtrcSample sample_;
  EstimatorConfig config_;
  EstimatorKind kind_;
  std::vector<double> weights_;
};

FittedRegressor fit(const LtrcSample& sample, const EstimatorConfig& config, EstimatorKind kind);
Prediction predict(const FittedRegressor& reg, const Curve& query);

/// Weighted kernel ratio from precomputed distances; record `skip` (if any) is
/// left out. Shared by prediction and cross-validation.
Prediction kernel_ratio(EstimatorKind kind, const Kernel& kernel, double bandwidth,
                        std::span<const double> distances, std::span<const double> weights,
                        std::span<const double> z, std::size_t skip = static_cast<std::size_t>(-1));

struct CvScore {
  double bandwidth = 0.0;
  double score = 0.0;           // weighted mean loss over evaluated records
  std::size_t evaluated = 0;    // records with a nonempty leave-one-out neighborhood
  std::size_t skipped = 0;      // weighted records whose neighborhood was empty
  bool usable() const noexcept { return evaluated > 0; }
};

struct BandwidthSelection {
  double bandwidth = 0.0;
  std::vector<CvScore> scores;
};

/// Leave-one-out cross-validation over a fixed sample. Survival weights and the
/// distance matrix are computed once; candidate bandwidths are scored
/// independently.
class CrossValidator {
 public:
  explicit CrossValidator(const LtrcSample& sample, double weight_floor = 1e-10, Kernel kernel = {});

  CvScore score(EstimatorKind kind, double bandwidth) const;
  BandwidthSelection select(EstimatorKind kind, std::span<const double> candidates) const;

  const DistanceMatrix& distances() const noexcept { return dist_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  Kernel kernel_;
  DistanceMatrix dist_;
  std::vector<double> weights_;
  std::vector<double> z_;
};

BandwidthSelection loo_cv_bandwidth(const LtrcSample& sample, EstimatorKind kind,
                                    std::span<const double> candidates);

/// Sample quantile with linear interpolation between order statistics.
double quantile_sorted(std::span<const double> sorted, double p);

/// `count` quantiles of the pairwise training distances at equally spaced
/// probabilities from 0.02 to 0.5, deduplicated and strictly positive.
std::vector<double> default_bandwidth_grid(const LtrcSample& sample, std::size_t count = 15);
std::vector<double> bandwidth_grid_from_distances(std::vector<double> distances, std::size_t count,
                                                  double lo_prob = 0.02, double hi_prob = 0.5);

}  // namespace relerr
