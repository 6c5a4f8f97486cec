#pragma once

// GMSE benchmark over (censoring, truncation, n) scenarios and the
// standardized-sensitivity-curve robustness experiment.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relerr/datagen.hpp"
#include "relerr/regression.hpp"

namespace relerr {

struct GmseResult {
  double value = 0.0;
  std::size_t valid = 0;
  std::size_t failed = 0;  // NaN cells (failed predictions), excluded
};

/// Mean squared error over a replicates x curves table. NaN estimates mark
/// failed predictions and are excluded from both sum and divisor.
GmseResult gmse(const std::vector<std::vector<double>>& estimates, std::span<const double> truths);

/// Same, with a truth per cell (evaluation curves drawn fresh per replicate).
GmseResult gmse(const std::vector<std::vector<double>>& estimates,
                const std::vector<std::vector<double>>& truths);

struct Scenario {
  double censor = 0.0;
  double trunc = 0.0;
  std::size_t n = 100;
};

/// The nine-row reference design (three n-sweep rows, three censoring
/// rows, three truncation rows).
std::vector<Scenario> default_scenarios();

struct BenchmarkSpec {
  std::size_t replicates = 200;  // B
  std::size_t eval_curves = 20;  // m
  std::vector<Scenario> scenarios;
  std::uint64_t seed = 0;
  std::size_t grid_size = 100;
  std::size_t bandwidth_count = 15;
  double noise_sd = 1.0;
  std::size_t pilot_size = 5000;
  std::size_t workers = 1;

  void validate() const;
};

struct EstimatorOutcome {
  double gmse = 0.0;
  std::size_t valid = 0;
  std::size_t failed = 0;
  double mean_bandwidth = 0.0;    // over replicates where CV succeeded
  std::size_t failed_fits = 0;    // replicates with no usable fit (all m cells failed)
};

struct ScenarioReport {
  Scenario scenario;
  RateParams rates;
  double mean_censor_rate = 0.0;  // achieved, averaged over replicates
  double mean_trunc_rate = 0.0;
  EstimatorOutcome rer;
  EstimatorOutcome nw;
};

struct GmseReport {
  std::vector<ScenarioReport> rows;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::size_t eval_curves = 0;
};

/// Per-replicate raw output, exposed for permutation and determinism checks.
struct ReplicateOutcome {
  std::vector<double> truths;
  std::vector<double> rer;
  std::vector<double> nw;
  double h_rer = 0.0;  // NaN when the estimator could not be fitted
  double h_nw = 0.0;
  double censor_rate = 0.0;
  double trunc_rate = 0.0;
};

ReplicateOutcome run_replicate(const Scenario& scenario, const RateParams& rates,
                               std::size_t eval_curves, std::size_t grid_size,
                               std::size_t bandwidth_count, std::uint64_t seed);

GmseReport run_benchmark(const BenchmarkSpec& spec);

/// (n + 1) (r_{n+1}(query) - r_n(query)), where fit_n1 was trained on fit_n's
/// sample plus exactly one record.
double ssc(const FittedRegressor& fit_n, const FittedRegressor& fit_n1, const Curve& query);

struct InfluencePoint {
  double distance = 0.0;
  double eif_rer = 0.0;
  double eif_nw = 0.0;
};

struct InfluenceSpec {
  std::size_t n = 300;
  double z0 = 300.0;
  double censor = 0.2;
  double trunc = 0.2;
  std::optional<RateParams> rates;  // skip calibration when set
  std::size_t probes = 20;
  std::uint64_t seed = 0;
  std::size_t grid_size = 100;
  std::size_t bandwidth_count = 15;
  double noise_sd = 1.0;
  std::size_t pilot_size = 5000;

  void validate() const;
};

struct InfluenceResult {
  std::vector<InfluencePoint> points;
  std::size_t skipped_probes = 0;  // probes where some prediction failed
  double h_rer = 0.0;
  double h_nw = 0.0;
  RateParams rates;
  std::size_t clean_size = 0;
  std::size_t contaminated_size = 0;
};

InfluenceResult run_influence(const InfluenceSpec& spec);

}  // namespace relerr
