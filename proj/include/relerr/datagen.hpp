#pragma once

// Synthetic LTRC data: random curves, the regression operator, Gaussian noise,
// exponential censoring, Gaussian truncation and rejection sampling.
//
// Conventions: S ~ Exponential with *rate* mu (mean 1/mu); T ~ Normal(lambda,
// variance 2). mu = 0 disables censoring (S = +inf); lambda = -inf disables
// truncation.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "relerr/functional.hpp"
#include "relerr/random.hpp"
#include "relerr/survival.hpp"

namespace relerr {

inline constexpr double kNoCensoring = 0.0;
inline constexpr double kNoTruncation = -std::numeric_limits<double>::infinity();
inline constexpr double kTruncationVariance = 2.0;

struct CurveParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

CurveParams draw_curve_params(Engine& rng);

/// x(t) = a cos(2 pi t) + b sin(4 pi t) + c (t - 0.5)(t - 0.25)
Curve gen_curve(const CurveParams& params, const GridPtr& grid);

/// r(x) = int_0^1 x(t)^2 dt + 10 (trapezoid rule).
double true_regression(const Curve& c);

struct SimulationConfig {
  std::size_t n = 100;
  std::size_t grid_size = 100;
  double censor_target = 0.0;
  double trunc_target = 0.0;
  std::optional<double> mu;
  std::optional<double> lambda;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Latent {
  double y;
  double s;
};

struct SimulationResult {
  LtrcSample sample;
  std::vector<Latent> latent;
  std::size_t candidates = 0;  // N
  double mu = kNoCensoring;
  double lambda = kNoTruncation;
  double censor_rate = 0.0;    // fraction of kept records with delta = 0
  double trunc_rate = 0.0;     // 1 - n / N
};

/// Generator parameters with every rate resolved.
struct RateParams {
  double mu = kNoCensoring;
  double lambda = kNoTruncation;
  double noise_sd = 1.0;
};

/// Draws exactly `n` kept records from `rng` on `grid`.
SimulationResult simulate_with(std::size_t n, const RateParams& rates, const GridPtr& grid,
                               Engine& rng);

/// Resolves mu/lambda (calibrating whichever is missing) and simulates.
SimulationResult simulate(const SimulationConfig& config);

struct PilotRates {
  double censor_kept = 0.0;  // censoring fraction among kept candidates
  double censor_raw = 0.0;   // censoring fraction among all candidates
  double trunc = 0.0;        // rejected fraction
  std::size_t kept = 0;
};

/// Runs exactly `candidates` candidate draws and measures the achieved rates.
PilotRates pilot_rates(const RateParams& rates, std::size_t candidates, std::uint64_t seed,
                       std::size_t grid_size = 100);

struct CalibrationOptions {
  std::size_t pilot_size = 5000;
  std::uint64_t seed = 0x5eed;
  double tolerance = 0.01;
  int max_iterations = 40;
  std::size_t grid_size = 100;
  double noise_sd = 1.0;
};

double calibrate_censoring(double target, double lambda, const CalibrationOptions& opt = {});
double calibrate_truncation(double target, double mu, const CalibrationOptions& opt = {});

/// Joint calibration: lambda is bisected on the truncation rate, with mu
/// re-solved for the censoring target at every lambda.
RateParams calibrate_rates(double censor_target, double trunc_target,
                           const CalibrationOptions& opt = {});

}  // namespace relerr
