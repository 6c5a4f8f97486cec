#include "relerr/datagen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "relerr/errors.hpp"

namespace relerr {

CurveParams draw_curve_params(Engine& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  CurveParams p;
  p.a = u(rng);
  p.b = u(rng);
  p.c = u(rng);
  return p;
}

namespace {

void fill_curve(const CurveParams& p, const Grid& grid, std::vector<double>& out) {
  const auto t = grid.points();
  out.resize(t.size());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = p.a * std::cos(two_pi * t[i]) + p.b * std::sin(2.0 * two_pi * t[i]) +
             p.c * (t[i] - 0.5) * (t[i] - 0.25);
}

double regression_of(const Grid& grid, std::span<const double> x, std::vector<double>& scratch) {
  scratch.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = x[i] * x[i];
  return grid.integrate(scratch) + 10.0;
}

struct Draw {
  double y;
  double s;
  double t;
  double z;
  bool delta;
  bool kept;
};

// One candidate of the rejection sampler. The draw order (a, b, c, noise, S, T)
// is part of the determinism contract.
Draw draw_candidate(Engine& rng, const Grid& grid, const RateParams& rates,
                    std::vector<double>& curve, std::vector<double>& scratch) {
  fill_curve(draw_curve_params(rng), grid, curve);
  std::normal_distribution<double> noise(0.0, rates.noise_sd);
  Draw d{};
  d.y = regression_of(grid, curve, scratch) + noise(rng);
  d.s = std::numeric_limits<double>::infinity();
  if (rates.mu > 0.0) d.s = std::exponential_distribution<double>(rates.mu)(rng);
  d.t = kNoTruncation;
  if (std::isfinite(rates.lambda))
    d.t = std::normal_distribution<double>(rates.lambda, std::sqrt(kTruncationVariance))(rng);
  d.z = std::min(d.y, d.s);
  d.delta = d.y <= d.s;
  // Y <= 0 lies outside the relative-error domain; such a candidate is rejected.
  d.kept = d.y > 0.0 && d.z >= d.t;
  return d;
}

}  // namespace

Curve gen_curve(const CurveParams& params, const GridPtr& grid) {
  std::vector<double> v;
  fill_curve(params, *grid, v);
  return Curve(grid, std::move(v));
}

double true_regression(const Curve& c) {
  std::vector<double> scratch;
  return regression_of(c.grid(), c.values(), scratch);
}

void SimulationConfig::validate() const {
  if (n < 1) throw InvalidArgument("simulation needs n >= 1");
  if (grid_size < 2) throw InvalidArgument("grid size must be >= 2");
  if (!(censor_target >= 0.0 && censor_target <= 0.95))
    throw InvalidArgument("censoring target must lie in [0, 0.95]");
  if (!(trunc_target >= 0.0 && trunc_target <= 0.95))
    throw InvalidArgument("truncation target must lie in [0, 0.95]");
  if (mu && !(*mu >= 0.0)) throw InvalidArgument("mu must be >= 0 (0 disables censoring)");
  if (lambda && std::isnan(*lambda)) throw InvalidArgument("lambda is NaN");
  if (!(noise_sd >= 0.0)) throw InvalidArgument("noise sd must be >= 0");
}

SimulationResult simulate_with(std::size_t n, const RateParams& rates, const GridPtr& grid,
                               Engine& rng) {
  if (n < 1) throw InvalidArgument("simulation needs n >= 1");
  std::vector<LtrcRecord> records;
  std::vector<Latent> latent;
  records.reserve(n);
  latent.reserve(n);
  std::vector<double> curve;
  std::vector<double> scratch;
  std::size_t candidates = 0;
  std::size_t censored = 0;
  constexpr std::size_t check_every = 100000;
  while (records.size() < n) {
    const Draw d = draw_candidate(rng, *grid, rates, curve, scratch);
    ++candidates;
    if (d.kept) {
      records.emplace_back(Curve(grid, curve), d.z, d.t, d.delta);
      latent.push_back({d.y, d.s});
      censored += d.delta ? 0 : 1;
    }
    if (candidates % check_every == 0 &&
        static_cast<double>(records.size() + 1) / static_cast<double>(candidates) < 1e-4)
      throw RunawayRejection("acceptance probability below 1e-4 after " +
                             std::to_string(candidates) + " candidates");
  }
  SimulationResult out{LtrcSample(std::move(records)), std::move(latent), candidates,
                       rates.mu, rates.lambda};
  out.censor_rate = static_cast<double>(censored) / static_cast<double>(n);
  out.trunc_rate = 1.0 - static_cast<double>(n) / static_cast<double>(candidates);
  return out;
}

SimulationResult simulate(const SimulationConfig& config) {
  config.validate();
  CalibrationOptions opt;
  opt.seed = derive_seed(config.seed, {0xca1b});
  opt.grid_size = config.grid_size;
  opt.noise_sd = config.noise_sd;

  RateParams rates;
  rates.noise_sd = config.noise_sd;
  if (config.mu && config.lambda) {
    rates.mu = *config.mu;
    rates.lambda = *config.lambda;
  } else if (config.mu) {
    rates.mu = *config.mu;
    rates.lambda = calibrate_truncation(config.trunc_target, rates.mu, opt);
  } else if (config.lambda) {
    rates.lambda = *config.lambda;
    rates.mu = calibrate_censoring(config.censor_target, rates.lambda, opt);
  } else {
    rates = calibrate_rates(config.censor_target, config.trunc_target, opt);
    rates.noise_sd = config.noise_sd;
  }
  Engine rng(derive_seed(config.seed, {0x5a3b}));
  return simulate_with(config.n, rates, Grid::uniform(config.grid_size), rng);
}

PilotRates pilot_rates(const RateParams& rates, std::size_t candidates, std::uint64_t seed,
                       std::size_t grid_size) {
  if (candidates == 0) throw InvalidArgument("pilot needs at least one candidate");
  const auto grid = Grid::uniform(grid_size);
  Engine rng(seed);
  std::vector<double> curve;
  std::vector<double> scratch;
  std::size_t kept = 0;
  std::size_t kept_censored = 0;
  std::size_t raw_censored = 0;
  for (std::size_t k = 0; k < candidates; ++k) {
    const Draw d = draw_candidate(rng, *grid, rates, curve, scratch);
    raw_censored += d.delta ? 0 : 1;
    if (d.kept) {
      ++kept;
      kept_censored += d.delta ? 0 : 1;
    }
  }
  PilotRates p;
  p.kept = kept;
  const auto total = static_cast<double>(candidates);
  p.censor_raw = static_cast<double>(raw_censored) / total;
  // With nothing kept every candidate was lost; report full censoring so the
  // bisection keeps moving towards smaller rates.
  p.censor_kept = kept > 0 ? static_cast<double>(kept_censored) / static_cast<double>(kept) : 1.0;
  p.trunc = 1.0 - static_cast<double>(kept) / total;
  return p;
}

namespace {

// Bisection on an increasing rate(x). Stops once within tolerance.
template <class RateFn>
double bisect(RateFn rate, double lo, double hi, double target, const CalibrationOptions& opt,
              const char* what) {
  const double r_lo = rate(lo);
  const double r_hi = rate(hi);
  if (!(r_lo <= target && target <= r_hi))
    throw CalibrationFailed(std::string(what) + ": target " + std::to_string(target) +
                            " is not bracketed by achievable rates [" + std::to_string(r_lo) +
                            ", " + std::to_string(r_hi) + "]");
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < opt.max_iterations; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = rate(mid);
    if (std::abs(r - target) <= opt.tolerance) return mid;
    (r < target ? lo : hi) = mid;
  }
  return mid;
}

}  // namespace

double calibrate_censoring(double target, double lambda, const CalibrationOptions& opt) {
  if (!(target >= 0.0 && target <= 0.9))
    throw CalibrationFailed("censoring target must lie in [0, 0.9]");
  if (target == 0.0) return kNoCensoring;
  if (opt.pilot_size < 5000) throw InvalidArgument("calibration pilots need >= 5000 candidates");
  // Bisect on log(mu) so the bracket spans several orders of magnitude.
  auto rate = [&](double log_mu) {
    return pilot_rates({std::exp(log_mu), lambda, opt.noise_sd}, opt.pilot_size, opt.seed,
                       opt.grid_size)
        .censor_kept;
  };
  return std::exp(bisect(rate, std::log(1e-6), std::log(1e2), target, opt, "censoring"));
}

double calibrate_truncation(double target, double mu, const CalibrationOptions& opt) {
  if (!(target >= 0.0 && target <= 0.9))
    throw CalibrationFailed("truncation target must lie in [0, 0.9]");
  if (target == 0.0) return kNoTruncation;
  if (opt.pilot_size < 5000) throw InvalidArgument("calibration pilots need >= 5000 candidates");
  auto rate = [&](double lambda) {
    return pilot_rates({mu, lambda, opt.noise_sd}, opt.pilot_size, opt.seed, opt.grid_size).trunc;
  };
  return bisect(rate, -40.0, 80.0, target, opt, "truncation");
}

RateParams calibrate_rates(double censor_target, double trunc_target,
                           const CalibrationOptions& opt) {
  RateParams r;
  r.noise_sd = opt.noise_sd;
  if (trunc_target == 0.0) {
    r.mu = calibrate_censoring(censor_target, kNoTruncation, opt);
    return r;
  }
  if (censor_target == 0.0) {
    r.lambda = calibrate_truncation(trunc_target, kNoCensoring, opt);
    return r;
  }
  if (!(censor_target > 0.0 && censor_target <= 0.9))
    throw CalibrationFailed("censoring target must lie in [0, 0.9]");
  if (!(trunc_target > 0.0 && trunc_target <= 0.9))
    throw CalibrationFailed("truncation target must lie in [0, 0.9]");
  // Truncation acts mostly on censored candidates, so the two rates are
  // strongly coupled and alternating one-dimensional solves oscillate.
  // Solve nested instead: mu(lambda) hits the censoring target exactly (to a
  // tighter tolerance), and lambda is bisected on the resulting truncation.
  CalibrationOptions inner = opt;
  inner.tolerance = opt.tolerance / 4.0;
  auto mu_for = [&](double lambda) { return calibrate_censoring(censor_target, lambda, inner); };
  auto rate = [&](double lambda) {
    try {
      return pilot_rates({mu_for(lambda), lambda, opt.noise_sd}, opt.pilot_size, opt.seed,
                         opt.grid_size)
          .trunc;
    } catch (const CalibrationFailed&) {
      // No censoring rate reaches the target: nearly everything is truncated.
      return 1.0;
    }
  };
  r.lambda = bisect(rate, -40.0, 80.0, trunc_target, opt, "truncation");
  r.mu = mu_for(r.lambda);
  return r;
}

}  // namespace relerr
