#include "relerr/evaluation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "relerr/errors.hpp"
#include "relerr/parallel.hpp"

namespace relerr {

GmseResult gmse(const std::vector<std::vector<double>>& estimates, std::span<const double> truths) {
  GmseResult r;
  double sum = 0.0;
  for (const auto& row : estimates) {
    if (row.size() != truths.size())
      throw InvalidArgument("estimate row length differs from the number of truths");
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (std::isnan(row[k])) {
        ++r.failed;
        continue;
      }
      const double e = row[k] - truths[k];
      sum += e * e;
      ++r.valid;
    }
  }
  if (r.valid == 0) throw EmptyReport("no valid prediction to average");
  r.value = sum / static_cast<double>(r.valid);
  return r;
}

GmseResult gmse(const std::vector<std::vector<double>>& estimates,
                const std::vector<std::vector<double>>& truths) {
  if (estimates.size() != truths.size())
    throw InvalidArgument("estimate and truth tables have different replicate counts");
  GmseResult r;
  double sum = 0.0;
  for (std::size_t u = 0; u < estimates.size(); ++u) {
    if (estimates[u].size() != truths[u].size())
      throw InvalidArgument("estimate row length differs from its truth row");
    for (std::size_t k = 0; k < estimates[u].size(); ++k) {
      if (std::isnan(estimates[u][k])) {
        ++r.failed;
        continue;
      }
      const double e = estimates[u][k] - truths[u][k];
      sum += e * e;
      ++r.valid;
    }
  }
  if (r.valid == 0) throw EmptyReport("no valid prediction to average");
  r.value = sum / static_cast<double>(r.valid);
  return r;
}

std::vector<Scenario> default_scenarios() {
  return {{0.2, 0.2, 100}, {0.2, 0.2, 300}, {0.2, 0.2, 500},
          {0.1, 0.2, 100}, {0.2, 0.2, 100}, {0.4, 0.2, 100},
          {0.2, 0.1, 100}, {0.2, 0.2, 100}, {0.2, 0.4, 100}};
}

void BenchmarkSpec::validate() const {
  if (replicates < 1) throw InvalidArgument("benchmark needs B >= 1");
  if (eval_curves < 1) throw InvalidArgument("benchmark needs m >= 1");
  if (scenarios.empty()) throw InvalidArgument("benchmark needs at least one scenario");
  for (const auto& s : scenarios) {
    if (s.n < 2) throw InvalidArgument("scenario sample size must be >= 2");
    if (!(s.censor >= 0.0 && s.censor <= 0.95) || !(s.trunc >= 0.0 && s.trunc <= 0.95))
      throw InvalidArgument("scenario rates must lie in [0, 0.95]");
  }
}

namespace {

// Streams are keyed by the rate pair rather than the row position, so a
// scenario repeated in the table reproduces the same replicates.
std::uint64_t rate_key(double censor, double trunc) {
  return splitmix64(std::bit_cast<std::uint64_t>(censor)) ^ std::bit_cast<std::uint64_t>(trunc);
}

std::vector<double> predict_all(const CrossValidator& cv, EstimatorKind kind, double h,
                                const std::vector<std::vector<double>>& query_dist,
                                std::span<const double> z) {
  std::vector<double> out;
  out.reserve(query_dist.size());
  for (const auto& d : query_dist)
    out.push_back(kernel_ratio(kind, Kernel{}, h, d, cv.weights(), z).value);
  return out;
}

// Mean over the finite entries; NaN when there are none.
double mean_of(std::span<const double> v) {
  double s = 0.0;
  std::size_t k = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      s += x;
      ++k;
    }
  return k == 0 ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(k);
}

}  // namespace

ReplicateOutcome run_replicate(const Scenario& scenario, const RateParams& rates,
                               std::size_t eval_curves, std::size_t grid_size,
                               std::size_t bandwidth_count, std::uint64_t seed) {
  Engine rng(seed);
  const auto grid = Grid::uniform(grid_size);
  const auto sim = simulate_with(scenario.n, rates, grid, rng);

  std::vector<Curve> queries;
  ReplicateOutcome out;
  for (std::size_t k = 0; k < eval_curves; ++k) {
    queries.push_back(gen_curve(draw_curve_params(rng), grid));
    out.truths.push_back(true_regression(queries.back()));
  }
  out.censor_rate = sim.censor_rate;
  out.trunc_rate = sim.trunc_rate;

  const auto train = sim.sample.curves();
  const auto z = sim.sample.z();
  const CrossValidator cv(sim.sample);
  const auto candidates = bandwidth_grid_from_distances(cv.distances().upper_triangle(),
                                                        bandwidth_count);
  std::vector<std::vector<double>> query_dist;
  for (const auto& q : queries) query_dist.push_back(pairwise_distances(train, q));

  // A replicate whose estimator cannot be fitted at all (every survival weight
  // zero, or no bandwidth with a usable leave-one-out neighborhood) counts as m
  // failed predictions for that estimator.
  auto run = [&](EstimatorKind kind, double& h, std::vector<double>& pred) {
    h = std::numeric_limits<double>::quiet_NaN();
    pred.assign(query_dist.size(), std::numeric_limits<double>::quiet_NaN());
    try {
      h = cv.select(kind, candidates).bandwidth;
    } catch (const BandwidthSelectionFailed&) {
      return;
    }
    pred = predict_all(cv, kind, h, query_dist, z);
  };
  run(EstimatorKind::rer, out.h_rer, out.rer);
  run(EstimatorKind::nw, out.h_nw, out.nw);
  return out;
}

GmseReport run_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  GmseReport report;
  report.seed = spec.seed;
  report.replicates = spec.replicates;
  report.eval_curves = spec.eval_curves;

  std::map<std::uint64_t, RateParams> calibrated;
  for (std::size_t si = 0; si < spec.scenarios.size(); ++si) {
    const Scenario& sc = spec.scenarios[si];
    const std::uint64_t key = rate_key(sc.censor, sc.trunc);
    auto it = calibrated.find(key);
    if (it == calibrated.end()) {
      CalibrationOptions opt;
      opt.seed = derive_seed(spec.seed, {0xca1b, key});
      opt.pilot_size = spec.pilot_size;
      opt.grid_size = spec.grid_size;
      opt.noise_sd = spec.noise_sd;
      try {
        it = calibrated.emplace(key, calibrate_rates(sc.censor, sc.trunc, opt)).first;
      } catch (const CalibrationFailed& e) {
        throw CalibrationFailed("scenario " + std::to_string(si) + ": " + e.what());
      }
    }
    const RateParams rates = it->second;

    std::vector<ReplicateOutcome> reps(spec.replicates);
    parallel_for(spec.replicates, spec.workers, [&](std::size_t u) {
      reps[u] = run_replicate(sc, rates, spec.eval_curves, spec.grid_size, spec.bandwidth_count,
                              derive_seed(spec.seed, {key, sc.n, u}));
    });

    ScenarioReport row;
    row.scenario = sc;
    row.rates = rates;
    std::vector<std::vector<double>> rer;
    std::vector<std::vector<double>> nw;
    std::vector<double> h_rer;
    std::vector<double> h_nw;
    std::vector<double> cr;
    std::vector<double> tr;
    std::vector<std::vector<double>> truths;
    for (const auto& r : reps) {
      rer.push_back(r.rer);
      nw.push_back(r.nw);
      truths.push_back(r.truths);
      h_rer.push_back(r.h_rer);
      h_nw.push_back(r.h_nw);
      cr.push_back(r.censor_rate);
      tr.push_back(r.trunc_rate);
    }
    const auto g_rer = gmse(rer, truths);
    const auto g_nw = gmse(nw, truths);
    auto unfitted = [](std::span<const double> h) {
      return static_cast<std::size_t>(
          std::count_if(h.begin(), h.end(), [](double x) { return std::isnan(x); }));
    };
    row.rer = {g_rer.value, g_rer.valid, g_rer.failed, mean_of(h_rer), unfitted(h_rer)};
    row.nw = {g_nw.value, g_nw.valid, g_nw.failed, mean_of(h_nw), unfitted(h_nw)};
    row.mean_censor_rate = mean_of(cr);
    row.mean_trunc_rate = mean_of(tr);
    report.rows.push_back(row);
  }
  return report;
}

double ssc(const FittedRegressor& fit_n, const FittedRegressor& fit_n1, const Curve& query) {
  const std::size_t n = fit_n.sample().size();
  if (fit_n1.sample().size() != n + 1)
    throw InvalidArgument("contaminated fit must hold exactly one more record than the clean fit");
  auto side = [&](const FittedRegressor& f, const char* name) {
    try {
      return f.predict(query).value;
    } catch (const EmptyNeighborhood& e) {
      throw EmptyNeighborhood(std::string(name) + " fit: " + e.what(), e.neighbors());
    }
  };
  const double clean = side(fit_n, "clean");
  const double contaminated = side(fit_n1, "contaminated");
  return static_cast<double>(n + 1) * (contaminated - clean);
}

void InfluenceSpec::validate() const {
  if (n < 2) throw InvalidArgument("influence experiment needs n >= 2");
  if (!(z0 > 0.0) || !std::isfinite(z0)) throw InvalidArgument("outlier z0 must be positive");
  if (probes < 1) throw InvalidArgument("influence experiment needs at least one probe");
}

InfluenceResult run_influence(const InfluenceSpec& spec) {
  spec.validate();
  InfluenceResult res;
  if (spec.rates) {
    res.rates = *spec.rates;
  } else {
    CalibrationOptions opt;
    opt.seed = derive_seed(spec.seed, {0xca1b});
    opt.pilot_size = spec.pilot_size;
    opt.grid_size = spec.grid_size;
    opt.noise_sd = spec.noise_sd;
    res.rates = calibrate_rates(spec.censor, spec.trunc, opt);
  }

  Engine rng(derive_seed(spec.seed, {0xe1f}));
  const auto grid = Grid::uniform(spec.grid_size);
  const auto sim = simulate_with(spec.n, res.rates, grid, rng);
  std::vector<Curve> probes;
  for (std::size_t k = 0; k < spec.probes; ++k)
    probes.push_back(gen_curve(draw_curve_params(rng), grid));
  const Curve chi0 = gen_curve(draw_curve_params(rng), grid);

  const CrossValidator cv(sim.sample);
  const auto candidates =
      bandwidth_grid_from_distances(cv.distances().upper_triangle(), spec.bandwidth_count);
  res.h_rer = cv.select(EstimatorKind::rer, candidates).bandwidth;
  res.h_nw = cv.select(EstimatorKind::nw, candidates).bandwidth;

  const auto t = sim.sample.t();
  const double t0 = *std::min_element(t.begin(), t.end());
  const LtrcSample contaminated = sim.sample.with(LtrcRecord(chi0, spec.z0, t0, true));
  res.clean_size = sim.sample.size();
  res.contaminated_size = contaminated.size();

  auto config = [](double h) {
    EstimatorConfig c;
    c.bandwidth = h;
    return c;
  };
  const FittedRegressor rer_n(sim.sample, config(res.h_rer), EstimatorKind::rer);
  const FittedRegressor rer_n1(contaminated, config(res.h_rer), EstimatorKind::rer);
  const FittedRegressor nw_n(sim.sample, config(res.h_nw), EstimatorKind::nw);
  const FittedRegressor nw_n1(contaminated, config(res.h_nw), EstimatorKind::nw);

  const double scale = static_cast<double>(spec.n + 1);
  for (const auto& probe : probes) {
    const auto a = rer_n.evaluate(probe);
    const auto b = rer_n1.evaluate(probe);
    const auto c = nw_n.evaluate(probe);
    const auto d = nw_n1.evaluate(probe);
    if (!a.ok() || !b.ok() || !c.ok() || !d.ok()) {
      ++res.skipped_probes;
      continue;
    }
    res.points.push_back(
        {l2_distance(probe, chi0), scale * (b.value - a.value), scale * (d.value - c.value)});
  }
  return res;
}

}  // namespace relerr
