#include "relerr/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "relerr/csv_io.hpp"
#include "relerr/errors.hpp"
#include "relerr/regression.hpp"
#include "relerr/svg.hpp"

namespace relerr::app {

namespace {

Json conventions() {
  return Json{
      {"censoring", "S ~ Exponential(rate mu), mean 1/mu; mu = 0 disables censoring"},
      {"truncation", "T ~ Normal(lambda, variance 2); lambda = null disables truncation"},
      {"censoring_rate", "fraction of kept records with delta = 0"},
      {"truncation_rate", "1 - n/N"},
      {"cv_criterion",
       {{"rer", "leave-one-out, weighted mean squared relative error ((Z - r)/Z)^2"},
        {"nw", "leave-one-out, weighted mean squared error (Z - r)^2"}}},
      {"nw_weights", "same survival weights delta/(L_n Gbar_n) as the relative-error estimator"},
      {"kernel", "1.5 (1 - u^2) on [0, 1)"},
      {"semimetric", "L2 distance, trapezoid rule"},
      {"evaluation_curves", "drawn fresh per replicate"},
      {"outlier_truncation_time", "minimum observed T of the clean sample"},
      {"outlier_bandwidth", "cross-validated on the clean sample and reused"}};
}

Json base_manifest(const char* subcommand) {
  return Json{{"tool", "relerr"},
              {"version", kToolVersion},
              {"subcommand", subcommand},
              {"conventions", conventions()}};
}

// JSON has no infinities; a missing truncation is encoded as null.
Json lambda_json(double lambda) { return std::isfinite(lambda) ? Json(lambda) : Json(nullptr); }
double lambda_from(const Json& j) { return j.is_null() ? kNoTruncation : j.get<double>(); }

Json rates_json(const RateParams& r) {
  return Json{{"mu", r.mu}, {"lambda", lambda_json(r.lambda)}, {"noise_sd", r.noise_sd}};
}

void write_manifest(const fs::path& path, const Json& manifest) {
  io::atomic_write(path, manifest.dump(2) + "\n");
}

fs::path sidecar(const fs::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

std::size_t workers_or_default(std::size_t w) { return w == 0 ? default_workers() : w; }

}  // namespace

std::size_t default_workers() {
  if (const char* env = std::getenv("RELERR_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(io::read_file(path));
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<Scenario> parse_scenarios(const Json& j) {
  if (!j.is_array()) throw ParseError("scenario file must hold a JSON array");
  std::vector<Scenario> out;
  try {
    for (const auto& s : j)
      out.push_back({s.at("censor").get<double>(), s.at("trunc").get<double>(),
                     s.at("n").get<std::size_t>()});
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad scenario entry: ") + e.what());
  }
  return out;
}

std::string panel_stem(const Panel& p) {
  auto pct = [](double x) { return std::to_string(static_cast<long>(std::lround(100.0 * x))); };
  return "eif_c" + pct(p.censor) + "_t" + pct(p.trunc);
}

// ---------------------------------------------------------------- simulate

Json run_simulate(const SimulateOptions& opt) {
  const auto result = simulate(opt.config);
  io::atomic_write(opt.out, io::format_sample(result.sample));
  Json artifacts = Json::array({opt.out.string()});
  if (opt.latents) {
    io::atomic_write(*opt.latents, io::format_latents(result.latent));
    artifacts.push_back(opt.latents->string());
  }
  const auto& c = opt.config;
  Json m = base_manifest("simulate");
  m["seed"] = c.seed;
  m["config"] = Json{{"n", c.n},
                     {"grid_size", c.grid_size},
                     {"censor_target", c.censor_target},
                     {"trunc_target", c.trunc_target},
                     {"mu", result.mu},
                     {"lambda", lambda_json(result.lambda)},
                     {"noise_sd", c.noise_sd},
                     {"seed", c.seed},
                     {"out", opt.out.string()},
                     {"latents", opt.latents ? Json(opt.latents->string()) : Json(nullptr)}};
  m["results"] = Json{{"candidates", result.candidates},
                      {"censor_rate", result.censor_rate},
                      {"trunc_rate", result.trunc_rate}};
  const auto manifest_path = sidecar(opt.out);
  artifacts.push_back(manifest_path.string());
  m["artifacts"] = artifacts;
  write_manifest(manifest_path, m);
  return m;
}

SimulateOptions simulate_from_manifest(const Json& m) {
  const auto& c = m.at("config");
  SimulateOptions o;
  o.config.n = c.at("n").get<std::size_t>();
  o.config.grid_size = c.at("grid_size").get<std::size_t>();
  o.config.censor_target = c.at("censor_target").get<double>();
  o.config.trunc_target = c.at("trunc_target").get<double>();
  o.config.mu = c.at("mu").get<double>();
  o.config.lambda = lambda_from(c.at("lambda"));
  o.config.noise_sd = c.at("noise_sd").get<double>();
  o.config.seed = c.at("seed").get<std::uint64_t>();
  o.out = c.at("out").get<std::string>();
  if (!c.at("latents").is_null()) o.latents = fs::path(c.at("latents").get<std::string>());
  return o;
}

// ---------------------------------------------------------------------- fit

Json run_fit(const FitOptions& opt) {
  const LtrcSample sample = io::parse_sample(io::read_file(opt.sample));
  // Queries may be a curves file or a sample file (whose curves are used).
  const std::string query_text = io::read_file(opt.queries);
  const auto queries = query_text.starts_with(io::schema_line("sample"))
                           ? io::parse_sample(query_text).curves()
                           : io::parse_curves(query_text);

  double h_rer = 0.0;
  double h_nw = 0.0;
  if (opt.bandwidth) {
    h_rer = h_nw = *opt.bandwidth;
  } else {
    const CrossValidator cv(sample);
    const auto grid =
        bandwidth_grid_from_distances(cv.distances().upper_triangle(), opt.bandwidth_count);
    h_rer = cv.select(EstimatorKind::rer, grid).bandwidth;
    h_nw = cv.select(EstimatorKind::nw, grid).bandwidth;
  }
  EstimatorConfig cr;
  cr.bandwidth = h_rer;
  EstimatorConfig cn;
  cn.bandwidth = h_nw;
  const FittedRegressor rer(sample, cr, EstimatorKind::rer);
  const FittedRegressor nw(sample, cn, EstimatorKind::nw);

  std::vector<io::PredictionRow> rows;
  std::size_t failed = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (!same_grid(queries[q], sample[0].curve()))
      throw GridMismatch("query curves and training curves use different grids");
    io::PredictionRow row{q, rer.evaluate(queries[q]), nw.evaluate(queries[q])};
    failed += (row.rer.ok() && row.nw.ok()) ? 0 : 1;
    rows.push_back(row);
  }
  io::atomic_write(opt.out, io::format_predictions(rows));

  Json m = base_manifest("fit");
  m["config"] = Json{{"sample", opt.sample.string()},
                     {"queries", opt.queries.string()},
                     {"out", opt.out.string()},
                     {"bandwidth", opt.bandwidth ? Json(*opt.bandwidth) : Json(nullptr)},
                     {"bandwidth_count", opt.bandwidth_count}};
  m["results"] = Json{{"h_rer", h_rer}, {"h_nw", h_nw}, {"queries", rows.size()},
                      {"failed", failed}, {"n", sample.size()}};
  const auto manifest_path = sidecar(opt.out);
  m["artifacts"] = Json::array({opt.out.string(), manifest_path.string()});
  write_manifest(manifest_path, m);
  return m;
}

FitOptions fit_from_manifest(const Json& m) {
  const auto& c = m.at("config");
  FitOptions o;
  o.sample = c.at("sample").get<std::string>();
  o.queries = c.at("queries").get<std::string>();
  o.out = c.at("out").get<std::string>();
  if (!c.at("bandwidth").is_null()) o.bandwidth = c.at("bandwidth").get<double>();
  o.bandwidth_count = c.at("bandwidth_count").get<std::size_t>();
  return o;
}

// ---------------------------------------------------------------- benchmark

Json run_benchmark(const BenchmarkOptions& opt) {
  BenchmarkSpec spec = opt.spec;
  spec.workers = workers_or_default(spec.workers);
  const GmseReport report = relerr::run_benchmark(spec);

  const auto csv = opt.out_dir / "gmse.csv";
  const auto meta = opt.out_dir / "gmse.json";
  io::atomic_write(csv, io::format_gmse_table(report));

  Json scenarios = Json::array();
  for (const auto& s : spec.scenarios)
    scenarios.push_back(Json{{"censor", s.censor}, {"trunc", s.trunc}, {"n", s.n}});
  Json rows = Json::array();
  auto outcome = [](const EstimatorOutcome& e) {
    return Json{{"gmse", e.gmse}, {"valid", e.valid}, {"failed", e.failed},
                {"mean_bandwidth", std::isfinite(e.mean_bandwidth) ? Json(e.mean_bandwidth) : Json(nullptr)},
                {"failed_fits", e.failed_fits}};
  };
  for (const auto& r : report.rows)
    rows.push_back(Json{{"censor", r.scenario.censor},
                        {"trunc", r.scenario.trunc},
                        {"n", r.scenario.n},
                        {"rates", rates_json(r.rates)},
                        {"achieved_censor_rate", r.mean_censor_rate},
                        {"achieved_trunc_rate", r.mean_trunc_rate},
                        {"rer", outcome(r.rer)},
                        {"nw", outcome(r.nw)}});

  Json m = base_manifest("benchmark");
  m["seed"] = spec.seed;
  m["config"] = Json{{"replicates", spec.replicates},
                     {"eval_curves", spec.eval_curves},
                     {"scenarios", scenarios},
                     {"seed", spec.seed},
                     {"grid_size", spec.grid_size},
                     {"bandwidth_count", spec.bandwidth_count},
                     {"noise_sd", spec.noise_sd},
                     {"pilot_size", spec.pilot_size},
                     {"out_dir", opt.out_dir.string()}};
  m["execution"] = Json{{"workers", spec.workers}};
  m["results"] = rows;
  m["artifacts"] = Json::array({csv.string(), meta.string()});
  write_manifest(meta, m);
  return m;
}

BenchmarkOptions benchmark_from_manifest(const Json& m) {
  const auto& c = m.at("config");
  BenchmarkOptions o;
  o.spec.replicates = c.at("replicates").get<std::size_t>();
  o.spec.eval_curves = c.at("eval_curves").get<std::size_t>();
  o.spec.scenarios = parse_scenarios(c.at("scenarios"));
  o.spec.seed = c.at("seed").get<std::uint64_t>();
  o.spec.grid_size = c.at("grid_size").get<std::size_t>();
  o.spec.bandwidth_count = c.at("bandwidth_count").get<std::size_t>();
  o.spec.noise_sd = c.at("noise_sd").get<double>();
  o.spec.pilot_size = c.at("pilot_size").get<std::size_t>();
  o.out_dir = c.at("out_dir").get<std::string>();
  o.spec.workers = 0;
  return o;
}

// ---------------------------------------------------------------- influence

Json run_influence(const InfluenceOptions& opt) {
  if (opt.panels.empty()) throw InvalidArgument("influence needs at least one panel");
  Json artifacts = Json::array();
  Json results = Json::array();
  for (const auto& panel : opt.panels) {
    InfluenceSpec spec = opt.spec;
    spec.censor = panel.censor;
    spec.trunc = panel.trunc;
    const auto res = relerr::run_influence(spec);
    const std::string stem = panel_stem(panel);
    const auto csv = opt.out_dir / (stem + ".csv");
    const auto svg = opt.out_dir / (stem + ".svg");
    io::atomic_write(csv, io::format_influence(res.points));
    if (!res.points.empty()) {
      const std::string title = "EIF, z0 = " + io::format_double(spec.z0) + ", CR " +
                                std::to_string(std::lround(100 * panel.censor)) + "%, TR " +
                                std::to_string(std::lround(100 * panel.trunc)) + "%";
      emit_svg_scatter(res.points, svg, title);
      artifacts.push_back(svg.string());
    }
    artifacts.push_back(csv.string());
    double max_rer = 0.0;
    double max_nw = 0.0;
    for (const auto& p : res.points) {
      max_rer = std::max(max_rer, std::abs(p.eif_rer));
      max_nw = std::max(max_nw, std::abs(p.eif_nw));
    }
    results.push_back(Json{{"censor", panel.censor},
                           {"trunc", panel.trunc},
                           {"rates", rates_json(res.rates)},
                           {"h_rer", res.h_rer},
                           {"h_nw", res.h_nw},
                           {"points", res.points.size()},
                           {"skipped_probes", res.skipped_probes},
                           {"clean_size", res.clean_size},
                           {"contaminated_size", res.contaminated_size},
                           {"max_abs_eif_rer", max_rer},
                           {"max_abs_eif_nw", max_nw}});
  }
  const auto& s = opt.spec;
  Json panels = Json::array();
  for (const auto& p : opt.panels) panels.push_back(Json{{"censor", p.censor}, {"trunc", p.trunc}});
  Json m = base_manifest("influence");
  m["seed"] = s.seed;
  m["config"] = Json{{"n", s.n},
                     {"z0", s.z0},
                     {"panels", panels},
                     {"probes", s.probes},
                     {"seed", s.seed},
                     {"grid_size", s.grid_size},
                     {"bandwidth_count", s.bandwidth_count},
                     {"noise_sd", s.noise_sd},
                     {"pilot_size", s.pilot_size},
                     {"out_dir", opt.out_dir.string()}};
  m["results"] = results;
  const auto manifest_path = opt.out_dir / "manifest.json";
  artifacts.push_back(manifest_path.string());
  m["artifacts"] = artifacts;
  write_manifest(manifest_path, m);
  return m;
}

InfluenceOptions influence_from_manifest(const Json& m) {
  const auto& c = m.at("config");
  InfluenceOptions o;
  o.spec.n = c.at("n").get<std::size_t>();
  o.spec.z0 = c.at("z0").get<double>();
  o.spec.probes = c.at("probes").get<std::size_t>();
  o.spec.seed = c.at("seed").get<std::uint64_t>();
  o.spec.grid_size = c.at("grid_size").get<std::size_t>();
  o.spec.bandwidth_count = c.at("bandwidth_count").get<std::size_t>();
  o.spec.noise_sd = c.at("noise_sd").get<double>();
  o.spec.pilot_size = c.at("pilot_size").get<std::size_t>();
  o.panels.clear();
  for (const auto& p : c.at("panels"))
    o.panels.push_back({p.at("censor").get<double>(), p.at("trunc").get<double>()});
  o.out_dir = c.at("out_dir").get<std::string>();
  return o;
}

}  // namespace relerr::app
