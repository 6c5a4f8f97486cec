// Command-line front end: simulate | fit | benchmark | influence.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "relerr/commands.hpp"
#include "relerr/errors.hpp"

namespace app = relerr::app;

int main(int argc, char** argv) {
  CLI::App cli{"Relative-error kernel regression for functional covariates with LTRC responses"};
  cli.require_subcommand(1);

  // simulate
  app::SimulateOptions sim;
  std::string sim_manifest;
  double sim_mu = -1.0;
  double sim_lambda = std::numeric_limits<double>::quiet_NaN();
  std::string sim_out;
  std::string sim_latents;
  auto* s = cli.add_subcommand("simulate", "Draw a synthetic LTRC sample");
  s->add_option("--manifest", sim_manifest, "Replay the configuration stored in a manifest");
  s->add_option("--n", sim.config.n, "Observed sample size")->capture_default_str();
  s->add_option("--censor-rate", sim.config.censor_target, "Target censoring rate")->capture_default_str();
  s->add_option("--trunc-rate", sim.config.trunc_target, "Target truncation rate")->capture_default_str();
  s->add_option("--mu", sim_mu, "Exponential censoring rate (skips calibration; 0 = none)");
  s->add_option("--lambda", sim_lambda, "Truncation mean (skips calibration)");
  s->add_option("--grid-size", sim.config.grid_size, "Points per curve")->capture_default_str();
  s->add_option("--noise-sd", sim.config.noise_sd, "Response noise sd")->capture_default_str();
  s->add_option("--seed", sim.config.seed, "Master seed")->capture_default_str();
  s->add_option("--out", sim_out, "Sample CSV path");
  s->add_option("--latents", sim_latents, "Latent (Y, S) CSV path");

  // fit
  app::FitOptions fit;
  std::string fit_manifest;
  std::string fit_sample, fit_queries, fit_out;
  double fit_h = 0.0;
  auto* f = cli.add_subcommand("fit", "Fit both estimators and predict at query curves");
  f->add_option("--manifest", fit_manifest, "Replay the configuration stored in a manifest");
  f->add_option("--sample", fit_sample, "Training sample CSV");
  f->add_option("--queries", fit_queries, "Query curves CSV");
  f->add_option("--out", fit_out, "Predictions CSV path");
  f->add_option("--bandwidth", fit_h, "Fixed bandwidth (default: leave-one-out CV)");
  f->add_option("--grid-count", fit.bandwidth_count, "CV candidate count")->capture_default_str();

  // benchmark
  app::BenchmarkOptions bench;
  bench.spec.replicates = 200;
  std::string bench_manifest, bench_scenarios, bench_out;
  std::size_t bench_workers = 0;
  auto* b = cli.add_subcommand("benchmark", "GMSE benchmark over censoring/truncation scenarios");
  b->add_option("--manifest", bench_manifest, "Replay the configuration stored in a manifest");
  b->add_option("--scenarios", bench_scenarios, "JSON array of {censor, trunc, n} (default: 9-row table)");
  b->add_option("--B", bench.spec.replicates, "Replicates per scenario")->capture_default_str();
  b->add_option("--m", bench.spec.eval_curves, "Evaluation curves per replicate")->capture_default_str();
  b->add_option("--seed", bench.spec.seed, "Master seed")->capture_default_str();
  b->add_option("--grid-count", bench.spec.bandwidth_count, "CV candidate count")->capture_default_str();
  b->add_option("--pilot-size", bench.spec.pilot_size, "Calibration pilot candidates")->capture_default_str();
  b->add_option("--out", bench_out, "Report directory");
  b->add_option("--workers", bench_workers, "Concurrent replicates (default: $RELERR_WORKERS or 1)");

  // influence
  app::InfluenceOptions infl;
  std::string infl_manifest, infl_out;
  double infl_cr = 0.2, infl_tr = 0.2;
  bool infl_fig = false;
  auto* i = cli.add_subcommand("influence", "Empirical influence of a single outlier");
  i->add_option("--manifest", infl_manifest, "Replay the configuration stored in a manifest");
  i->add_option("--n", infl.spec.n, "Clean sample size")->capture_default_str();
  i->add_option("--z0", infl.spec.z0, "Outlier response")->capture_default_str();
  i->add_option("--censor-rate", infl_cr, "Target censoring rate")->capture_default_str();
  i->add_option("--trunc-rate", infl_tr, "Target truncation rate")->capture_default_str();
  i->add_flag("--figure-panels", infl_fig, "Run the three panels (20/20, 20/40, 40/20)");
  i->add_option("--probes", infl.spec.probes, "Probe curves")->capture_default_str();
  i->add_option("--seed", infl.spec.seed, "Master seed")->capture_default_str();
  i->add_option("--grid-count", infl.spec.bandwidth_count, "CV candidate count")->capture_default_str();
  i->add_option("--out", infl_out, "Output directory");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return 2;
  }

  try {
    app::Json manifest;
    if (s->parsed()) {
      if (!sim_manifest.empty()) {
        sim = app::simulate_from_manifest(app::read_json(sim_manifest));
      } else {
        if (sim_mu >= 0.0) sim.config.mu = sim_mu;
        if (!std::isnan(sim_lambda)) sim.config.lambda = sim_lambda;
      }
      if (!sim_out.empty()) sim.out = sim_out;
      if (!sim_latents.empty()) sim.latents = sim_latents;
      manifest = app::run_simulate(sim);
    } else if (f->parsed()) {
      if (!fit_manifest.empty()) fit = app::fit_from_manifest(app::read_json(fit_manifest));
      if (!fit_sample.empty()) fit.sample = fit_sample;
      if (!fit_queries.empty()) fit.queries = fit_queries;
      if (!fit_out.empty()) fit.out = fit_out;
      if (f->count("--bandwidth") > 0) fit.bandwidth = fit_h;
      if (fit.sample.empty() || fit.queries.empty()) {
        std::cerr << "fit: --sample and --queries are required\n";
        return 2;
      }
      manifest = app::run_fit(fit);
    } else if (b->parsed()) {
      if (!bench_manifest.empty()) {
        bench = app::benchmark_from_manifest(app::read_json(bench_manifest));
      } else {
        bench.spec.scenarios = bench_scenarios.empty()
                                   ? relerr::default_scenarios()
                                   : app::parse_scenarios(app::read_json(bench_scenarios));
      }
      if (!bench_out.empty()) bench.out_dir = bench_out;
      bench.spec.workers = bench_workers;
      manifest = app::run_benchmark(bench);
    } else if (i->parsed()) {
      if (!infl_manifest.empty()) {
        infl = app::influence_from_manifest(app::read_json(infl_manifest));
      } else if (infl_fig) {
        infl.panels = {{0.2, 0.2}, {0.2, 0.4}, {0.4, 0.2}};
      } else {
        infl.panels = {{infl_cr, infl_tr}};
      }
      if (!infl_out.empty()) infl.out_dir = infl_out;
      manifest = app::run_influence(infl);
    }
    for (const auto& a : manifest["artifacts"]) std::cout << a.get<std::string>() << "\n";
  } catch (const relerr::Error& e) {
    std::cerr << "error[" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
