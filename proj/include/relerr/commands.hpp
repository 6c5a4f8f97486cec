#pragma once

// Subcommand implementations behind the command-line tool. Each run writes a
// JSON manifest holding the fully resolved configuration; feeding that
// manifest back reproduces byte-identical CSV outputs.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relerr/datagen.hpp"
#include "relerr/evaluation.hpp"

namespace relerr::app {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "1.0.0";

/// Worker count from RELERR_WORKERS, falling back to 1.
std::size_t default_workers();

struct SimulateOptions {
  SimulationConfig config;
  fs::path out = "sample.csv";
  std::optional<fs::path> latents;
};

struct FitOptions {
  fs::path sample;
  fs::path queries;
  fs::path out = "predictions.csv";
  std::optional<double> bandwidth;  // cross-validated per estimator when absent
  std::size_t bandwidth_count = 15;
};

struct BenchmarkOptions {
  BenchmarkSpec spec;
  fs::path out_dir = "report";
};

struct Panel {
  double censor = 0.2;
  double trunc = 0.2;
};

struct InfluenceOptions {
  InfluenceSpec spec;
  std::vector<Panel> panels{{0.2, 0.2}};
  fs::path out_dir = "influence";
};

/// Every runner returns the manifest it wrote.
Json run_simulate(const SimulateOptions& opt);
Json run_fit(const FitOptions& opt);
Json run_benchmark(const BenchmarkOptions& opt);
Json run_influence(const InfluenceOptions& opt);

SimulateOptions simulate_from_manifest(const Json& manifest);
FitOptions fit_from_manifest(const Json& manifest);
BenchmarkOptions benchmark_from_manifest(const Json& manifest);
InfluenceOptions influence_from_manifest(const Json& manifest);

Json read_json(const fs::path& path);

/// Scenario file: JSON array of {"censor", "trunc", "n"} objects.
std::vector<Scenario> parse_scenarios(const Json& j);

/// File stem used for one influence panel, e.g. "eif_c20_t40".
std::string panel_stem(const Panel& p);

}  // namespace relerr::app
