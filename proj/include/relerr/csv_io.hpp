#pragma once

// CSV formats. Every file we write starts with a schema line
// "# schema: relerr.<kind>/v<version>"; readers reject unknown kinds or
// versions. Files without a schema line are read as version 1 so hand-made
// inputs stay usable. Numbers use the shortest round-trip representation.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relerr/evaluation.hpp"
#include "relerr/functional.hpp"
#include "relerr/survival.hpp"

namespace relerr::io {

inline constexpr int kSchemaVersion = 1;

std::string format_double(double x);
double parse_double(std::string_view text);

/// Writes to a sibling temporary file and renames it into place, so a failure
/// never leaves a partial file behind.
void atomic_write(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string schema_line(std::string_view kind);
/// Parses CSV text; rejects ragged rows and foreign schemas.
Table parse_csv(std::string_view text, std::string_view kind);

// Curves: first row holds the grid abscissae, one curve per following row.
std::string format_curves(std::span<const Curve> curves);
std::vector<Curve> parse_curves(std::string_view text);

// LTRC sample: header "z,t,delta,<abscissae...>", one record per row.
std::string format_sample(const LtrcSample& sample);
LtrcSample parse_sample(std::string_view text);

std::string format_latents(std::span<const Latent> latent);

struct PredictionRow {
  std::size_t query_id = 0;
  Prediction rer;
  Prediction nw;
};
std::string format_predictions(std::span<const PredictionRow> rows);

std::string format_gmse_table(const GmseReport& report);
std::string format_influence(std::span<const InfluencePoint> points);

}  // namespace relerr::io
