#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "relerr/evaluation.hpp"

namespace relerr {

/// Standalone SVG scatter of EIF against distance: RER as circles, NW as
/// squares, with axis labels and a legend. Throws NoData on empty input.
std::string render_svg_scatter(std::span<const InfluencePoint> points, std::string_view title);

void emit_svg_scatter(std::span<const InfluencePoint> points, const std::filesystem::path& path,
                      std::string_view title = "Empirical influence function");

}  // namespace relerr
