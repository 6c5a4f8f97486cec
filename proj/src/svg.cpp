#include "relerr/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "relerr/csv_io.hpp"
#include "relerr/errors.hpp"

namespace relerr {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo;
  double hi;
};

Range padded(double lo, double hi) {
  if (hi - lo <= 0.0) {
    const double pad = std::max(1.0, std::abs(lo) * 0.1);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string render_svg_scatter(std::span<const InfluencePoint> points, std::string_view title) {
  if (points.empty()) throw NoData("no influence points to plot");
  double xmin = points[0].distance, xmax = xmin;
  double ymin = std::min(points[0].eif_rer, points[0].eif_nw), ymax = std::max(points[0].eif_rer, points[0].eif_nw);
  for (const auto& p : points) {
    xmin = std::min(xmin, p.distance);
    xmax = std::max(xmax, p.distance);
    ymin = std::min({ymin, p.eif_rer, p.eif_nw});
    ymax = std::max({ymax, p.eif_rer, p.eif_nw});
  }
  ymin = std::min(ymin, 0.0);
  ymax = std::max(ymax, 0.0);
  const Range xr = padded(xmin, xmax);
  const Range yr = padded(ymin, ymax);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(title) + "</text>\n";
  // plot frame and zero line
  s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
       "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(sy(0.0)) + "\" x2=\"" + num(kLeft + pw) +
       "\" y2=\"" + num(sy(0.0)) + "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    s += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(kTop + ph + 18) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + label(xv) + "</text>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy(yv) + 4) +
         "\" text-anchor=\"end\" font-size=\"11\">" + label(yv) + "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"middle\" font-size=\"13\">distance to outlier curve</text>\n";
  s += "<text x=\"18\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" font-size=\"13\" "
       "transform=\"rotate(-90 18 " + num(kTop + ph / 2) + ")\">EIF</text>\n";

  s += "<g id=\"rer\" fill=\"#1f77b4\">\n";
  for (const auto& p : points)
    s += "<circle class=\"rer\" cx=\"" + num(sx(p.distance)) + "\" cy=\"" + num(sy(p.eif_rer)) +
         "\" r=\"4\"/>\n";
  s += "</g>\n<g id=\"nw\" fill=\"#d62728\">\n";
  for (const auto& p : points)
    s += "<rect class=\"nw\" x=\"" + num(sx(p.distance) - 3.5) + "\" y=\"" +
         num(sy(p.eif_nw) - 3.5) + "\" width=\"7\" height=\"7\"/>\n";
  s += "</g>\n";

  const double lx = kLeft + pw + 18;
  s += "<g id=\"legend\" font-size=\"12\">\n";
  s += "<circle cx=\"" + num(lx) + "\" cy=\"" + num(kTop + 14) + "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  s += "<text x=\"" + num(lx + 10) + "\" y=\"" + num(kTop + 18) + "\">relative error</text>\n";
  s += "<rect x=\"" + num(lx - 3.5) + "\" y=\"" + num(kTop + 30.5) +
       "\" width=\"7\" height=\"7\" fill=\"#d62728\"/>\n";
  s += "<text x=\"" + num(lx + 10) + "\" y=\"" + num(kTop + 38) + "\">Nadaraya-Watson</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

void emit_svg_scatter(std::span<const InfluencePoint> points, const std::filesystem::path& path,
                      std::string_view title) {
  io::atomic_write(path, render_svg_scatter(points, title));
}

}  // namespace relerr
