#include "relerr/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "relerr/errors.hpp"

namespace relerr {

LtrcRecord::LtrcRecord(Curve curve, double z, double t, bool delta)
    : curve_(std::move(curve)), z_(z), t_(t), delta_(delta) {
  if (!std::isfinite(z) || !(z > 0.0)) throw InvalidArgument("lifetime Z must be finite and > 0");
  if (std::isnan(t)) throw InvalidArgument("truncation time T is NaN");
  if (z < t) throw InvalidArgument("record with Z < T is truncated and cannot be observed");
}

LtrcSample::LtrcSample(std::vector<LtrcRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw InvalidArgument("LTRC sample must contain at least one record");
  const Curve& first = records_.front().curve();
  for (const auto& r : records_)
    if (!same_grid(r.curve(), first)) throw GridMismatch("sample curves do not share one grid");
}

std::vector<Curve> LtrcSample::curves() const {
  std::vector<Curve> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.curve());
  return out;
}

std::vector<double> LtrcSample::z() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.z());
  return out;
}

std::vector<double> LtrcSample::t() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.t());
  return out;
}

LtrcSample LtrcSample::with(LtrcRecord extra) const {
  auto recs = records_;
  recs.push_back(std::move(extra));
  return LtrcSample(std::move(recs));
}

StepFunction::StepFunction(double initial, std::vector<double> locations, std::vector<double> values)
    : initial_(initial), locations_(std::move(locations)), values_(std::move(values)) {
  if (locations_.size() != values_.size())
    throw InvalidArgument("step function needs one value per jump location");
  if (!std::is_sorted(locations_.begin(), locations_.end()) ||
      std::adjacent_find(locations_.begin(), locations_.end()) != locations_.end())
    throw InvalidArgument("step function jump locations must be strictly increasing");
}

double StepFunction::value(double y) const noexcept {
  const auto it = std::upper_bound(locations_.begin(), locations_.end(), y);
  if (it == locations_.begin()) return initial_;
  return values_[static_cast<std::size_t>(it - locations_.begin()) - 1];
}

double StepFunction::left_limit(double y) const noexcept {
  const auto it = std::lower_bound(locations_.begin(), locations_.end(), y);
  if (it == locations_.begin()) return initial_;
  return values_[static_cast<std::size_t>(it - locations_.begin()) - 1];
}

RiskSet::RiskSet(const LtrcSample& s) : RiskSet(s.z(), s.t()) {}

RiskSet::RiskSet(std::span<const double> z, std::span<const double> t)
    : sorted_z_(z.begin(), z.end()), sorted_t_(t.begin(), t.end()) {
  std::sort(sorted_z_.begin(), sorted_z_.end());
  std::sort(sorted_t_.begin(), sorted_t_.end());
}

// Every record with Z < y also has T <= Z < y, so the at-risk count is
// #{T <= y} - #{Z < y}.
std::size_t RiskSet::count(double y) const noexcept {
  const auto entered = std::upper_bound(sorted_t_.begin(), sorted_t_.end(), y) - sorted_t_.begin();
  const auto left = std::lower_bound(sorted_z_.begin(), sorted_z_.end(), y) - sorted_z_.begin();
  return static_cast<std::size_t>(entered - left);
}

double RiskSet::fraction(double y) const noexcept {
  return static_cast<double>(count(y)) / static_cast<double>(n());
}

double risk_set_fraction(const LtrcSample& s, double y) { return RiskSet(s).fraction(y); }

namespace {

std::vector<std::size_t> order_by(std::span<const double> key) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return key[a] < key[b]; });
  return idx;
}

// 1 - prod_{Z_i <= y} (1 - 1/(n C_n(Z_i)))^{e_i}, with e_i = delta_i (F) or
// 1 - delta_i (G). Tied Z are folded into one jump.
StepFunction tjw_product(const LtrcSample& s, const RiskSet& risk, bool uncensored_factors) {
  const auto z = s.z();
  const auto order = order_by(z);
  std::vector<double> locs;
  std::vector<double> vals;
  double survival = 1.0;
  for (std::size_t k = 0; k < order.size();) {
    const double loc = z[order[k]];
    bool contributes = false;
    for (; k < order.size() && z[order[k]] == loc; ++k) {
      if (s[order[k]].delta() != uncensored_factors) continue;
      survival *= 1.0 - 1.0 / static_cast<double>(risk.count(loc));
      contributes = true;
    }
    if (contributes) {
      locs.push_back(loc);
      vals.push_back(1.0 - survival);
    }
  }
  return StepFunction(0.0, std::move(locs), std::move(vals));
}

StepFunction lynden_bell(const LtrcSample& s, const RiskSet& risk) {
  const auto t = s.t();
  std::vector<double> sorted(t.begin(), t.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> locs;
  std::vector<double> factors;
  for (std::size_t k = 0; k < sorted.size();) {
    const double loc = sorted[k];
    const double f = 1.0 - 1.0 / static_cast<double>(risk.count(loc));
    double group = 1.0;
    for (; k < sorted.size() && sorted[k] == loc; ++k) group *= f;
    locs.push_back(loc);
    factors.push_back(group);
  }
  // L_n(y) = prod_{T_i > y}: the value right of location j is the product of
  // all later group factors.
  std::vector<double> vals(locs.size());
  double suffix = 1.0;
  for (std::size_t j = locs.size(); j-- > 0;) {
    vals[j] = suffix;
    suffix *= factors[j];
  }
  return StepFunction(suffix, std::move(locs), std::move(vals));
}

}  // namespace

StepFunction tjw_F(const LtrcSample& s) { return tjw_product(s, RiskSet(s), true); }
StepFunction tjw_G(const LtrcSample& s) { return tjw_product(s, RiskSet(s), false); }
StepFunction lynden_bell_L(const LtrcSample& s) { return lynden_bell(s, RiskSet(s)); }

SurvivalEstimates::SurvivalEstimates(const LtrcSample& s) {
  const RiskSet risk(s);
  F = tjw_product(s, risk, true);
  G = tjw_product(s, risk, false);
  L = lynden_bell(s, risk);
}

AlphaEstimate alpha_n(const LtrcSample& s) {
  const RiskSet risk(s);
  const StepFunction F = tjw_product(s, risk, true);
  const StepFunction G = tjw_product(s, risk, false);
  const StepFunction L = lynden_bell(s, risk);

  auto points = s.z();
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  AlphaEstimate est;
  for (double y : points) {
    const double c = risk.fraction(y);
    if (!(c > 0.0)) continue;
    const double a = L(y) * (1.0 - F.left_limit(y)) * (1.0 - G.left_limit(y)) / c;
    est.evaluation_points.push_back(y);
    est.evaluations.push_back(a);
  }
  if (est.evaluations.empty())
    throw EstimationImpossible("alpha_n: no evaluation point with C_n(y) > 0");

  const auto [lo, hi] = std::minmax_element(est.evaluations.begin(), est.evaluations.end());
  est.spread = *hi - *lo;
  const double mean = std::accumulate(est.evaluations.begin(), est.evaluations.end(), 0.0) /
                      static_cast<double>(est.evaluations.size());
  est.degenerate = !(mean > 0.0);
  est.value = std::clamp(mean, std::numeric_limits<double>::min(), 1.0);
  return est;
}

SupportDiagnostics diagnose(const LtrcSample& s) {
  const RiskSet risk(s);
  const auto z = s.z();
  const auto t = s.t();
  SupportDiagnostics d;
  const auto [zmin, zmax] = std::minmax_element(z.begin(), z.end());
  const auto [tmin, tmax] = std::minmax_element(t.begin(), t.end());
  d.lower_support_violated = *tmin >= *zmin;
  d.upper_support_violated = *tmax > *zmax;

  double max_uncensored = -std::numeric_limits<double>::infinity();
  for (const auto& r : s.records())
    if (r.delta()) max_uncensored = std::max(max_uncensored, r.z());
  for (const auto& r : s.records()) {
    if (r.t() > *zmin && risk.count(r.t()) == 1) d.lynden_bell_degenerate = true;
    if (!r.delta() && r.z() < max_uncensored && risk.count(r.z()) == 1)
      d.censoring_degenerate = true;
  }
  return d;
}

}  // namespace relerr
