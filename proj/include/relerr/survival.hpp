#pragma once

// Empirical and product-limit estimators for left-truncated, right-censored
// lifetimes: the risk-set fraction C_n, the TJW estimators of the lifetime
// and censoring distributions, the Lynden-Bell estimator of the truncation
// distribution, and the absence-of-truncation probability alpha_n.

#include <cstddef>
#include <span>
#include <vector>

#include "relerr/functional.hpp"

namespace relerr {

/// One observed quadruple (curve, Z, T, delta). Records with Z < T are never
/// observed, so the constructor rejects them.
class LtrcRecord {
 public:
  LtrcRecord(Curve curve, double z, double t, bool delta);

  const Curve& curve() const noexcept { return curve_; }
  double z() const noexcept { return z_; }
  double t() const noexcept { return t_; }
  bool delta() const noexcept { return delta_; }

 private:
  Curve curve_;
  double z_;
  double t_;
  bool delta_;
};

class LtrcSample {
 public:
  explicit LtrcSample(std::vector<LtrcRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  const LtrcRecord& operator[](std::size_t i) const noexcept { return records_[i]; }
  std::span<const LtrcRecord> records() const noexcept { return records_; }
  const GridPtr& grid() const noexcept { return records_.front().curve().grid_ptr(); }

  std::vector<Curve> curves() const;
  std::vector<double> z() const;
  std::vector<double> t() const;

  /// Copy of this sample with one record appended.
  LtrcSample with(LtrcRecord extra) const;

 private:
  std::vector<LtrcRecord> records_;
};

/// Right-continuous step function stored as sorted jump locations.
/// value(y) is the value at the last jump <= y; left_limit(y) uses jumps < y.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(double initial, std::vector<double> locations, std::vector<double> values);

  double operator()(double y) const noexcept { return value(y); }
  double value(double y) const noexcept;
  double left_limit(double y) const noexcept;

  double initial() const noexcept { return initial_; }
  std::span<const double> locations() const noexcept { return locations_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  double initial_ = 0.0;
  std::vector<double> locations_;
  std::vector<double> values_;
};

/// C_n(y) = #{i : T_i <= y <= Z_i} / n, answered in O(log n) from sorted T and Z.
class RiskSet {
 public:
  explicit RiskSet(const LtrcSample& s);
  RiskSet(std::span<const double> z, std::span<const double> t);

  std::size_t count(double y) const noexcept;
  double fraction(double y) const noexcept;
  std::size_t n() const noexcept { return sorted_z_.size(); }

 private:
  std::vector<double> sorted_z_;
  std::vector<double> sorted_t_;
};

double risk_set_fraction(const LtrcSample& s, double y);

StepFunction tjw_F(const LtrcSample& s);
StepFunction tjw_G(const LtrcSample& s);
StepFunction lynden_bell_L(const LtrcSample& s);

struct AlphaEstimate {
  double value = 1.0;
  std::vector<double> evaluation_points;
  std::vector<double> evaluations;  // raw, before clamping
  double spread = 0.0;
  /// Set when the unclamped common value was <= 0 (a degenerate product-limit factor).
  bool degenerate = false;

  bool invariant_holds(double tolerance = 1e-10) const noexcept { return spread <= tolerance; }
};

/// alpha_n = L_n(y) (1 - F_n(y-)) (1 - G_n(y-)) / C_n(y), evaluated at every
/// observed Z_i with C_n(Z_i) > 0.
AlphaEstimate alpha_n(const LtrcSample& s);

struct SupportDiagnostics {
  bool lower_support_violated = false;  // min T >= min Z: a_L < a_H fails empirically
  bool upper_support_violated = false;  // max T > max Z: b_L <= b_H fails empirically
  bool lynden_bell_degenerate = false;  // some factor (1 - 1/(n C_n(T_i))) is zero
  bool censoring_degenerate = false;    // some censored factor of G_n is zero
  bool ok() const noexcept {
    return !lower_support_violated && !upper_support_violated && !lynden_bell_degenerate &&
           !censoring_degenerate;
  }
};

SupportDiagnostics diagnose(const LtrcSample& s);

/// All estimators built in a single pass over the sample.
struct SurvivalEstimates {
  explicit SurvivalEstimates(const LtrcSample& s);

  StepFunction F;
  StepFunction G;
  StepFunction L;
};

}  // namespace relerr
