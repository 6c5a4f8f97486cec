#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "relerr/datagen.hpp"
#include "relerr/errors.hpp"
#include "relerr/regression.hpp"

using namespace relerr;

namespace {

struct Rec {
  std::vector<double> x;
  double z;
  double t;
  int d;
};

LtrcSample make(const GridPtr& g, const std::vector<Rec>& rs) {
  std::vector<LtrcRecord> out;
  for (const auto& r : rs) out.emplace_back(Curve(g, r.x), r.z, r.t, r.d == 1);
  return LtrcSample(out);
}

std::vector<double> flat(const GridPtr& g, double v) { return std::vector<double>(g->size(), v); }

EstimatorConfig with_h(double h) {
  EstimatorConfig c;
  c.bandwidth = h;
  return c;
}

// Naive weights straight from the product-limit definitions.
std::vector<double> oracle_weights(const LtrcSample& s) {
  const std::size_t n = s.size();
  auto C = [&](double y) {
    double c = 0;
    for (const auto& r : s.records()) c += (r.t() <= y && y <= r.z());
    return c / n;
  };
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!s[i].delta()) continue;
    const double y = s[i].z();
    double L = 1.0, Gb = 1.0;
    for (const auto& r : s.records()) {
      if (r.t() > y) L *= 1.0 - 1.0 / (n * C(r.t()));
      if (r.z() <= y && !r.delta()) Gb *= 1.0 - 1.0 / (n * C(r.z()));
    }
    if (L * Gb >= 1e-10) w[i] = 1.0 / (L * Gb);
  }
  return w;
}

double oracle_predict(const LtrcSample& s, const std::vector<double>& w, const Curve& q, double h,
                      EstimatorKind kind, std::size_t skip = static_cast<std::size_t>(-1)) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == skip) continue;
    double d2 = 0.0;
    const auto a = q.values();
    const auto b = s[i].curve().values();
    const double dt = q.grid().spacing();
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double wt = (k == 0 || k + 1 == a.size()) ? 0.5 : 1.0;
      d2 += wt * dt * (a[k] - b[k]) * (a[k] - b[k]);
    }
    const double u = std::sqrt(d2) / h;
    const double K = (u >= 0 && u < 1) ? 1.5 * (1 - u * u) : 0.0;
    const double z = s[i].z();
    if (kind == EstimatorKind::rer) {
      num += w[i] * K / z;
      den += w[i] * K / (z * z);
    } else {
      num += w[i] * K * z;
      den += w[i] * K;
    }
  }
  return den > 0 ? num / den : NAN;
}

LtrcSample simulated(std::size_t n, double mu, double lambda, std::uint64_t seed) {
  Engine rng(seed);
  return simulate_with(n, {mu, lambda, 1.0}, Grid::uniform(100), rng).sample;
}

}  // namespace

TEST_CASE("estimator config validation") {
  CHECK_THROWS_AS(with_h(0.0).validate(), InvalidArgument);
  EstimatorConfig c = with_h(1.0);
  c.weight_floor = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("fit weights") {
  const auto g = Grid::uniform(10);
  const auto complete = make(g, {{flat(g, 0), 1, 0, 1}, {flat(g, 1), 2, 0, 1}, {flat(g, 2), 3, 0, 1}});
  const auto reg = fit(complete, with_h(1), EstimatorKind::rer);
  for (double w : reg.weights()) CHECK(w == 1.0);

  const auto one_censored =
      make(g, {{flat(g, 0), 1, 0, 1}, {flat(g, 1), 2, 0, 0}, {flat(g, 2), 3, 0, 1}});
  const auto w = survival_weights(one_censored);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w[1] == 0.0);
  CHECK(w[2] == doctest::Approx(2.0).epsilon(1e-12));

  const auto all_censored = make(g, {{flat(g, 0), 1, 0, 0}, {flat(g, 1), 2, 0, 0}});
  CHECK_THROWS_AS(fit(all_censored, with_h(1), EstimatorKind::nw), DegenerateFit);
}

TEST_CASE("prediction examples") {
  const auto g = Grid::uniform(10);
  const auto single = make(g, {{flat(g, 0), 7.5, 0, 1}});
  for (auto kind : {EstimatorKind::rer, EstimatorKind::nw})
    CHECK(predict(fit(single, with_h(1), kind), Curve(g, flat(g, 0.5))).value ==
          doctest::Approx(7.5).epsilon(1e-14));

  // Two records at distance 1 on either side of the query.
  const auto two = make(g, {{flat(g, -1), 1, 0, 1}, {flat(g, 1), 2, 0, 1}});
  const Curve q(g, flat(g, 0));
  const auto rer = predict(fit(two, with_h(2), EstimatorKind::rer), q);
  const auto nw = predict(fit(two, with_h(2), EstimatorKind::nw), q);
  CHECK(std::abs(rer.value - 1.2) <= 1e-12);
  CHECK(std::abs(nw.value - 1.5) <= 1e-12);
  const std::vector<double> ones{1, 1};
  CHECK(std::abs(rer.value - oracle_predict(two, ones, q, 2, EstimatorKind::rer)) <= 1e-12);
  CHECK(std::abs(nw.value - oracle_predict(two, ones, q, 2, EstimatorKind::nw)) <= 1e-12);
  CHECK(rer.neighbors == 2);

  const Curve far(g, flat(g, 50));
  try {
    predict(fit(two, with_h(2), EstimatorKind::rer), far);
    FAIL("expected empty neighborhood");
  } catch (const EmptyNeighborhood& e) {
    CHECK(e.neighbors() == 0);
    CHECK(e.kind() == "empty-neighborhood");
  }
  CHECK_FALSE(fit(two, with_h(2), EstimatorKind::nw).evaluate(far).ok());
}

TEST_CASE("complete-data degeneration, scale behaviour and denominator positivity") {
  const auto s = simulated(60, kNoCensoring, kNoTruncation, 101);
  const auto qs = simulated(10, kNoCensoring, kNoTruncation, 202);
  const double h = 1.2;
  const auto reg = fit(s, with_h(h), EstimatorKind::rer);
  const std::vector<double> ones(s.size(), 1.0);

  std::vector<LtrcRecord> scaled;
  for (const auto& r : s.records()) scaled.emplace_back(r.curve(), 3.0 * r.z(), -1.0, true);
  const auto reg3 = fit(LtrcSample(scaled), with_h(h), EstimatorKind::rer);

  for (const auto& rec : qs.records()) {
    const auto p = reg.evaluate(rec.curve());
    if (!p.ok()) continue;
    CHECK(p.denominator > 0.0);
    CHECK(std::abs(p.value - oracle_predict(s, ones, rec.curve(), h, EstimatorKind::rer)) <=
          1e-12 * p.value);
    CHECK(reg3.evaluate(rec.curve()).value == doctest::Approx(3.0 * p.value).epsilon(1e-12));
  }
}

TEST_CASE("brute-force equivalence on small LTRC samples") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = simulated(25, 0.03, 5.0, seed);
    const auto w = oracle_weights(s);
    const auto qs = simulated(5, 0.0, kNoTruncation, 1000 + seed);
    const auto got_w = survival_weights(s);
    for (std::size_t i = 0; i < s.size(); ++i)
      CHECK(got_w[i] == doctest::Approx(w[i]).epsilon(1e-12));
    for (auto kind : {EstimatorKind::rer, EstimatorKind::nw}) {
      const auto reg = fit(s, with_h(1.5), kind);
      for (const auto& q : qs.records()) {
        const auto p = reg.evaluate(q.curve());
        const double o = oracle_predict(s, w, q.curve(), 1.5, kind);
        if (std::isnan(o)) {
          CHECK_FALSE(p.ok());
        } else {
          CHECK(std::abs(p.value - o) <= 1e-12 * std::abs(o));
          CHECK(p.denominator > 0.0);
        }
      }
    }
  }
}

TEST_CASE("locality: records outside the bandwidth do not matter") {
  const auto s = simulated(80, kNoCensoring, kNoTruncation, 303);
  const auto q = simulated(1, kNoCensoring, kNoTruncation, 404)[0].curve();
  const double h = 1.0;
  std::vector<LtrcRecord> inside;
  for (const auto& r : s.records())
    if (l2_distance(r.curve(), q) < h) inside.push_back(r);
  REQUIRE(!inside.empty());
  REQUIRE(inside.size() < s.size());
  for (auto kind : {EstimatorKind::rer, EstimatorKind::nw}) {
    const auto all = fit(s, with_h(h), kind).predict(q);
    const auto local = fit(LtrcSample(inside), with_h(h), kind).predict(q);
    CHECK(all.value == doctest::Approx(local.value).epsilon(1e-13));
  }

  // With survival weights held fixed, the same holds under censoring/truncation.
  const auto ltrc = simulated(80, 0.03, 5.0, 505);
  const auto w = survival_weights(ltrc);
  const auto d = pairwise_distances(ltrc.curves(), q);
  auto z = ltrc.z();
  auto full = kernel_ratio(EstimatorKind::rer, Kernel{}, h, d, w, z);
  std::vector<double> d2, w2, z2;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] < h) {
      d2.push_back(d[i]);
      w2.push_back(w[i]);
      z2.push_back(z[i]);
    }
  auto local = kernel_ratio(EstimatorKind::rer, Kernel{}, h, d2, w2, z2);
  CHECK(full.value == doctest::Approx(local.value).epsilon(1e-13));
}

TEST_CASE("loo cv: trivial grids") {
  const auto g = Grid::uniform(10);
  std::vector<Rec> rs;
  for (int i = 0; i < 3; ++i) rs.push_back({flat(g, 0), 10, 0, 1});
  for (int i = 0; i < 3; ++i) rs.push_back({flat(g, 2), 20, 0, 1});
  const auto s = make(g, rs);
  const std::vector<double> single{0.7};
  CHECK(loo_cv_bandwidth(s, EstimatorKind::rer, single).bandwidth == 0.7);
  const std::vector<double> two{5.0, 0.5};
  const auto sel = loo_cv_bandwidth(s, EstimatorKind::rer, two);
  CHECK(sel.bandwidth == 0.5);
  CHECK(sel.scores[1].score == 0.0);
  // Tie at zero error resolves to the smaller bandwidth.
  const std::vector<double> tie{1.0, 0.5};
  CHECK(loo_cv_bandwidth(s, EstimatorKind::nw, tie).bandwidth == 0.5);

  const auto lone = make(g, {{flat(g, 0), 1, 0, 1}, {flat(g, 9), 2, 0, 1}});
  const std::vector<double> tiny{0.1, 0.2};
  CHECK_THROWS_AS(loo_cv_bandwidth(lone, EstimatorKind::rer, tiny), BandwidthSelectionFailed);
  CHECK_THROWS_AS(loo_cv_bandwidth(lone, EstimatorKind::rer, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("loo cv reproduces an exhaustive recomputation oracle") {
  const auto s = simulated(100, 0.02, 3.0, 606);
  auto dists = DistanceMatrix(s.curves()).upper_triangle();
  std::sort(dists.begin(), dists.end());
  std::vector<double> grid;
  for (int k = 0; k < 15; ++k) {
    const double p = 0.05 + 0.45 * k / 14.0;
    const double pos = p * (dists.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    grid.push_back(dists[lo] + (pos - lo) * (dists[std::min(lo + 1, dists.size() - 1)] - dists[lo]));
  }
  const auto w = oracle_weights(s);
  for (auto kind : {EstimatorKind::rer, EstimatorKind::nw}) {
    double best = INFINITY, best_h = 0;
    std::vector<double> oracle_scores;
    for (double h : grid) {
      double loss = 0, mass = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (w[i] == 0) continue;
        const double r = oracle_predict(s, w, s[i].curve(), h, kind, i);
        if (std::isnan(r)) continue;
        double e = s[i].z() - r;
        if (kind == EstimatorKind::rer) e /= s[i].z();
        loss += w[i] * e * e;
        mass += w[i];
      }
      const double sc = mass > 0 ? loss / mass : INFINITY;
      oracle_scores.push_back(sc);
      if (sc < best) {
        best = sc;
        best_h = h;
      }
    }
    const auto sel = loo_cv_bandwidth(s, kind, grid);
    CHECK(sel.bandwidth == best_h);
    for (std::size_t k = 0; k < grid.size(); ++k)
      CHECK(sel.scores[k].score == doctest::Approx(oracle_scores[k]).epsilon(1e-10));
  }
}

TEST_CASE("default bandwidth grid") {
  const auto g = Grid::uniform(10);
  const auto two = make(g, {{flat(g, 0), 1, 0, 1}, {flat(g, 3), 2, 0, 1}});
  const auto grid = default_bandwidth_grid(two, 5);
  REQUIRE(grid.size() == 1);
  CHECK(grid[0] == doctest::Approx(3.0).epsilon(1e-12));

  const auto same = make(g, {{flat(g, 1), 1, 0, 1}, {flat(g, 1), 2, 0, 1}});
  CHECK_THROWS_AS(default_bandwidth_grid(same, 5), DegenerateDesign);

  const auto s = simulated(20, kNoCensoring, kNoTruncation, 707);
  std::vector<double> d;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = i + 1; j < 20; ++j) d.push_back(l2_distance(s[i].curve(), s[j].curve()));
  std::sort(d.begin(), d.end());
  const auto got = default_bandwidth_grid(s, 10);
  REQUIRE(got.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) {
    const double p = 0.02 + 0.48 * k / 9.0;
    const double pos = p * (d.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double q = d[lo] + (pos - lo) * (d[lo + 1] - d[lo]);
    CHECK(got[k] == doctest::Approx(q).epsilon(1e-12));
    CHECK(got[k] > 0.0);
    if (k) CHECK(got[k] >= got[k - 1]);
  }
}
