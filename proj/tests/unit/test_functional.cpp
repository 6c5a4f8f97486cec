#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "relerr/errors.hpp"
#include "relerr/functional.hpp"

using namespace relerr;

namespace {

Curve constant(const GridPtr& g, double v) { return Curve(g, std::vector<double>(g->size(), v)); }

template <class F>
Curve sampled(const GridPtr& g, F f) {
  std::vector<double> v;
  for (double t : g->points()) v.push_back(f(t));
  return Curve(g, v);
}

}  // namespace

TEST_CASE("kernel values") {
  const Kernel k;
  CHECK(kernel_eval(k, 0.0) == 1.5);
  CHECK(kernel_eval(k, 0.5) == 1.125);
  CHECK(kernel_eval(k, 1.2) == 0.0);
  CHECK(kernel_eval(k, 1.0) == 0.0);
  CHECK(kernel_eval(k, -1e-12) == 0.0);
}

TEST_CASE("kernel positivity and support") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> inside(0.0, 1.0);
  std::uniform_real_distribution<double> outside(1.0, 50.0);
  const Kernel k;
  for (int i = 0; i < 10000; ++i) {
    REQUIRE(k(inside(rng)) > 0.0);
    REQUIRE(k(outside(rng)) == 0.0);
  }
}

TEST_CASE("grid validation") {
  CHECK_NOTHROW(Grid::uniform(100));
  CHECK(Grid::uniform(100)->points().front() == 0.0);
  CHECK(Grid::uniform(100)->points().back() == 1.0);
  CHECK_THROWS_AS(Grid({0.0, 0.3, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(Grid({0.0, 0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(Grid({1.0}), InvalidArgument);
  CHECK_NOTHROW(Grid({-1.0, 0.0, 1.0, 2.0}));
}

TEST_CASE("curve validation") {
  const auto g = Grid::uniform(5);
  CHECK_THROWS_AS(Curve(g, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(Curve(g, {1.0, 2.0, NAN, 0.0, 0.0}), InvalidArgument);
}

TEST_CASE("l2 distance examples") {
  const auto g = Grid::uniform(100);
  const auto a = sampled(g, [](double t) { return std::sin(2 * std::numbers::pi * t); });
  CHECK(l2_distance(a, a) == 0.0);
  CHECK(l2_distance(constant(g, 1.0), constant(g, 3.0)) == doctest::Approx(2.0).epsilon(1e-14));

  // Dense quadrature oracle for sqrt(int sin^2) = sqrt(1/2).
  const std::size_t m = 1'000'000;
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / m;
    const double s = std::sin(2 * std::numbers::pi * t);
    acc += s * s / m;
  }
  const double oracle = std::sqrt(acc);
  CHECK(oracle == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(std::abs(l2_distance(a, constant(g, 0.0)) - oracle) < 1e-3);
}

TEST_CASE("grid mismatch is rejected") {
  const auto a = constant(Grid::uniform(10), 1.0);
  const auto b = constant(Grid::uniform(11), 1.0);
  CHECK_THROWS_AS(l2_distance(a, b), GridMismatch);
  CHECK_THROWS_AS(pairwise_distances(std::vector<Curve>{a}, b), GridMismatch);
  // Equal abscissae on distinct grid objects are the same grid.
  CHECK(l2_distance(a, constant(Grid::uniform(10), 1.0)) == 0.0);
}

TEST_CASE("pairwise distances") {
  const auto g = Grid::uniform(50);
  const auto c = sampled(g, [](double t) { return t * t; });
  CHECK(pairwise_distances(std::vector<Curve>{c}, c) == std::vector<double>{0.0});
  CHECK(pairwise_distances(std::vector<Curve>{c, c, c}, c) == std::vector<double>{0, 0, 0});
  const auto d = pairwise_distances(std::vector<Curve>{constant(g, 1.0), constant(g, 3.0)},
                                    constant(g, 0.0));
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("semi-metric axioms on random curves") {
  const auto g = Grid::uniform(100);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  auto random_curve = [&] {
    std::vector<double> v(g->size());
    for (auto& x : v) x = nd(rng);
    return Curve(g, v);
  };
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = random_curve();
    const auto b = random_curve();
    const auto c = random_curve();
    CHECK(l2_distance(a, a) == 0.0);
    CHECK(std::abs(l2_distance(a, b) - l2_distance(b, a)) <= 1e-12);
    CHECK(l2_distance(a, c) >= 0.0);
    CHECK(l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-12);
  }
}

TEST_CASE("quadrature consistency under grid refinement") {
  auto f = [](double t) { return std::cos(2 * std::numbers::pi * t) + t * t; };
  auto h = [](double t) { return 0.5 * std::sin(4 * std::numbers::pi * t); };
  for (std::size_t m : {100u, 200u, 400u}) {
    const auto g1 = Grid::uniform(m);
    const auto g2 = Grid::uniform(2 * m - 1);
    const double d1 = l2_distance(sampled(g1, f), sampled(g1, h));
    const double d2 = l2_distance(sampled(g2, f), sampled(g2, h));
    CHECK(std::abs(d1 - d2) / d2 < 1e-4);
  }
}

TEST_CASE("distance matrix is symmetric with zero diagonal") {
  const auto g = Grid::uniform(20);
  std::vector<Curve> cs;
  for (int k = 0; k < 6; ++k) cs.push_back(sampled(g, [k](double t) { return k * t; }));
  const DistanceMatrix d(cs);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    CHECK(d(i, i) == 0.0);
    for (std::size_t j = 0; j < cs.size(); ++j) CHECK(d(i, j) == l2_distance(cs[i], cs[j]));
  }
  CHECK(d.upper_triangle().size() == 15);
}
