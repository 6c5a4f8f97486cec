#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "relerr/commands.hpp"
#include "relerr/csv_io.hpp"
#include "relerr/errors.hpp"
#include "relerr/svg.hpp"

using namespace relerr;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("relerr_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng) * std::pow(10.0, k % 20 - 10);
    CHECK(io::parse_double(io::format_double(x)) == x);
  }
  CHECK(std::isinf(io::parse_double(io::format_double(-std::numeric_limits<double>::infinity()))));
  CHECK(io::parse_double("+1.5") == 1.5);
  CHECK_THROWS_AS(io::parse_double("1.5x"), ParseError);
  CHECK_THROWS_AS(io::parse_double(""), ParseError);
}

TEST_CASE("sample csv round trip") {
  Engine rng(31);
  const auto sim = simulate_with(30, {0.03, 3.0, 1.0}, Grid::uniform(25), rng);
  const auto text = io::format_sample(sim.sample);
  CHECK(text.rfind("# schema: relerr.sample/v1\n", 0) == 0);
  const auto back = io::parse_sample(text);
  REQUIRE(back.size() == sim.sample.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].z() == sim.sample[i].z());
    CHECK(back[i].t() == sim.sample[i].t());
    CHECK(back[i].delta() == sim.sample[i].delta());
    for (std::size_t k = 0; k < 25; ++k)
      CHECK(back[i].curve().values()[k] == sim.sample[i].curve().values()[k]);
  }
  CHECK(io::format_sample(back) == text);

  const auto curves = sim.sample.curves();
  const auto ctext = io::format_curves(curves);
  const auto cback = io::parse_curves(ctext);
  REQUIRE(cback.size() == curves.size());
  CHECK(io::format_curves(cback) == ctext);
}

TEST_CASE("csv rejection") {
  CHECK_THROWS_AS(io::parse_csv("", "sample"), ParseError);
  CHECK_THROWS_AS(io::parse_csv("a,b\n1,2,3\n", "sample"), ParseError);
  CHECK_THROWS_AS(io::parse_csv("# schema: relerr.curves/v1\na,b\n1,2\n", "sample"), ParseError);
  CHECK_THROWS_AS(io::parse_csv("# schema: relerr.sample/v2\na,b\n1,2\n", "sample"), ParseError);
  CHECK_NOTHROW(io::parse_csv("a,b\n1,2\n", "sample"));

  const std::string head = "z,t,delta,0,1\n";
  CHECK_NOTHROW(io::parse_sample(head + "2,1,1,0,0\n"));
  CHECK_THROWS_AS(io::parse_sample(head + "2,1,2,0,0\n"), ParseError);
  CHECK_THROWS(io::parse_sample(head + "1,2,1,0,0\n"));
  CHECK_THROWS(io::parse_sample(head + "2,1,1,0\n"));
}

TEST_CASE("report formats") {
  const std::vector<InfluencePoint> pts{{0.5, 1.0, -2.0}, {1.5, 0.25, 3.0}};
  const auto csv = io::format_influence(pts);
  CHECK(csv.find("distance,eif_rer,eif_nw\n0.5,1,-2\n1.5,0.25,3\n") != std::string::npos);

  std::vector<io::PredictionRow> rows(2);
  rows[0].rer = {2.0, 1.0, 0.5, 3};
  rows[0].nw = {2.5, 5.0, 2.0, 3};
  rows[1].query_id = 1;
  rows[1].rer.value = NAN;
  rows[1].nw.value = NAN;
  const auto pred = io::format_predictions(rows);
  CHECK(pred.find("ok") != std::string::npos);
  CHECK(pred.find("empty-neighborhood") != std::string::npos);
}

TEST_CASE("svg scatter") {
  std::vector<InfluencePoint> one{{1.0, 0.1, 5.0}};
  const auto s1 = render_svg_scatter(one, "t");
  CHECK(count(s1, "<circle class=\"rer\"") == 1);
  CHECK(count(s1, "<rect class=\"nw\"") == 1);
  CHECK(s1.find("distance to outlier curve") != std::string::npos);
  CHECK(s1.find("EIF") != std::string::npos);

  std::vector<InfluencePoint> many;
  for (int k = 0; k < 20; ++k) many.push_back({k * 0.3, std::sin(k), 10.0 * std::cos(k)});
  const auto s20 = render_svg_scatter(many, "t");
  CHECK(count(s20, "<circle class=\"rer\"") == 20);
  CHECK(count(s20, "<rect class=\"nw\"") == 20);
  CHECK(render_svg_scatter(many, "t") == s20);
  CHECK_THROWS_AS(render_svg_scatter(std::vector<InfluencePoint>{}, "t"), NoData);
}

TEST_CASE("atomic write") {
  const auto dir = scratch_dir("atomic");
  const auto p = dir / "nested" / "f.txt";
  io::atomic_write(p, "hello\n");
  CHECK(io::read_file(p) == "hello\n");
  io::atomic_write(p, "bye\n");
  CHECK(io::read_file(p) == "bye\n");
  CHECK_FALSE(fs::exists(dir / "nested" / "f.txt.tmp"));
}

TEST_CASE("simulate and fit manifests replay byte-identically") {
  const auto dir = scratch_dir("replay");
  app::SimulateOptions so;
  so.config.n = 40;
  so.config.mu = 0.02;
  so.config.lambda = 2.5;
  so.config.seed = 3;
  so.config.grid_size = 30;
  so.out = dir / "train.csv";
  const auto m = app::run_simulate(so);
  const auto first = io::read_file(so.out);
  auto replay = app::simulate_from_manifest(m);
  CHECK(replay.out == so.out);
  app::run_simulate(replay);
  CHECK(io::read_file(so.out) == first);

  app::SimulateOptions qo = so;
  qo.config.seed = 4;
  qo.config.n = 5;
  qo.out = dir / "queries.csv";
  app::run_simulate(qo);

  app::FitOptions fo;
  fo.sample = so.out;
  fo.queries = qo.out;
  fo.out = dir / "pred.csv";
  const auto fm = app::run_fit(fo);
  const auto pred = io::read_file(fo.out);
  app::run_fit(app::fit_from_manifest(fm));
  CHECK(io::read_file(fo.out) == pred);
  CHECK(app::read_json(dir / "pred.json")["subcommand"] == "fit");
}

TEST_CASE("scenario parsing and panel names") {
  const auto j = app::Json::parse(R"([{"censor":0.1,"trunc":0.2,"n":50}])");
  const auto s = app::parse_scenarios(j);
  REQUIRE(s.size() == 1);
  CHECK(s[0].n == 50);
  CHECK(app::panel_stem({0.2, 0.4}) == "eif_c20_t40");
  CHECK_THROWS(app::parse_scenarios(app::Json::parse(R"({"censor":1})")));
}
