#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cpsim/configmodel.hpp"
#include "cpsim/cp.hpp"
#include "cpsim/error.hpp"
#include "cpsim/experiments.hpp"
#include "cpsim/stats.hpp"

using namespace cpsim;
using nlohmann::json;

namespace {

// Median of the maximum of n independent Exp(1) variables.
double max_exp_median(std::size_t n) {
  return -std::log(1.0 - std::pow(0.5, 1.0 / static_cast<double>(n)));
}

std::string scaling_csv(const ExperimentConfig& cfg) {
  auto res = extinction_scaling(cfg);
  std::ostringstream out;
  write_records_csv(out, res.records, cfg.sample_times);
  write_cells_csv(out, res.cells);
  return out.str();
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("config parsing") {
  json j = {{"d", 3}, {"lambdas", {0.1, 0.2}}, {"ns", {10, 20}}, {"replicas", 5},
            {"horizon_log_factor", 100.0}, {"initial", "single"}, {"seed", 9}};
  ExperimentConfig c = config_from_json(j);
  CHECK(c.lambdas.size() == 2);
  CHECK(c.initial == InitialRule::kSingleVertex);
  CHECK(c.horizon_for(20) == doctest::Approx(100 * std::log(20.0)));
  ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(back.ns == c.ns);
  CHECK(back.seed == 9);
  CHECK(back.horizon_log_factor == c.horizon_log_factor);

  CHECK_THROWS_AS(config_from_json(json{{"nonsense", 1}}), InputError);
  CHECK_THROWS_AS(config_from_json(json{{"initial", "some"}}), InputError);
  CHECK_THROWS_AS(config_from_json(json{{"lambdas", json::array()}}), InputError);
  CHECK_THROWS_AS(config_from_json(json{{"replicas", 0}}), InputError);
  CHECK_THROWS_AS(config_from_json(json{{"horizon", -1.0}}), InputError);
  CHECK_THROWS_AS(config_from_json(json{{"ns", {3}}, {"d", 2}}), InputError);
  CHECK_THROWS_AS(config_from_json(json{{"d", "three"}}), InputError);
  CHECK_THROWS_AS(config_from_json(json::array()), InputError);
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), InputError);
}

TEST_CASE("lambda = 0: maximum of independent exponentials") {
  ExperimentConfig cfg;
  cfg.lambdas = {0.0};
  cfg.ns = {50, 100, 200, 400};
  cfg.replicas = 1500;
  cfg.horizon = 1e6;
  cfg.workers = 1;
  auto res = extinction_scaling(cfg);
  REQUIRE(res.cells.size() == 4);
  for (const auto& c : res.cells) {
    CHECK(c.censored_fraction == 0.0);
    // 1500 replicas put the sample median well inside a 10% band
    CHECK(std::abs(c.median_tau - max_exp_median(c.n)) < 0.1 * max_exp_median(c.n));
  }
  REQUIRE(res.fits.size() == 1);
  CHECK(res.fits[0].fitted);
  CHECK(std::abs(res.fits[0].slope - 1.0) < 0.2);
}

TEST_CASE("reproducible output independent of worker count") {
  ExperimentConfig cfg;
  cfg.lambdas = {0.2, 0.5};
  cfg.ns = {20, 40};
  cfg.replicas = 20;
  cfg.horizon = 50;
  cfg.sample_times = {0.5, 1.0};
  cfg.workers = 1;
  const std::string a = scaling_csv(cfg);
  CHECK(a == scaling_csv(cfg));
  cfg.workers = 3;
  CHECK(a == scaling_csv(cfg));
  CHECK(a.find("frac_t0.5") != std::string::npos);
}

TEST_CASE("records regenerate from their seeds") {
  ExperimentConfig cfg;
  cfg.lambdas = {0.3};
  cfg.ns = {30};
  cfg.replicas = 5;
  cfg.horizon = 100;
  cfg.workers = 1;
  auto res = extinction_scaling(cfg);
  VertexSet all;
  for (Vertex v = 0; v < 30; ++v) all.push_back(v);
  for (const auto& r : res.records) {
    Rng rng(r.seed);
    MultiGraph g = sample_regular(30, 3, rng);
    SimulationOptions so;
    so.horizon = 100;
    Trajectory tr = gillespie(g, 0.3, all, rng, so);
    CHECK(tr.extinction_time == r.tau);
  }
}

TEST_CASE("supercritical cells are censored, never faked") {
  ExperimentConfig cfg;
  cfg.lambdas = {3.0};
  cfg.ns = {40};
  cfg.replicas = 10;
  cfg.horizon = 20;
  cfg.workers = 1;
  auto res = extinction_scaling(cfg);
  for (const auto& r : res.records) {
    CHECK(r.censored);
    CHECK_FALSE(r.tau.has_value());
  }
  CHECK(std::isinf(res.cells[0].median_tau));
  CHECK(to_json(res)["cells"][0]["median_tau"].is_null());
}

TEST_CASE("lambda scan: monotone per replica") {
  ExperimentConfig cfg;
  cfg.lambdas = {0.6, 0.0, 0.2, 0.4};
  cfg.ns = {60};
  cfg.replicas = 60;
  cfg.horizon = 30;
  cfg.workers = 1;
  auto scan = lambda_scan(cfg);
  REQUIRE(scan.cells.size() == 4);
  CHECK(scan.cells[0].lambda == 0.0);
  CHECK(scan.cells[0].censored_fraction == 0.0);
  for (std::size_t l = 1; l < 4; ++l)
    CHECK(scan.cells[l].censored_fraction >= scan.cells[l - 1].censored_fraction);
  for (const auto& row : scan.taus[0])
    for (std::size_t l = 1; l < row.size(); ++l) CHECK(row[l] >= row[l - 1]);
  std::ostringstream out;
  write_scan_csv(out, scan);
  CHECK(out.str().rfind("n,lambda,replicas,median_tau,censored_fraction\n", 0) == 0);
}

TEST_CASE("lambda scan lane agrees in law with direct simulation") {
  ExperimentConfig cfg;
  cfg.lambdas = {0.0, 0.3};
  cfg.ns = {20};
  cfg.replicas = 3000;
  cfg.horizon = 1e4;
  cfg.workers = 1;
  auto scan = lambda_scan(cfg);
  cfg.lambdas = {0.3};
  auto direct = extinction_scaling(cfg);
  std::vector<double> a, b;
  for (const auto& row : scan.taus[0]) a.push_back(row[1]);
  for (const auto& r : direct.records) b.push_back(*r.tau);
  auto ma = stats::mean_se(a), mb = stats::mean_se(b);
  CHECK(std::abs(ma.mean - mb.mean) < 4 * std::hypot(ma.se, mb.se));
}

TEST_CASE("all-infected start dominates under shared marks") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    MultiGraph g = sample_regular(16, 3, rng);
    HarrisSystem h = sample_harris(g, 0.8, 20.0, rng);
    VertexSet all;
    for (Vertex v = 0; v < 16; ++v) all.push_back(v);
    VertexSet some{static_cast<Vertex>(rep % 16)};
    auto ta = harris_sweep(g, h, all, 0.0, 20.0).extinction_time.value_or(kForever);
    auto ts = harris_sweep(g, h, some, 0.0, 20.0).extinction_time.value_or(kForever);
    CHECK(ta >= ts);
  }
}

TEST_CASE("supercritical iteration") {
  ExperimentConfig cfg;
  cfg.replicas = 40;
  cfg.workers = 1;
  cfg.epsilon = 0.6;
  cfg.k = 2.0;
  auto vac = supercritical_iteration(cfg, 100, 2.0);
  CHECK(vac.vacuous);
  CHECK(vac.frequency == 0.0);
  CHECK_FALSE(vac.reliable);

  cfg.epsilon = 0.02;
  cfg.k = 2.0;
  cfg.ell = 2;
  cfg.r = 1;
  cfg.R = 1.0;
  auto big = supercritical_iteration(cfg, 1000, 50.0);
  CHECK_FALSE(big.vacuous);
  CHECK(big.target == 40);
  CHECK(big.wanted == 20);
  CHECK(big.extraction_complete);
  CHECK(big.frequency > 0.95);
  CHECK(big.mean_xi >= big.mean_union);
  auto j = to_json(big);
  CHECK(j["hits"] == big.hits);
}

TEST_CASE("subcritical decay") {
  std::vector<double> grid{0, 1, 2, 3, 4};
  auto pure = subcritical_decay(3, 0.0, 4, grid, 40000, 1, 1);
  CHECK(pure.mean[0] == 1.0);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(std::abs(pure.mean[k] - std::exp(-grid[k])) < 4 * pure.se[k] + 1e-12);
  CHECK(std::abs(pure.rate - 1.0) < 0.02);
  CHECK(pure.contamination == 0.0);

  auto sub = subcritical_decay(3, 0.1, 6, grid, 4000, 2, 1);
  CHECK(sub.mean[0] == 1.0);
  CHECK(sub.rate > 0.0);
  CHECK(sub.envelope == doctest::Approx(0.6));
  CHECK_THROWS_AS(subcritical_decay(3, 0.25, 6, grid, 10, 1), InputError);
  CHECK_THROWS_AS(subcritical_decay(3, 0.1, 6, std::vector<double>{2, 1}, 10, 1), InputError);

  std::ostringstream out;
  write_decay_csv(out, sub);
  CHECK(out.str().rfind("lambda,t,mean,se\n0.1,0,1,0\n", 0) == 0);
}

TEST_CASE("number formatting") {
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(kForever) == "inf");
  CHECK(format_number(0.1) == "0.1");
}

}
