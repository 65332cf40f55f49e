#include <doctest.h>

#include <cmath>
#include <limits>

#include "cpsim/error.hpp"
#include "cpsim/stats.hpp"

using namespace cpsim::stats;

TEST_SUITE("stats") {

TEST_CASE("mean and standard error") {
  std::vector<double> xs{1, 2, 3, 4};
  auto m = mean_se(xs);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(mean_se(std::vector<double>{}).mean == 0.0);
  auto p = proportion(3, 10);
  CHECK(p.mean == doctest::Approx(0.3));
  CHECK(p.se == doctest::Approx(std::sqrt(0.3 * 0.7 / 10)));
}

TEST_CASE("median") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK(median({1, inf, inf, 2}) == inf);
  CHECK(median({1, 2, inf}) == 2);
  CHECK(std::isnan(median({})));
}

TEST_CASE("wilson interval") {
  auto w = wilson(50, 100);
  CHECK(w.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(w.hi == doctest::Approx(0.5962).epsilon(1e-3));
  auto z = wilson(0, 20);
  CHECK(z.lo == 0.0);
  CHECK(z.hi > 0.1);
  CHECK(wilson(0, 0).hi == 1.0);
}

TEST_CASE("chi-square p-values") {
  std::vector<std::uint64_t> obs{60, 40};
  std::vector<double> exp{50, 50};
  auto c = chi_square(obs, exp);
  CHECK(c.statistic == doctest::Approx(4.0));
  CHECK(c.dof == 1);
  // 4.0 lies just past the 0.95 quantile 3.8415 of chi-square(1)
  CHECK(c.p_value < 0.05);
  CHECK(c.p_value > 0.04);
  std::vector<std::uint64_t> five{12, 8, 10, 10, 10};
  std::vector<double> flat(5, 10.0);
  auto c5 = chi_square(five, flat);
  CHECK(c5.statistic == doctest::Approx(0.8));
  CHECK(c5.dof == 4);
  std::vector<std::uint64_t> bad{1, 1};
  std::vector<double> zero{0.0, 2.0};
  CHECK(chi_square(bad, zero).p_value == 0.0);
  CHECK_THROWS_AS(chi_square(bad, flat), cpsim::InputError);
}

TEST_CASE("Kolmogorov tail") {
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-9));
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-9));
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-9));
  CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("two-sample KS statistic") {
  auto ks = ks_two_sample({0.1, 0.4, 0.5, 0.9, 1.3}, {0.2, 0.3, 0.6, 2.0, 2.5, 3.0});
  CHECK(ks.statistic == doctest::Approx(0.5));
  auto same = ks_two_sample({1, 2, 3}, {1, 2, 3});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  // ties on an atom: both samples put half their mass at 2
  auto tied = ks_two_sample({2, 2, 1, 3}, {2, 2, 3, 3});
  CHECK(tied.statistic == doctest::Approx(0.25));
  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), cpsim::InputError);
}

TEST_CASE("two-proportion z") {
  CHECK(two_proportion_z(50, 100, 50, 100) == 0.0);
  CHECK(two_proportion_z(0, 10, 0, 10) == 0.0);
  const double z = two_proportion_z(60, 100, 40, 100);
  CHECK(z == doctest::Approx(0.2 / std::sqrt(0.25 * 0.02)));
}

TEST_CASE("line fits") {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0));
  std::vector<double> noisy{1, 3.5, 4.5, 7};
  auto g = fit_line(x, noisy);
  // hand least squares: sxx = 5, sxy = 9.5
  CHECK(g.slope == doctest::Approx(1.9));
  CHECK(g.slope_se > 0.0);

  std::vector<double> w{1, 1, 1, 1};
  auto h = fit_line(x, noisy, w);
  CHECK(h.slope == doctest::Approx(g.slope));
  CHECK(h.slope_se == doctest::Approx(1.0 / std::sqrt(5.0)));
  // a near-zero weight removes the point
  std::vector<double> wz{1, 1, 1, 1e-12}, out{1, 3, 5, 100};
  CHECK(fit_line(x, out, wz).slope == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(fit_line(std::vector<double>{1}, std::vector<double>{1}), cpsim::InputError);
  CHECK_THROWS_AS(fit_line(std::vector<double>{1, 1}, std::vector<double>{1, 2}), cpsim::InputError);
}

}
