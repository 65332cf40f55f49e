#include <doctest.h>

#include <cmath>

#include "cpsim/bounds.hpp"
#include "cpsim/error.hpp"

using namespace cpsim;

namespace {

// Direct summation with binomial coefficients built by Pascal's rule.
double pascal_tail(std::size_t m, double p, std::size_t k) {
  std::vector<long double> row{1};
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<long double> next(row.size() + 1, 0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = next;
  }
  long double s = 0;
  for (std::size_t j = k; j <= m; ++j)
    s += row[j] * std::pow(static_cast<long double>(p), j) *
         std::pow(static_cast<long double>(1 - p), m - j);
  return static_cast<double>(s);
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("psi values") {
  for (double p : {0.1, 0.3, 0.5, 0.9}) CHECK(psi(p, 0.0) == 0.0);
  CHECK(psi(0.5, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(psi(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(psi(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(psi(0.5, 0.6), InputError);
  CHECK_THROWS_AS(psi(0.5, -0.1), InputError);
}

TEST_CASE("psi nondecreasing in delta and equal to the sup form") {
  for (int pi = 1; pi <= 9; ++pi) {
    const double p = pi / 10.0;
    double prev = 0.0;
    for (int k = 0; p + k * 0.01 <= 1.0 + 1e-12; ++k) {
      const double delta = std::min(k * 0.01, 1.0 - p);
      const double v = psi(p, delta);
      CHECK(v >= prev - 1e-15);
      CHECK(std::abs(v - psi_sup(p, delta)) < 1e-9);
      prev = v;
    }
  }
}

TEST_CASE("tail bound") {
  CHECK(binomial_tail_bound({10, 0.3, 0.0}) == 1.0);
  const double exact = pascal_tail(30, 0.1, 9);
  CHECK(exact_binomial_tail(30, 0.1, 9) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(binomial_tail_bound({30, 0.1, 0.2}) >= exact);
  CHECK(log_binomial_tail_bound({60, 0.2, 0.1}) ==
        doctest::Approx(2 * log_binomial_tail_bound({30, 0.2, 0.1})));
  CHECK(std::isfinite(log_binomial_tail_bound({1000000, 0.1, 0.5})));
}

TEST_CASE("exact tail") {
  CHECK(exact_binomial_tail(7, 0.3, 0) == 1.0);
  CHECK(exact_binomial_tail(2, 0.5, 2) == doctest::Approx(0.25));
  CHECK(exact_binomial_tail(5, 0.5, 6) == 0.0);
  CHECK_THROWS_AS(exact_binomial_tail(1001, 0.5, 3), InputError);
  for (std::size_t m = 1; m <= 40; m += 3)
    for (std::size_t k = 0; k <= m; ++k)
      CHECK(exact_binomial_tail(m, 0.37, k) == doctest::Approx(pascal_tail(m, 0.37, k)).epsilon(1e-10));
}

TEST_CASE("threshold rounding") {
  CHECK(tail_threshold(10, 0.3, 0.2) == 5);
  CHECK(tail_threshold(30, 0.1, 0.2) == 9);
  CHECK(tail_threshold(7, 0.5, 0.0) == 4);
}

TEST_CASE("growth check") {
  RootedGraph hat = build_hat_tree(3, 4);
  auto big = growth_check(hat.graph, hat.root, 100.0, 1.0, 2, 1.5, 300, 1, 3, 1);
  REQUIRE(big.estimate.has_value());
  CHECK(*big.estimate > 0.9);
  CHECK(big.threshold == doctest::Approx(2.25));

  auto none = growth_check(hat.graph, hat.root, 1.0, 1.0, 2, 1.5, 0, 1, 3, 1);
  CHECK_FALSE(none.estimate.has_value());

  auto impossible = growth_check(hat.graph, hat.root, 5.0, 1.0, 2, 20.0, 200, 2, 3, 1);
  CHECK(*impossible.estimate == 0.0);

  MultiGraph path(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK_THROWS_AS(growth_check(path, 0, 1.0, 1.0, 1, 1.0, 10, 1, 3, 1), InputError);
}

}
