#pragma once

// Small statistics toolbox for Monte Carlo reports and acceptance checks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cpsim::stats {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};
MeanSe mean_se(std::span<const double> xs);

/// Proportion with its binomial standard error.
MeanSe proportion(std::size_t hits, std::size_t trials);

/// Median of xs; +inf entries are allowed and sort last.
double median(std::vector<double> xs);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
/// Wilson score interval for a binomial proportion at normal quantile z.
Interval wilson(std::size_t hits, std::size_t trials, double z = 1.959963984540054);

/// Pearson chi-square statistic and upper-tail p-value. Cells with zero
/// expected count must have zero observations and are dropped.
struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};
ChiSquare chi_square(std::span<const std::uint64_t> observed, std::span<const double> expected);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b| (ties handled by
/// evaluating both ECDFs after each distinct value) and its asymptotic
/// p-value from the Kolmogorov distribution.
struct KolmogorovSmirnov {
  double statistic = 0.0;
  double p_value = 1.0;
};
KolmogorovSmirnov ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Upper tail Q_KS(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_q(double x);

/// z statistic of p1 - p2 with the pooled standard error.
double two_proportion_z(std::size_t hits1, std::size_t n1, std::size_t hits2, std::size_t n2);

/// Least-squares line y = intercept + slope * x, with the slope's standard error.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);
/// Weighted least squares with weights w = 1 / variance of each y.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w);

}  // namespace cpsim::stats
