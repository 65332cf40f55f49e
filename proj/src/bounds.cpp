#include "cpsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpsim/cp.hpp"
#include "cpsim/error.hpp"

namespace cpsim {

namespace {

// (p+delta) may exceed 1 by a rounding error when delta is given as 1 - p.
constexpr double kRangeSlack = 1e-12;

double checked_q(double p, double delta) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("psi requires 0 < p < 1");
  if (!(delta >= 0.0) || p + delta > 1.0 + kRangeSlack) {
    throw InputError("psi requires 0 <= delta <= 1 - p");
  }
  return std::min(1.0, p + delta);
}

double xlogy_ratio(double a, double b) { return a == 0.0 ? 0.0 : a * std::log(a / b); }

}  // namespace

double psi(double p, double delta) {
  const double q = checked_q(p, delta);
  if (delta == 0.0) return 0.0;
  return xlogy_ratio(q, p) + xlogy_ratio(1.0 - q, 1.0 - p);
}

double psi_sup(double p, double delta) {
  const double q = checked_q(p, delta);
  auto f = [&](double s) { return s * q - std::log1p(p * std::expm1(s)); };
  // f'(s) = q - p e^s / (1 - p + p e^s) decreases from q to q - 1.
  auto df = [&](double s) { return q - 1.0 / (1.0 + (1.0 - p) / p * std::exp(-s)); };
  if (q >= 1.0) {
    // Supremum approached as s -> infinity.
    return f(60.0);
  }
  double lo = -1.0;
  double hi = 1.0;
  while (df(lo) < 0.0) lo *= 2.0;
  while (df(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    double mid = 0.5 * (lo + hi);
    (df(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::max(f(lo), f(hi));
}

double log_binomial_tail_bound(const TailBoundQuery& q) {
  return -static_cast<double>(q.m) * psi(q.p, q.delta);
}

double binomial_tail_bound(const TailBoundQuery& q) { return std::exp(log_binomial_tail_bound(q)); }

double exact_binomial_tail(std::size_t m, double p, std::size_t k) {
  if (m > 1000) throw InputError("exact_binomial_tail supports m <= 1000");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  if (k == 0) return 1.0;
  if (k > m) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  std::vector<double> logs;
  logs.reserve(m - k + 1);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  for (std::size_t j = k; j <= m; ++j) {
    double lc = std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0);
    logs.push_back(lc + static_cast<double>(j) * lp + static_cast<double>(m - j) * lq);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - top);
  return std::min(1.0, std::exp(top) * sum);
}

std::size_t tail_threshold(std::size_t m, double p, double delta) {
  const double x = (p + delta) * static_cast<double>(m);
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

GrowthCheckResult growth_check(const MultiGraph& g, Vertex x, double lambda, double R,
                               std::size_t ell, double alpha, std::size_t replicas,
                               std::uint64_t seed, std::size_t d, std::size_t r) {
  if (!g.valid(x)) throw InputError("growth_check: x out of range");
  const RootedGraph tree = build_regular_tree(d, ell);
  auto dx = distances_from(g, x, static_cast<std::int64_t>(r));
  std::optional<Vertex> y;
  for (Vertex v = 0; v < g.vertex_count() && !y; ++v) {
    if (dx[v] == kUnreachable || g.neighbours(v).size() < d) continue;
    if (embeds(g, v, tree)) y = v;
  }
  if (!y) {
    throw InputError("growth_check: no vertex within distance r of x embeds (o, T_ell)");
  }
  GrowthCheckResult out;
  out.replicas = replicas;
  out.tree_root = *y;
  out.threshold = std::pow(alpha, static_cast<double>(ell));
  out.time = R * static_cast<double>(ell);
  if (replicas == 0) {
    out.wilson95 = {0.0, 1.0};
    return out;
  }
  ContactSimulator sim(g);
  SimulationOptions options;
  options.horizon = out.time;
  for (std::size_t i = 0; i < replicas; ++i) {
    Rng rng(derive_seed(seed, {i}));
    Trajectory tr = sim.run(lambda, std::span<const Vertex>(&x, 1), rng, options);
    if (static_cast<double>(tr.final_infected) >= out.threshold) ++out.hits;
  }
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(replicas);
  out.wilson95 = stats::wilson(out.hits, replicas);
  return out;
}

}  // namespace cpsim
