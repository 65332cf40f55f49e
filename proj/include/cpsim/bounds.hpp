#pragma once

// Binomial large-deviation bound P[Bin(m, p) >= (p + delta) m] <= exp(-m psi_p(delta))
// with its exact counterpart, and an empirical probe of tree-growth
// probabilities for the contact process.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "cpsim/graph.hpp"
#include "cpsim/stats.hpp"

namespace cpsim {

struct TailBoundQuery {
  std::size_t m = 0;
  double p = 0.5;
  double delta = 0.0;
};

/// Relative entropy form
///   (p+delta) log((p+delta)/p) + (1-p-delta) log((1-p-delta)/(1-p)),
/// with 0 log 0 = 0. Throws DomainError for p outside (0, 1) and InputError
/// for delta outside [0, 1-p].
double psi(double p, double delta);

/// Legendre form sup_s [s (p+delta) - log(1 - p + p e^s)], maximised
/// numerically by bisection on the derivative. Independent of psi().
double psi_sup(double p, double delta);

/// exp(-m psi_p(delta)).
double binomial_tail_bound(const TailBoundQuery& q);

/// Natural log of the bound, -m psi_p(delta); finite where the bound underflows.
double log_binomial_tail_bound(const TailBoundQuery& q);

/// sum_{j >= k} C(m, j) p^j (1-p)^{m-j}, accumulated in log space.
/// Throws InputError for m > 1000.
double exact_binomial_tail(std::size_t m, double p, std::size_t k);

/// ceil((p + delta) m), robust to the representation error of (p + delta) m.
std::size_t tail_threshold(std::size_t m, double p, double delta);

struct GrowthCheckResult {
  std::size_t replicas = 0;
  std::size_t hits = 0;
  std::optional<double> estimate;  // nullopt when replicas == 0
  stats::Interval wilson95;
  double threshold = 0.0;  // alpha^ell
  double time = 0.0;       // R * ell
  Vertex tree_root = 0;    // the y used for the embedding precondition
};

/// Monte Carlo estimate of P[|xi^x_{R ell}| >= alpha^ell] on g. Requires a
/// vertex y with dist(x, y) <= r such that (y, g) embeds (o, T^d_ell);
/// throws InputError otherwise. Replica i uses derive_seed(seed, {i}).
GrowthCheckResult growth_check(const MultiGraph& g, Vertex x, double lambda, double R,
                               std::size_t ell, double alpha, std::size_t replicas,
                               std::uint64_t seed, std::size_t d, std::size_t r);

}  // namespace cpsim
