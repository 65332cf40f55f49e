#pragma once

// Desk-scale experiments: extinction-time scaling on random regular graphs,
// lambda scans with coupled lanes, the supercritical iteration step, and
// subcritical decay on a truncated regular tree.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpsim/graph.hpp"

namespace cpsim {

enum class InitialRule { kAllInfected, kSingleVertex };

struct ExperimentConfig {
  std::size_t d = 3;
  std::vector<double> lambdas{0.1};
  std::vector<std::size_t> ns{100};
  std::size_t replicas = 100;
  double horizon = 100.0;
  /// When set, the horizon of an n-cell is horizon_log_factor * log(n).
  std::optional<double> horizon_log_factor;
  InitialRule initial = InitialRule::kAllInfected;
  std::vector<double> sample_times;
  std::uint64_t seed = 1;
  unsigned workers = 0;

  // supercritical-iteration
  double epsilon = 0.05;
  double k = 2.0;
  std::size_t ell = 2;
  std::size_t r = 1;
  double R = 1.0;
  double alpha = 2.0;

  // subcritical-decay
  std::size_t ell_trunc = 10;
  std::vector<double> t_grid{0, 1, 2, 3, 4, 5, 6};

  double horizon_for(std::size_t n) const;
};

/// Throws InputError on unknown keys, empty grids, non-positive horizon,
/// zero replicas, or an odd n(d+1).
void validate(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultRecord {
  std::size_t n = 0;
  double lambda = 0.0;
  std::size_t replica = 0;
  std::uint64_t seed = 0;  // regenerates graph and run
  std::optional<double> tau;
  bool censored = false;
  double peak_fraction = 0.0;
  std::vector<double> samples;  // infected fraction at cfg.sample_times
};

struct ScalingCell {
  std::size_t n = 0;
  double lambda = 0.0;
  double horizon = 0.0;
  std::size_t replicas = 0;
  double median_tau = 0.0;  // +inf when at least half the runs were censored
  double mean_tau = 0.0;    // over uncensored runs
  double censored_fraction = 0.0;
  double median_over_log_n = 0.0;
};

struct ScalingFit {
  double lambda = 0.0;
  bool fitted = false;  // needs >= 2 cells with finite median
  double slope = 0.0;   // median tau against log n
  double intercept = 0.0;
  double slope_se = 0.0;
  double ratio_spread = 0.0;  // max / min of median / log n
};

struct ScalingResult {
  std::vector<ResultRecord> records;
  std::vector<ScalingCell> cells;
  std::vector<ScalingFit> fits;
};

/// Fresh graph per replica; replica seed derive_seed(seed, {n index, lambda
/// index, replica}).
ScalingResult extinction_scaling(const ExperimentConfig& cfg);

struct ScanCell {
  std::size_t n = 0;
  double lambda = 0.0;
  std::size_t replicas = 0;
  double median_tau = 0.0;
  double censored_fraction = 0.0;
};

struct ScanResult {
  std::vector<ScanCell> cells;
  /// tau per (n index, replica, lambda index), +inf for censored.
  std::vector<std::vector<std::vector<double>>> taus;
};

/// All lambdas share one graph and one mark stream per replica: marks are
/// drawn at the largest lambda and a transmission is kept by lane i when its
/// uniform label is below lambda_i / lambda_max. tau is then monotone in
/// lambda replica by replica.
ScanResult lambda_scan(const ExperimentConfig& cfg);

struct IterationReport {
  std::size_t n = 0;
  std::size_t d = 0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double k = 0.0;
  std::size_t ell = 0;
  std::size_t r = 0;
  double R = 0.0;
  double alpha = 0.0;
  double time = 0.0;  // R * ell
  std::size_t w_size = 0;
  std::size_t target = 0;  // ceil(k eps n)
  std::size_t wanted = 0;  // floor(eps n)
  std::size_t extracted = 0;
  bool extraction_complete = false;
  bool vacuous = false;
  std::size_t replicas = 0;
  std::size_t hits = 0;        // |xi^W| >= target
  std::size_t union_hits = 0;  // |union zeta| >= target
  double frequency = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  double mean_xi = 0.0;
  double mean_union = 0.0;
  double mean_grown = 0.0;  // per replica, witnesses with |zeta| >= alpha^ell
  bool reliable = true;
};

/// One step of the iteration: fresh graph, W = first ceil(k eps n) vertices,
/// post-hoc regenerative extraction of floor(eps n) of them, shared Harris
/// marks up to R ell for xi^W on g and the disjoint tree processes. Throws
/// InvariantViolation if xi^W fails to contain the union of tree processes.
IterationReport supercritical_iteration(const ExperimentConfig& cfg, std::size_t n, double lambda);

struct DecayResult {
  std::size_t d = 0;
  double lambda = 0.0;
  std::size_t ell_trunc = 0;
  std::size_t replicas = 0;
  std::vector<double> t_grid;
  std::vector<double> mean;
  std::vector<double> se;
  double rate = 0.0;  // c0 estimate: minus the slope of log mean against t
  double rate_se = 0.0;
  std::size_t fit_points = 0;
  double contamination = 0.0;
  double envelope = 0.0;  // 1 - (d+1) lambda
  bool reliable = true;   // contamination <= 1%
};

/// Mean infected count on hat-tree(d, ell_trunc) from the root. Throws
/// InputError unless 0 <= lambda < 1/(d+1).
DecayResult subcritical_decay(std::size_t d, double lambda, std::size_t ell_trunc,
                              const std::vector<double>& t_grid, std::size_t replicas,
                              std::uint64_t seed, unsigned workers = 0);

void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records,
                       const std::vector<double>& sample_times);
void write_cells_csv(std::ostream& out, const std::vector<ScalingCell>& cells);
void write_scan_csv(std::ostream& out, const ScanResult& scan);
void write_decay_csv(std::ostream& out, const DecayResult& decay, bool header = true);

nlohmann::json to_json(const ScalingResult& r);
nlohmann::json to_json(const ScanResult& r);
nlohmann::json to_json(const IterationReport& r);
nlohmann::json to_json(const DecayResult& r);

/// Fixed-format number for CSV output ("inf" for infinity).
std::string format_number(double x);

}  // namespace cpsim
