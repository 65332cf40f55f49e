#pragma once

// The contact process on a finite multigraph: infected vertices recover at
// rate 1 and transmit along every oriented edge leaving them at rate lambda.
//
// Two engines are provided. The graphical (Harris) construction pre-samples
// all Poisson marks on [0, horizon] and replays them, which couples every
// initial condition on one probability space. The event-driven engine
// simulates the generator directly without storing marks.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cpsim/graph.hpp"
#include "cpsim/rng.hpp"

namespace cpsim {

using VertexSet = std::vector<Vertex>;  // sorted, duplicate-free

inline constexpr double kForever = std::numeric_limits<double>::infinity();

enum class MarkKind : std::uint8_t { kRecovery = 0, kTransmission = 1 };

/// One Poisson mark. `index` is a vertex for recoveries and an oriented-edge
/// index (OrientedEdge::index()) for transmissions. Marks replay in the order
/// (time, kind, index): recovery before transmission on equal times.
struct Mark {
  double time = 0.0;
  MarkKind kind = MarkKind::kRecovery;
  std::uint32_t index = 0;

  friend bool operator<(const Mark& a, const Mark& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.index < b.index;
  }
};

/// Realised marks of the graphical construction on [0, horizon].
struct HarrisSystem {
  double horizon = 0.0;
  double lambda = 0.0;
  std::vector<std::vector<double>> recovery;      // per vertex, sorted
  std::vector<std::vector<double>> transmission;  // per oriented edge, sorted
  std::vector<Mark> merged;                       // all marks in replay order

  std::size_t mark_count() const { return merged.size(); }
};

/// Independent rate-1 Poisson processes per vertex and rate-lambda processes
/// per oriented edge (so k parallel edges carry 2k transmission streams).
HarrisSystem sample_harris(const MultiGraph& g, double lambda, double horizon, Rng& rng);

/// Builds a HarrisSystem from explicit mark lists. Throws InputError if the
/// list sizes do not match g or a time is unsorted or outside [0, horizon].
HarrisSystem make_harris(const MultiGraph& g, double lambda, double horizon,
                         std::vector<std::vector<double>> recovery,
                         std::vector<std::vector<double>> transmission);

struct SweepResult {
  VertexSet infected;                   // state at the end time
  std::optional<double> extinction_time;  // first time the set became empty
  std::size_t peak = 0;
};

/// Replays the marks with from < time <= to starting from `initial` at time
/// `from`. A recovery mark removes its vertex; a transmission mark whose start
/// vertex is infected infects its end vertex. If `edge_allowed` is non-empty,
/// transmissions along edges with edge_allowed[e] == 0 are ignored (the
/// process on a spanning subgraph, driven by the same marks).
/// Throws InputError when to > horizon or from > to.
SweepResult harris_sweep(const MultiGraph& g, const HarrisSystem& h,
                         std::span<const Vertex> initial, double from, double to,
                         std::span<const std::uint8_t> edge_allowed = {});

/// xi^A_t: the vertices joined to A x {0} by an infection path ending at time t.
VertexSet evolve_harris(const MultiGraph& g, const HarrisSystem& h, std::span<const Vertex> A,
                        double t);

enum class EventKind : std::uint8_t { kRecovery = 0, kTransmission = 1 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kRecovery;
  std::uint32_t index = 0;  // vertex or oriented-edge index
  bool effective = true;    // false for transmissions onto infected vertices
};

struct SimulationOptions {
  double horizon = kForever;
  bool record_events = false;
  /// Infected counts are reported at these (ascending) times.
  std::vector<double> sample_times;
  /// If non-empty, Trajectory::touched_boundary reports whether any vertex
  /// with boundary[v] != 0 was ever infected.
  std::span<const std::uint8_t> boundary;
};

struct Trajectory {
  VertexSet initial;
  std::vector<Event> events;  // only with record_events
  /// tau = inf{t : infected = empty}; nullopt when censored at the horizon.
  std::optional<double> extinction_time;
  bool censored = false;
  double end_time = 0.0;
  std::size_t peak = 0;
  std::size_t final_infected = 0;
  std::uint64_t event_count = 0;
  /// Max distance from the source ever infected; single-source runs only.
  std::optional<std::size_t> kappa;
  bool touched_boundary = false;
  std::vector<std::size_t> samples;  // aligned with sample_times
};

/// Event-driven simulator of the generator. Holds per-graph scratch buffers so
/// that many replicas on the same graph cost O(events) each, not O(n).
/// Not thread-safe; use one instance per worker.
class ContactSimulator {
 public:
  explicit ContactSimulator(const MultiGraph& g);

  /// Exact simulation: total rate |I| + lambda * sum of out-degrees of I.
  /// Transmissions onto infected vertices and along loops are drawn but have
  /// no effect. lambda >= 0.
  Trajectory run(double lambda, std::span<const Vertex> initial, Rng& rng,
                 const SimulationOptions& options = {});

  const MultiGraph& graph() const { return g_; }

 private:
  void infect(Vertex v);
  void cure(Vertex v);
  Vertex pick_transmitter(Rng& rng);
  const std::vector<std::int64_t>& distances(Vertex source);

  const MultiGraph& g_;
  std::vector<Vertex> infected_;
  std::vector<std::uint32_t> position_;
  std::size_t degree_sum_ = 0;
  Vertex dist_source_ = kNoVertex;
  std::vector<std::int64_t> dist_;
};

/// One-shot wrapper around ContactSimulator.
Trajectory gillespie(const MultiGraph& g, double lambda, std::span<const Vertex> initial,
                     Rng& rng, const SimulationOptions& options = {});

struct ExtinctionSample {
  std::optional<double> tau;  // nullopt when censored
  bool censored = false;
  std::size_t peak = 0;
  std::optional<std::size_t> kappa;
};

/// Independent replicas; replica i uses derive_seed(seed, {i}), so results do
/// not depend on the worker count.
std::vector<ExtinctionSample> extinction_samples(const MultiGraph& g, double lambda,
                                                 std::span<const Vertex> initial,
                                                 std::size_t replicas, double horizon,
                                                 std::uint64_t seed, unsigned workers = 0);

struct KappaResult {
  std::size_t kappa = 0;
  bool censored = false;
};

/// Reach radius of a single-source run: sup of dist(x, y) over ever-infected y.
KappaResult kappa(const MultiGraph& g, double lambda, Vertex x, Rng& rng,
                  double horizon = kForever);

/// Nearly divisionless unbiased integer in [0, bound).
inline std::uint64_t fast_index(Rng& rng, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace cpsim
