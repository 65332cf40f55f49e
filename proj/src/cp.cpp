#include "cpsim/cp.hpp"

#include <algorithm>
#include <string>

#include "cpsim/error.hpp"
#include "cpsim/parallel.hpp"

namespace cpsim {

namespace {

std::vector<double> poisson_times(double rate, double horizon, Rng& rng) {
  std::vector<double> out;
  if (rate <= 0.0) return out;
  double t = exponential(rng, rate);
  while (t <= horizon) {
    out.push_back(t);
    t += exponential(rng, rate);
  }
  return out;
}

void merge_marks(HarrisSystem& h) {
  std::size_t total = 0;
  for (const auto& r : h.recovery) total += r.size();
  for (const auto& r : h.transmission) total += r.size();
  h.merged.clear();
  h.merged.reserve(total);
  for (std::uint32_t v = 0; v < h.recovery.size(); ++v) {
    for (double t : h.recovery[v]) h.merged.push_back({t, MarkKind::kRecovery, v});
  }
  for (std::uint32_t e = 0; e < h.transmission.size(); ++e) {
    for (double t : h.transmission[e]) h.merged.push_back({t, MarkKind::kTransmission, e});
  }
  std::sort(h.merged.begin(), h.merged.end());
}

VertexSet sorted_unique(std::span<const Vertex> vs, const MultiGraph& g) {
  VertexSet out(vs.begin(), vs.end());
  for (Vertex v : out) {
    if (!g.valid(v)) throw InputError("initial vertex " + std::to_string(v) + " out of range");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

HarrisSystem sample_harris(const MultiGraph& g, double lambda, double horizon, Rng& rng) {
  if (lambda < 0.0) throw InputError("lambda must be non-negative");
  if (!(horizon >= 0.0)) throw InputError("horizon must be non-negative");
  HarrisSystem h;
  h.horizon = horizon;
  h.lambda = lambda;
  h.recovery.resize(g.vertex_count());
  h.transmission.resize(g.oriented_edge_count());
  for (auto& marks : h.recovery) marks = poisson_times(1.0, horizon, rng);
  for (auto& marks : h.transmission) marks = poisson_times(lambda, horizon, rng);
  merge_marks(h);
  return h;
}

HarrisSystem make_harris(const MultiGraph& g, double lambda, double horizon,
                         std::vector<std::vector<double>> recovery,
                         std::vector<std::vector<double>> transmission) {
  if (recovery.size() != g.vertex_count()) throw InputError("one recovery list per vertex");
  if (transmission.size() != g.oriented_edge_count()) {
    throw InputError("one transmission list per oriented edge");
  }
  auto check = [horizon](const std::vector<double>& ts) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] < 0.0 || ts[i] > horizon) throw InputError("mark time outside [0, horizon]");
      if (i > 0 && !(ts[i - 1] < ts[i])) throw InputError("mark times must be strictly sorted");
    }
  };
  for (const auto& ts : recovery) check(ts);
  for (const auto& ts : transmission) check(ts);
  HarrisSystem h{horizon, lambda, std::move(recovery), std::move(transmission), {}};
  merge_marks(h);
  return h;
}

SweepResult harris_sweep(const MultiGraph& g, const HarrisSystem& h,
                         std::span<const Vertex> initial, double from, double to,
                         std::span<const std::uint8_t> edge_allowed) {
  if (to > h.horizon) throw InputError("sweep end time exceeds the Harris horizon");
  if (from > to) throw InputError("sweep start after sweep end");
  if (!edge_allowed.empty() && edge_allowed.size() != g.edge_count()) {
    throw InputError("edge mask size must equal the edge count");
  }
  std::vector<std::uint8_t> on(g.vertex_count(), 0);
  std::size_t count = 0;
  for (Vertex v : sorted_unique(initial, g)) {
    on[v] = 1;
    ++count;
  }
  SweepResult out;
  out.peak = count;
  if (count == 0) out.extinction_time = from;

  auto first = std::upper_bound(h.merged.begin(), h.merged.end(), from,
                                [](double t, const Mark& m) { return t < m.time; });
  for (auto it = first; it != h.merged.end() && it->time <= to && count > 0; ++it) {
    if (it->kind == MarkKind::kRecovery) {
      if (on[it->index]) {
        on[it->index] = 0;
        if (--count == 0) out.extinction_time = it->time;
      }
    } else {
      auto oe = OrientedEdge::from_index(it->index);
      if (!edge_allowed.empty() && !edge_allowed[oe.edge]) continue;
      Vertex a = g.v0(oe);
      Vertex b = g.v1(oe);
      if (on[a] && !on[b]) {
        on[b] = 1;
        out.peak = std::max(out.peak, ++count);
      }
    }
  }
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (on[v]) out.infected.push_back(v);
  }
  return out;
}

VertexSet evolve_harris(const MultiGraph& g, const HarrisSystem& h, std::span<const Vertex> A,
                        double t) {
  return harris_sweep(g, h, A, 0.0, t).infected;
}

ContactSimulator::ContactSimulator(const MultiGraph& g)
    : g_(g), position_(g.vertex_count(), static_cast<std::uint32_t>(-1)) {
  infected_.reserve(g.vertex_count());
}

void ContactSimulator::infect(Vertex v) {
  position_[v] = static_cast<std::uint32_t>(infected_.size());
  infected_.push_back(v);
  degree_sum_ += g_.degree(v);
}

void ContactSimulator::cure(Vertex v) {
  std::uint32_t p = position_[v];
  Vertex last = infected_.back();
  infected_[p] = last;
  position_[last] = p;
  infected_.pop_back();
  position_[v] = static_cast<std::uint32_t>(-1);
  degree_sum_ -= g_.degree(v);
}

Vertex ContactSimulator::pick_transmitter(Rng& rng) {
  // Infected vertex with probability proportional to its out-degree, by
  // rejection against the maximum degree.
  const std::uint64_t max_deg = g_.max_degree();
  for (;;) {
    Vertex x = infected_[fast_index(rng, infected_.size())];
    std::size_t deg = g_.degree(x);
    if (deg == max_deg || fast_index(rng, max_deg) < deg) return x;
  }
}

const std::vector<std::int64_t>& ContactSimulator::distances(Vertex source) {
  if (dist_source_ != source) {
    dist_ = distances_from(g_, source);
    dist_source_ = source;
  }
  return dist_;
}

Trajectory ContactSimulator::run(double lambda, std::span<const Vertex> initial, Rng& rng,
                                 const SimulationOptions& options) {
  if (lambda < 0.0) throw InputError("lambda must be non-negative");
  if (!std::is_sorted(options.sample_times.begin(), options.sample_times.end())) {
    throw InputError("sample times must be ascending");
  }
  if (!options.boundary.empty() && options.boundary.size() != g_.vertex_count()) {
    throw InputError("boundary mask size must equal the vertex count");
  }
  Trajectory tr;
  tr.initial = sorted_unique(initial, g_);
  for (Vertex v : tr.initial) infect(v);

  const std::int64_t* dist = nullptr;
  if (tr.initial.size() == 1) {
    dist = distances(tr.initial.front()).data();
    tr.kappa = 0;
  }
  auto on_boundary = [&](Vertex v) { return !options.boundary.empty() && options.boundary[v]; };
  for (Vertex v : tr.initial) tr.touched_boundary |= on_boundary(v);

  const auto& samples = options.sample_times;
  tr.samples.reserve(samples.size());
  std::size_t next_sample = 0;

  double t = 0.0;
  tr.peak = infected_.size();
  for (;;) {
    if (infected_.empty()) {
      tr.extinction_time = t;
      break;
    }
    const double infected = static_cast<double>(infected_.size());
    const double rate = infected + lambda * static_cast<double>(degree_sum_);
    const double t_next = t + exponential(rng, rate);
    if (t_next > options.horizon) {
      tr.censored = true;
      break;
    }
    while (next_sample < samples.size() && samples[next_sample] < t_next) {
      tr.samples.push_back(infected_.size());
      ++next_sample;
    }
    t = t_next;
    ++tr.event_count;
    if (uniform01(rng) * rate < infected) {
      Vertex v = infected_[fast_index(rng, infected_.size())];
      cure(v);
      if (options.record_events) tr.events.push_back({t, EventKind::kRecovery, v, true});
    } else {
      Vertex x = pick_transmitter(rng);
      auto out = g_.out_edges(x);
      OrientedEdge oe = out[fast_index(rng, out.size())];
      Vertex w = g_.v1(oe);
      bool effective = position_[w] == static_cast<std::uint32_t>(-1);
      if (effective) {
        infect(w);
        tr.peak = std::max(tr.peak, infected_.size());
        if (dist) *tr.kappa = std::max<std::size_t>(*tr.kappa, static_cast<std::size_t>(dist[w]));
        tr.touched_boundary |= on_boundary(w);
      }
      if (options.record_events) {
        tr.events.push_back({t, EventKind::kTransmission, oe.index(), effective});
      }
    }
  }
  while (next_sample < samples.size()) {
    tr.samples.push_back(infected_.size());
    ++next_sample;
  }
  tr.end_time = tr.censored ? options.horizon : t;
  tr.final_infected = infected_.size();
  while (!infected_.empty()) cure(infected_.back());
  return tr;
}

Trajectory gillespie(const MultiGraph& g, double lambda, std::span<const Vertex> initial,
                     Rng& rng, const SimulationOptions& options) {
  ContactSimulator sim(g);
  return sim.run(lambda, initial, rng, options);
}

std::vector<ExtinctionSample> extinction_samples(const MultiGraph& g, double lambda,
                                                 std::span<const Vertex> initial,
                                                 std::size_t replicas, double horizon,
                                                 std::uint64_t seed, unsigned workers) {
  std::vector<ExtinctionSample> out(replicas);
  if (replicas == 0) return out;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, replicas));
  SimulationOptions options;
  options.horizon = horizon;
  // Contiguous blocks per worker so each owns one simulator.
  const std::size_t block = (replicas + workers - 1) / workers;
  parallel_for(
      workers,
      [&](std::size_t w) {
        ContactSimulator sim(g);
        for (std::size_t i = w * block; i < std::min(replicas, (w + 1) * block); ++i) {
          Rng rng(derive_seed(seed, {i}));
          Trajectory tr = sim.run(lambda, initial, rng, options);
          out[i] = {tr.extinction_time, tr.censored, tr.peak, tr.kappa};
        }
      },
      workers);
  return out;
}

KappaResult kappa(const MultiGraph& g, double lambda, Vertex x, Rng& rng, double horizon) {
  if (!g.valid(x)) throw InputError("kappa source out of range");
  SimulationOptions options;
  options.horizon = horizon;
  Trajectory tr = gillespie(g, lambda, std::span<const Vertex>(&x, 1), rng, options);
  return {tr.kappa.value_or(0), tr.censored};
}

}  // namespace cpsim
