#include "cpsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "cpsim/configmodel.hpp"
#include "cpsim/cp.hpp"
#include "cpsim/error.hpp"
#include "cpsim/explore.hpp"
#include "cpsim/parallel.hpp"
#include "cpsim/stats.hpp"

namespace cpsim {

namespace {

// Splits [0, count) into contiguous blocks, one per worker, so that each
// worker can own reusable buffers. fn(begin, end).
template <class Fn>
void run_blocks(std::size_t count, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  const std::size_t block = (count + workers - 1) / workers;
  parallel_for(
      workers,
      [&](std::size_t w) { fn(w * block, std::min(count, (w + 1) * block)); }, workers);
}

VertexSet initial_set(const ExperimentConfig& cfg, std::size_t n) {
  VertexSet a;
  if (cfg.initial == InitialRule::kSingleVertex) {
    a.push_back(0);
  } else {
    for (Vertex v = 0; v < n; ++v) a.push_back(v);
  }
  return a;
}

bool ascending(const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); }

}  // namespace

double ExperimentConfig::horizon_for(std::size_t n) const {
  if (horizon_log_factor) return *horizon_log_factor * std::log(static_cast<double>(n));
  return horizon;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.d < 2) throw InputError("config: d must be >= 2");
  if (cfg.lambdas.empty()) throw InputError("config: lambdas must be non-empty");
  if (cfg.ns.empty()) throw InputError("config: ns must be non-empty");
  if (cfg.replicas == 0) throw InputError("config: replicas must be >= 1");
  for (double l : cfg.lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw InputError("config: lambdas must be >= 0");
  }
  for (std::size_t n : cfg.ns) {
    if (n < 2) throw InputError("config: every n must be >= 2");
    if ((n * (cfg.d + 1)) % 2 != 0) throw InputError("config: n(d+1) must be even");
  }
  if (cfg.horizon_log_factor) {
    if (!(*cfg.horizon_log_factor > 0.0)) throw InputError("config: horizon factor must be > 0");
  } else if (!(cfg.horizon > 0.0)) {
    throw InputError("config: horizon must be > 0");
  }
  if (!ascending(cfg.sample_times)) throw InputError("config: sample_times must be ascending");
  if (cfg.t_grid.empty() || !ascending(cfg.t_grid) || cfg.t_grid.front() < 0.0) {
    throw InputError("config: t_grid must be non-empty, ascending and >= 0");
  }
  if (!(cfg.epsilon > 0.0) || !(cfg.k > 0.0) || !(cfg.R > 0.0) || !(cfg.alpha > 0.0)) {
    throw InputError("config: epsilon, k, R and alpha must be > 0");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{
      "d",     "lambdas", "ns",  "replicas", "horizon", "horizon_log_factor", "initial",
      "sample_times", "seed", "workers", "epsilon", "k", "ell", "r", "R", "alpha",
      "ell_trunc", "t_grid"};
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InputError("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("d")) c.d = j.at("d").get<std::size_t>();
    if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
    if (j.contains("ns")) c.ns = j.at("ns").get<std::vector<std::size_t>>();
    if (j.contains("replicas")) c.replicas = j.at("replicas").get<std::size_t>();
    if (j.contains("horizon")) c.horizon = j.at("horizon").get<double>();
    if (j.contains("horizon_log_factor")) {
      c.horizon_log_factor = j.at("horizon_log_factor").get<double>();
    }
    if (j.contains("initial")) {
      auto rule = j.at("initial").get<std::string>();
      if (rule == "all") {
        c.initial = InitialRule::kAllInfected;
      } else if (rule == "single") {
        c.initial = InitialRule::kSingleVertex;
      } else {
        throw InputError("config: initial must be 'all' or 'single'");
      }
    }
    if (j.contains("sample_times")) c.sample_times = j.at("sample_times").get<std::vector<double>>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
    if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
    if (j.contains("k")) c.k = j.at("k").get<double>();
    if (j.contains("ell")) c.ell = j.at("ell").get<std::size_t>();
    if (j.contains("r")) c.r = j.at("r").get<std::size_t>();
    if (j.contains("R")) c.R = j.at("R").get<double>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("ell_trunc")) c.ell_trunc = j.at("ell_trunc").get<std::size_t>();
    if (j.contains("t_grid")) c.t_grid = j.at("t_grid").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"d", c.d},
                   {"lambdas", c.lambdas},
                   {"ns", c.ns},
                   {"replicas", c.replicas},
                   {"horizon", c.horizon},
                   {"initial", c.initial == InitialRule::kAllInfected ? "all" : "single"},
                   {"sample_times", c.sample_times},
                   {"seed", c.seed},
                   {"epsilon", c.epsilon},
                   {"k", c.k},
                   {"ell", c.ell},
                   {"r", c.r},
                   {"R", c.R},
                   {"alpha", c.alpha},
                   {"ell_trunc", c.ell_trunc},
                   {"t_grid", c.t_grid}};
  if (c.horizon_log_factor) j["horizon_log_factor"] = *c.horizon_log_factor;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

ScalingResult extinction_scaling(const ExperimentConfig& cfg) {
  validate(cfg);
  ScalingResult res;
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const std::size_t n = cfg.ns[ni];
    const double horizon = cfg.horizon_for(n);
    const VertexSet initial = initial_set(cfg, n);
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
      const double lambda = cfg.lambdas[li];
      std::vector<ResultRecord> recs(cfg.replicas);
      run_blocks(cfg.replicas, cfg.workers, [&](std::size_t begin, std::size_t end) {
        SimulationOptions so;
        so.horizon = horizon;
        so.sample_times = cfg.sample_times;
        for (std::size_t i = begin; i < end; ++i) {
          ResultRecord& rec = recs[i];
          rec.n = n;
          rec.lambda = lambda;
          rec.replica = i;
          rec.seed = derive_seed(cfg.seed, {ni, li, i});
          Rng rng(rec.seed);
          MultiGraph g = sample_regular(n, cfg.d, rng);
          Trajectory tr = gillespie(g, lambda, initial, rng, so);
          rec.tau = tr.extinction_time;
          rec.censored = tr.censored;
          rec.peak_fraction = static_cast<double>(tr.peak) / static_cast<double>(n);
          for (std::size_t s : tr.samples) {
            rec.samples.push_back(static_cast<double>(s) / static_cast<double>(n));
          }
        }
      });
      ScalingCell cell;
      cell.n = n;
      cell.lambda = lambda;
      cell.horizon = horizon;
      cell.replicas = cfg.replicas;
      std::vector<double> taus;
      std::vector<double> finite;
      std::size_t censored = 0;
      for (const auto& r : recs) {
        taus.push_back(r.tau.value_or(kForever));
        if (r.tau) finite.push_back(*r.tau);
        censored += r.censored;
      }
      cell.median_tau = stats::median(taus);
      cell.mean_tau = finite.empty() ? 0.0 : stats::mean_se(finite).mean;
      cell.censored_fraction = static_cast<double>(censored) / static_cast<double>(recs.size());
      cell.median_over_log_n = cell.median_tau / std::log(static_cast<double>(n));
      res.cells.push_back(cell);
      res.records.insert(res.records.end(), recs.begin(), recs.end());
    }
  }
  for (double lambda : cfg.lambdas) {
    ScalingFit fit;
    fit.lambda = lambda;
    std::vector<double> x;
    std::vector<double> y;
    double lo = kForever;
    double hi = 0.0;
    for (const auto& c : res.cells) {
      if (c.lambda != lambda || !std::isfinite(c.median_tau)) continue;
      x.push_back(std::log(static_cast<double>(c.n)));
      y.push_back(c.median_tau);
      lo = std::min(lo, c.median_over_log_n);
      hi = std::max(hi, c.median_over_log_n);
    }
    if (x.size() >= 2) {
      auto lf = stats::fit_line(x, y);
      fit.fitted = true;
      fit.slope = lf.slope;
      fit.intercept = lf.intercept;
      fit.slope_se = lf.slope_se;
      fit.ratio_spread = lo > 0.0 ? hi / lo : kForever;
    }
    res.fits.push_back(fit);
  }
  return res;
}

ScanResult lambda_scan(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<double> lambdas = cfg.lambdas;
  std::sort(lambdas.begin(), lambdas.end());
  const double lambda_max = lambdas.back();
  const std::size_t lanes = lambdas.size();
  ScanResult res;
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const std::size_t n = cfg.ns[ni];
    const double horizon = cfg.horizon_for(n);
    const VertexSet initial = initial_set(cfg, n);
    std::vector<std::vector<double>> taus(cfg.replicas, std::vector<double>(lanes, kForever));
    run_blocks(cfg.replicas, cfg.workers, [&](std::size_t begin, std::size_t end) {
      std::vector<std::vector<std::uint8_t>> on(lanes);
      std::vector<std::size_t> count(lanes);
      for (std::size_t i = begin; i < end; ++i) {
        Rng rng(derive_seed(cfg.seed, {ni, i}));
        MultiGraph g = sample_regular(n, cfg.d, rng);
        const double oriented = static_cast<double>(g.oriented_edge_count());
        const double total = static_cast<double>(n) + lambda_max * oriented;
        std::size_t alive = 0;
        for (std::size_t l = 0; l < lanes; ++l) {
          on[l].assign(n, 0);
          for (Vertex v : initial) on[l][v] = 1;
          count[l] = initial.size();
          if (count[l] == 0) {
            taus[i][l] = 0.0;
          } else {
            ++alive;
          }
        }
        double t = 0.0;
        while (alive > 0) {
          t += exponential(rng, total);
          if (t > horizon) break;
          if (uniform01(rng) * total < static_cast<double>(n)) {
            auto v = static_cast<Vertex>(fast_index(rng, n));
            for (std::size_t l = 0; l < lanes; ++l) {
              if (count[l] > 0 && on[l][v]) {
                on[l][v] = 0;
                if (--count[l] == 0) {
                  taus[i][l] = t;
                  --alive;
                }
              }
            }
          } else {
            auto oe = OrientedEdge::from_index(
                static_cast<std::uint32_t>(fast_index(rng, g.oriented_edge_count())));
            const double cut = uniform01(rng) * lambda_max;
            const Vertex a = g.v0(oe);
            const Vertex b = g.v1(oe);
            // Lanes are sorted by lambda; the mark is kept by lambda_l > cut.
            for (std::size_t l = lanes; l-- > 0 && lambdas[l] > cut;) {
              if (count[l] > 0 && on[l][a] && !on[l][b]) {
                on[l][b] = 1;
                ++count[l];
              }
            }
          }
        }
      }
    });
    for (std::size_t l = 0; l < lanes; ++l) {
      ScanCell cell;
      cell.n = n;
      cell.lambda = lambdas[l];
      cell.replicas = cfg.replicas;
      std::vector<double> col;
      std::size_t censored = 0;
      for (const auto& row : taus) {
        col.push_back(row[l]);
        censored += std::isinf(row[l]);
      }
      cell.median_tau = stats::median(col);
      cell.censored_fraction = static_cast<double>(censored) / static_cast<double>(col.size());
      res.cells.push_back(cell);
    }
    res.taus.push_back(std::move(taus));
  }
  return res;
}

IterationReport supercritical_iteration(const ExperimentConfig& cfg, std::size_t n,
                                        double lambda) {
  validate(cfg);
  if ((n * (cfg.d + 1)) % 2 != 0) throw InputError("n(d+1) must be even");
  IterationReport rep;
  rep.n = n;
  rep.d = cfg.d;
  rep.lambda = lambda;
  rep.epsilon = cfg.epsilon;
  rep.k = cfg.k;
  rep.ell = cfg.ell;
  rep.r = cfg.r;
  rep.R = cfg.R;
  rep.alpha = cfg.alpha;
  rep.time = cfg.R * static_cast<double>(cfg.ell);
  rep.replicas = cfg.replicas;
  const double nn = static_cast<double>(n);
  rep.target = static_cast<std::size_t>(std::ceil(cfg.k * cfg.epsilon * nn - 1e-9));
  rep.wanted = static_cast<std::size_t>(std::floor(cfg.epsilon * nn + 1e-9));
  rep.vacuous = rep.target > n;
  rep.w_size = std::min(rep.target, n);

  Rng graph_rng(derive_seed(cfg.seed, {n, 0}));
  const MultiGraph g = sample_regular(n, cfg.d, graph_rng);
  VertexSet W(rep.w_size);
  for (Vertex v = 0; v < W.size(); ++v) W[v] = v;

  auto found = posthoc_regenerative(g, W, cfg.d, cfg.ell, cfg.r, rep.wanted);
  rep.extracted = found.size();
  rep.extraction_complete = rep.extracted == rep.wanted;
  std::vector<Witness> ws;
  VertexSet seeds;
  std::vector<std::uint8_t> mask(g.edge_count(), 0);
  std::vector<std::int64_t> owner(n, -1);
  for (std::size_t i = 0; i < found.size(); ++i) {
    ws.push_back(found[i].witness);
    seeds.push_back(found[i].witness.to_original[found[i].witness.root]);
    for (EdgeId e : found[i].edges) mask[e] = 1;
    for (Vertex v : found[i].witness.to_original) owner[v] = static_cast<std::int64_t>(i);
  }
  if (!verify_regenerative(g, seeds, ws, cfg.d, cfg.ell, cfg.r)) {
    throw InvariantViolation("post-hoc extraction produced an invalid regenerative family");
  }
  std::vector<Vertex> sorted_seeds = seeds;
  std::sort(sorted_seeds.begin(), sorted_seeds.end());
  const double grown_threshold = std::pow(cfg.alpha, static_cast<double>(cfg.ell));

  struct Row {
    std::size_t xi = 0;
    std::size_t uni = 0;
    std::size_t grown = 0;
  };
  std::vector<Row> rows(cfg.replicas);
  run_blocks(cfg.replicas, cfg.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> per(found.size());
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(cfg.seed, {n, 1, i}));
      HarrisSystem h = sample_harris(g, lambda, rep.time, rng);
      SweepResult xi = harris_sweep(g, h, W, 0.0, rep.time);
      SweepResult zeta = harris_sweep(g, h, sorted_seeds, 0.0, rep.time, mask);
      if (!std::includes(xi.infected.begin(), xi.infected.end(), zeta.infected.begin(),
                         zeta.infected.end())) {
        throw InvariantViolation("xi^W does not contain the union of the tree processes");
      }
      std::fill(per.begin(), per.end(), 0);
      for (Vertex v : zeta.infected) {
        if (owner[v] < 0) throw InvariantViolation("tree process left its witness");
        ++per[static_cast<std::size_t>(owner[v])];
      }
      rows[i].xi = xi.infected.size();
      rows[i].uni = zeta.infected.size();
      rows[i].grown = static_cast<std::size_t>(std::count_if(
          per.begin(), per.end(),
          [&](std::size_t c) { return static_cast<double>(c) >= grown_threshold; }));
    }
  });
  double sx = 0.0;
  double su = 0.0;
  double sg = 0.0;
  for (const Row& r : rows) {
    rep.hits += !rep.vacuous && r.xi >= rep.target;
    rep.union_hits += !rep.vacuous && r.uni >= rep.target;
    sx += static_cast<double>(r.xi);
    su += static_cast<double>(r.uni);
    sg += static_cast<double>(r.grown);
  }
  const double reps = static_cast<double>(cfg.replicas);
  rep.frequency = static_cast<double>(rep.hits) / reps;
  auto ci = stats::wilson(rep.hits, cfg.replicas);
  rep.wilson_low = ci.lo;
  rep.wilson_high = ci.hi;
  rep.mean_xi = sx / reps;
  rep.mean_union = su / reps;
  rep.mean_grown = sg / reps;
  rep.reliable = !rep.vacuous && rep.extraction_complete;
  return rep;
}

DecayResult subcritical_decay(std::size_t d, double lambda, std::size_t ell_trunc,
                              const std::vector<double>& t_grid, std::size_t replicas,
                              std::uint64_t seed, unsigned workers) {
  if (d < 2) throw InputError("subcritical_decay requires d >= 2");
  if (!(lambda >= 0.0) || !(lambda < 1.0 / static_cast<double>(d + 1))) {
    throw InputError("subcritical_decay requires 0 <= lambda < 1/(d+1)");
  }
  if (t_grid.empty() || !ascending(t_grid) || t_grid.front() < 0.0) {
    throw InputError("t_grid must be non-empty, ascending and >= 0");
  }
  if (replicas == 0) throw InputError("replicas must be >= 1");
  const RootedGraph tree = build_hat_tree(d, ell_trunc);
  std::vector<std::uint8_t> boundary(tree.graph.vertex_count(), 0);
  {
    auto depth = distances_from(tree.graph, tree.root);
    for (Vertex v = 0; v < boundary.size(); ++v) {
      boundary[v] = depth[v] == static_cast<std::int64_t>(ell_trunc);
    }
  }
  const double horizon = t_grid.back();
  std::vector<std::vector<std::size_t>> counts(replicas);
  std::vector<std::uint8_t> touched(replicas, 0);
  run_blocks(replicas, workers, [&](std::size_t begin, std::size_t end) {
    ContactSimulator sim(tree.graph);
    SimulationOptions so;
    so.horizon = horizon;
    so.sample_times = t_grid;
    so.boundary = boundary;
    const Vertex root = tree.root;
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(seed, {i}));
      Trajectory tr = sim.run(lambda, std::span<const Vertex>(&root, 1), rng, so);
      counts[i] = std::move(tr.samples);
      touched[i] = tr.touched_boundary;
    }
  });
  DecayResult res;
  res.d = d;
  res.lambda = lambda;
  res.ell_trunc = ell_trunc;
  res.replicas = replicas;
  res.t_grid = t_grid;
  res.envelope = 1.0 - static_cast<double>(d + 1) * lambda;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    std::vector<double> col(replicas);
    for (std::size_t i = 0; i < replicas; ++i) col[i] = static_cast<double>(counts[i][k]);
    auto ms = stats::mean_se(col);
    res.mean.push_back(ms.mean);
    res.se.push_back(ms.se);
    if (ms.mean > 0.0) {
      x.push_back(t_grid[k]);
      y.push_back(std::log(ms.mean));
      // Delta method: var(log m) ~ (se / m)^2. A point with zero spread
      // (t = 0) gets the weight of a single-sample relative error.
      const double rel = ms.se > 0.0 ? ms.se / ms.mean : 1.0 / static_cast<double>(replicas);
      w.push_back(1.0 / (rel * rel));
    }
  }
  res.fit_points = x.size();
  if (x.size() >= 2) {
    auto fit = stats::fit_line(x, y, w);
    res.rate = -fit.slope;
    res.rate_se = fit.slope_se;
  }
  res.contamination = static_cast<double>(std::count(touched.begin(), touched.end(), 1)) /
                      static_cast<double>(replicas);
  res.reliable = res.contamination <= 0.01;
  return res;
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records,
                       const std::vector<double>& sample_times) {
  out << "n,lambda,replica,seed,tau,censored,peak_fraction";
  for (double t : sample_times) out << ",frac_t" << format_number(t);
  out << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << format_number(r.lambda) << ',' << r.replica << ',' << r.seed << ','
        << (r.tau ? format_number(*r.tau) : std::string("")) << ',' << (r.censored ? 1 : 0)
        << ',' << format_number(r.peak_fraction);
    for (double s : r.samples) out << ',' << format_number(s);
    out << '\n';
  }
}

void write_cells_csv(std::ostream& out, const std::vector<ScalingCell>& cells) {
  out << "n,lambda,horizon,replicas,median_tau,mean_tau,censored_fraction,median_over_log_n\n";
  for (const auto& c : cells) {
    out << c.n << ',' << format_number(c.lambda) << ',' << format_number(c.horizon) << ','
        << c.replicas << ',' << format_number(c.median_tau) << ',' << format_number(c.mean_tau)
        << ',' << format_number(c.censored_fraction) << ','
        << format_number(c.median_over_log_n) << '\n';
  }
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << "n,lambda,replicas,median_tau,censored_fraction\n";
  for (const auto& c : scan.cells) {
    out << c.n << ',' << format_number(c.lambda) << ',' << c.replicas << ','
        << format_number(c.median_tau) << ',' << format_number(c.censored_fraction) << '\n';
  }
}

void write_decay_csv(std::ostream& out, const DecayResult& decay, bool header) {
  if (header) out << "lambda,t,mean,se\n";
  for (std::size_t k = 0; k < decay.t_grid.size(); ++k) {
    out << format_number(decay.lambda) << ',' << format_number(decay.t_grid[k]) << ',' << format_number(decay.mean[k]) << ','
        << format_number(decay.se[k]) << '\n';
  }
}

namespace {

// JSON has no infinity; censored medians are written as null.
nlohmann::json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

nlohmann::json to_json(const ScalingResult& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"n", c.n},
                     {"lambda", c.lambda},
                     {"horizon", c.horizon},
                     {"replicas", c.replicas},
                     {"median_tau", num(c.median_tau)},
                     {"mean_tau", c.mean_tau},
                     {"censored_fraction", c.censored_fraction},
                     {"median_over_log_n", num(c.median_over_log_n)}});
  }
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : r.fits) {
    fits.push_back({{"lambda", f.lambda},
                    {"fitted", f.fitted},
                    {"slope", f.slope},
                    {"intercept", f.intercept},
                    {"slope_se", f.slope_se},
                    {"ratio_spread", num(f.ratio_spread)}});
  }
  return {{"cells", cells}, {"fits", fits}};
}

nlohmann::json to_json(const ScanResult& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"n", c.n},
                     {"lambda", c.lambda},
                     {"replicas", c.replicas},
                     {"median_tau", num(c.median_tau)},
                     {"censored_fraction", c.censored_fraction}});
  }
  return {{"cells", cells}};
}

nlohmann::json to_json(const IterationReport& r) {
  return {{"n", r.n},
          {"d", r.d},
          {"lambda", r.lambda},
          {"epsilon", r.epsilon},
          {"k", r.k},
          {"ell", r.ell},
          {"r", r.r},
          {"R", r.R},
          {"alpha", r.alpha},
          {"time", r.time},
          {"w_size", r.w_size},
          {"target", r.target},
          {"wanted", r.wanted},
          {"extracted", r.extracted},
          {"extraction_complete", r.extraction_complete},
          {"vacuous", r.vacuous},
          {"replicas", r.replicas},
          {"hits", r.hits},
          {"union_hits", r.union_hits},
          {"frequency", r.frequency},
          {"wilson95", {r.wilson_low, r.wilson_high}},
          {"mean_xi", r.mean_xi},
          {"mean_union", r.mean_union},
          {"mean_grown", r.mean_grown},
          {"reliable", r.reliable}};
}

nlohmann::json to_json(const DecayResult& r) {
  return {{"d", r.d},
          {"lambda", r.lambda},
          {"ell_trunc", r.ell_trunc},
          {"replicas", r.replicas},
          {"t_grid", r.t_grid},
          {"mean", r.mean},
          {"se", r.se},
          {"rate", r.rate},
          {"rate_se", r.rate_se},
          {"fit_points", r.fit_points},
          {"contamination", r.contamination},
          {"envelope", r.envelope},
          {"reliable", r.reliable}};
}

}  // namespace cpsim
