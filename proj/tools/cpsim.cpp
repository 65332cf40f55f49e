// Command-line front end: graph generation, simulation, cover and domination
// reports, Pass statistics, tail bounds and the experiment harness.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpsim/bounds.hpp"
#include "cpsim/configmodel.hpp"
#include "cpsim/cover.hpp"
#include "cpsim/cp.hpp"
#include "cpsim/error.hpp"
#include "cpsim/experiments.hpp"
#include "cpsim/explore.hpp"
#include "cpsim/graph.hpp"
#include "cpsim/graph_io.hpp"
#include "cpsim/stats.hpp"

using namespace cpsim;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kUnreliable = 2;

// --init all | vertex:k | <file of vertex ids>
VertexSet parse_init(const std::string& rule, const MultiGraph& g) {
  VertexSet out;
  if (rule == "all") {
    for (Vertex v = 0; v < g.vertex_count(); ++v) out.push_back(v);
    return out;
  }
  if (rule.rfind("vertex:", 0) == 0) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(rule.substr(7), &pos);
    } catch (const std::exception&) {
      throw InputError("bad --init " + rule);
    }
    if (pos != rule.size() - 7 || v >= g.vertex_count()) throw InputError("bad --init " + rule);
    out.push_back(static_cast<Vertex>(v));
    return out;
  }
  std::ifstream in(rule);
  if (!in) throw InputError("--init: cannot open " + rule);
  long long v = 0;
  while (in >> v) {
    if (v < 0 || static_cast<std::size_t>(v) >= g.vertex_count()) {
      throw InputError("--init: vertex out of range in " + rule);
    }
    out.push_back(static_cast<Vertex>(v));
  }
  if (!in.eof()) throw InputError("--init: malformed vertex list in " + rule);
  return out;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

json collisions_json(const PassOutcome& p) {
  json arr = json::array();
  for (const Collision& c : p.collisions) {
    arr.push_back({{"kind", c.kind == CollisionKind::kShort ? "short" : "long"},
                   {"iteration", c.iteration},
                   {"vertex", c.at}});
  }
  return arr;
}

struct ExperimentFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

ExperimentConfig experiment_config(const ExperimentFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  validate(cfg);
  std::filesystem::create_directories(f.out_dir);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact process simulation and random regular graph toolkit"};
  app.require_subcommand(1);
  int status = kOk;

  // gen-graph
  auto* gen = app.add_subcommand("gen-graph", "Sample a (d+1)-regular configuration-model multigraph");
  std::size_t gen_n = 0;
  std::size_t gen_d = 3;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Vertex count")->required();
  gen->add_option("--d", gen_d, "Degree minus one")->required();
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");
  gen->callback([&] {
    Rng rng(gen_seed);
    MultiGraph g = sample_regular(gen_n, gen_d, rng);
    if (gen_out.empty()) {
      write_graph(std::cout, g);
    } else {
      write_graph(std::filesystem::path(gen_out), g);
    }
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the contact process and record extinction times");
  std::string sim_graph;
  double sim_lambda = 1.0;
  std::string sim_init = "all";
  std::size_t sim_replicas = 1;
  double sim_horizon = 100.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  unsigned sim_workers = 0;
  sim->add_option("--graph", sim_graph, "Graph file")->required();
  sim->add_option("--lambda", sim_lambda, "Transmission rate")->required();
  sim->add_option("--init", sim_init, "all | vertex:k | file of vertex ids");
  sim->add_option("--replicas", sim_replicas, "Replica count");
  sim->add_option("--horizon", sim_horizon, "Censoring horizon");
  sim->add_option("--seed", sim_seed, "Master seed");
  sim->add_option("--out", sim_out, "CSV output (stdout when omitted)");
  sim->add_option("--workers", sim_workers, "Worker threads (0 = all cores)");
  sim->callback([&] {
    MultiGraph g = read_graph(std::filesystem::path(sim_graph));
    VertexSet init = parse_init(sim_init, g);
    auto samples =
        extinction_samples(g, sim_lambda, init, sim_replicas, sim_horizon, sim_seed, sim_workers);
    std::ostringstream csv;
    csv << "replica,tau,censored,peak,kappa\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      csv << i << ',' << (s.tau ? format_number(*s.tau) : std::string()) << ','
          << (s.censored ? 1 : 0) << ',' << s.peak << ','
          << (s.kappa ? std::to_string(*s.kappa) : std::string()) << '\n';
    }
    if (sim_out.empty()) {
      std::cout << csv.str();
    } else {
      open_out(sim_out) << csv.str();
    }
  });

  // cover-check
  auto* cov = app.add_subcommand("cover-check", "Build a truncated universal cover and check it");
  std::string cov_graph;
  Vertex cov_base = 0;
  std::size_t cov_depth = 5;
  double cov_lambda = 1.0;
  std::size_t cov_replicas = 0;
  std::vector<double> cov_t{1.0};
  std::uint64_t cov_seed = 1;
  std::string cov_out;
  cov->add_option("--graph", cov_graph, "Graph file")->required();
  cov->add_option("--base", cov_base, "Base vertex");
  cov->add_option("--depth", cov_depth, "Truncation depth");
  cov->add_option("--lambda", cov_lambda, "Rate for the projection comparison");
  cov->add_option("--replicas", cov_replicas, "Replicas per side (0 skips the comparison)");
  cov->add_option("--t-grid", cov_t, "Times for P[extinct by t]")->delimiter(',');
  cov->add_option("--seed", cov_seed, "Master seed");
  cov->add_option("--out", cov_out, "JSON output (stdout when omitted)");
  cov->callback([&] {
    MultiGraph g = read_graph(std::filesystem::path(cov_graph));
    CoverTree c(g, cov_base, cov_depth);
    std::string problem = check_cover(c, g);
    bool loop_free = true;
    for (const Edge& e : g.edges()) loop_free &= !e.is_loop();
    json rep{{"depth", cov_depth},
             {"base", cov_base},
             {"nodes", c.size()},
             {"loop_free", loop_free},
             {"ok", problem.empty()},
             {"problem", problem}};
    if (cov_replicas > 0) {
      const double horizon = *std::max_element(cov_t.begin(), cov_t.end());
      ConstrainedSimulator csim(c);
      ContactSimulator direct(g);
      SimulationOptions so;
      so.horizon = horizon;
      const CoverNode root = 0;
      const Vertex base = cov_base;
      std::vector<double> cover_tau;
      std::vector<double> graph_tau;
      std::size_t touched = 0;
      for (std::size_t i = 0; i < cov_replicas; ++i) {
        Rng r1(derive_seed(cov_seed, {0, i}));
        auto tr = csim.run(cov_lambda, std::span<const CoverNode>(&root, 1), r1, horizon);
        cover_tau.push_back(tr.extinction_time.value_or(kForever));
        touched += tr.touched_boundary;
        Rng r2(derive_seed(cov_seed, {1, i}));
        auto tg = direct.run(cov_lambda, std::span<const Vertex>(&base, 1), r2, so);
        graph_tau.push_back(tg.extinction_time.value_or(kForever));
      }
      json pts = json::array();
      for (double t : cov_t) {
        std::size_t a = 0;
        std::size_t b = 0;
        for (double x : cover_tau) a += x <= t;
        for (double x : graph_tau) b += x <= t;
        pts.push_back({{"t", t},
                       {"cover_extinct", static_cast<double>(a) / cov_replicas},
                       {"graph_extinct", static_cast<double>(b) / cov_replicas},
                       {"z", stats::two_proportion_z(a, cov_replicas, b, cov_replicas)}});
      }
      rep["projection"] = {{"lambda", cov_lambda},
                           {"replicas", cov_replicas},
                           {"contamination", static_cast<double>(touched) / cov_replicas},
                           {"points", pts}};
    }
    write_json(cov_out, rep);
    if (!problem.empty() && loop_free) status = kUnreliable;
  });

  // domination-check
  auto* dom = app.add_subcommand("domination-check",
                                 "Compare extinction and reach tails with the regular tree");
  std::string dom_graph;
  double dom_lambda = 0.2;
  std::string dom_init = "all";
  DominationOptions dom_opts;
  std::size_t dom_replicas = 10000;
  std::vector<double> dom_t{0.5, 1, 2, 4};
  std::optional<Vertex> dom_kappa;
  std::string dom_out;
  dom->add_option("--graph", dom_graph, "Graph file")->required();
  dom->add_option("--lambda", dom_lambda, "Transmission rate");
  dom->add_option("--init", dom_init, "all | vertex:k | file of vertex ids");
  dom->add_option("--d", dom_opts.d, "Tree branching number (degree d+1)");
  dom->add_option("--depth", dom_opts.depth, "Tree truncation depth");
  dom->add_option("--placement-radius", dom_opts.placement_radius,
                  "Radius for the tree-side initial set");
  dom->add_option("--replicas", dom_replicas, "Replicas per side");
  dom->add_option("--t-grid", dom_t, "Comparison times")->delimiter(',');
  dom->add_option("--kappa-vertex", dom_kappa, "Also compare reach tails from this vertex");
  dom->add_option("--seed", dom_opts.seed, "Master seed");
  dom->add_option("--workers", dom_opts.workers, "Worker threads");
  dom->add_option("--out", dom_out, "JSON output (stdout when omitted)");
  dom->callback([&] {
    MultiGraph g = read_graph(std::filesystem::path(dom_graph));
    VertexSet init = parse_init(dom_init, g);
    std::sort(dom_t.begin(), dom_t.end());
    DominationReport r = domination_check(g, dom_lambda, init, dom_replicas, dom_t, dom_opts);
    json pts = json::array();
    for (const auto& p : r.points) {
      pts.push_back({{"t", p.t},
                     {"graph_survival", p.graph_survival},
                     {"tree_survival", p.tree_survival},
                     {"se", p.se},
                     {"z", p.z},
                     {"violation", p.violation}});
    }
    json rep{{"tau", {{"d", r.d},
                      {"depth", r.depth},
                      {"placement_radius", r.placement_radius},
                      {"lambda", r.lambda},
                      {"replicas", r.replicas},
                      {"initial_size", r.initial_size},
                      {"tree_initial", r.tree_initial},
                      {"points", pts},
                      {"contamination", r.contamination},
                      {"any_violation", r.any_violation},
                      {"caveat", r.caveat}}}};
    bool flagged = r.any_violation || r.contamination > 0.01;
    if (dom_kappa) {
      KappaDominationReport k = kappa_domination_check(g, dom_lambda, *dom_kappa, dom_replicas,
                                                       dom_opts);
      json kp = json::array();
      for (const auto& p : k.points) {
        kp.push_back({{"k", p.k},
                      {"graph_tail", p.graph_tail},
                      {"tree_tail", p.tree_tail},
                      {"se", p.se},
                      {"z", p.z},
                      {"violation", p.violation}});
      }
      rep["kappa"] = {{"depth", k.depth},
                      {"graph_max_kappa", k.graph_max_kappa},
                      {"points", kp},
                      {"contamination", k.contamination},
                      {"graph_censored", k.graph_censored},
                      {"any_violation", k.any_violation},
                      {"caveat", k.caveat}};
      flagged |= k.any_violation || k.contamination > 0.01;
    }
    write_json(dom_out, rep);
    if (flagged) status = kUnreliable;
  });

  // pass-stats
  auto* pass = app.add_subcommand("pass-stats", "Run the Pass construction and report statistics");
  std::size_t ps_n = 1000;
  std::size_t ps_d = 3;
  std::size_t ps_r = 3;
  std::size_t ps_ell = 3;
  std::size_t ps_seeds = 20;
  std::size_t ps_target = 0;
  std::uint64_t ps_seed = 1;
  std::string ps_out;
  pass->add_option("--n", ps_n, "Vertex count");
  pass->add_option("--d", ps_d, "Degree minus one");
  pass->add_option("--r", ps_r, "Neighbourhood radius");
  pass->add_option("--ell", ps_ell, "Tree depth");
  pass->add_option("--seeds", ps_seeds, "Seed count |W| (vertices 0..|W|-1)");
  pass->add_option("--target", ps_target, "Successes wanted (0 = one per prepared seed)");
  pass->add_option("--seed", ps_seed, "Random seed");
  pass->add_option("--out", ps_out, "JSON output (stdout when omitted)");
  pass->callback([&] {
    if (ps_seeds > ps_n) throw InputError("--seeds exceeds --n");
    Rng rng(ps_seed);
    SemiGraph s = fresh_semigraph(ps_n, ps_d);
    VertexSet W(ps_seeds);
    for (Vertex v = 0; v < W.size(); ++v) W[v] = v;
    PreparedReport prep = build_neighbourhoods_first(s, W, ps_r, rng);
    VertexSet used = prep.prepared ? W : prepared_subset(s.to_multigraph(), W, ps_r);
    const std::size_t target = ps_target == 0 ? used.size() : ps_target;
    GoodExtraction ex =
        extract_good_subset(s, used, ps_d, ps_ell, ps_r, target, rng, W.size());
    const ExploreConstants c = constants(ps_d, ps_r, std::max<std::size_t>(ps_ell, 1));
    json passes = json::array();
    std::vector<Witness> good;
    VertexSet good_seeds;
    for (const PassOutcome& p : ex.passes) {
      bool favourable = p.witness && verify_favourable(*p.witness, ps_d, ps_ell, ps_r);
      passes.push_back({{"seed", p.seed},
                        {"bud", p.bud},
                        {"success", p.success},
                        {"iterations", p.iterations},
                        {"collisions", collisions_json(p)},
                        {"max_frontier", p.max_frontier},
                        {"buds_quieted", p.buds_quieted},
                        {"fresh_after", p.fresh_after},
                        {"favourable", favourable}});
      if (p.witness) {
        good.push_back(*p.witness);
        good_seeds.push_back(p.seed);
      }
    }
    MultiGraph full = complete_matching(s, rng);
    bool regenerative = false;
    if (ps_ell >= 1) {
      // Witness vertex ids are global, so they remain valid in the full graph.
      auto regen = good_to_regenerative(good, ps_d, ps_ell, ps_r);
      regenerative = verify_regenerative(full, good_seeds, regen, ps_d, ps_ell - 1, ps_r + 1);
    }
    json rep{{"n", ps_n},
             {"d", ps_d},
             {"r", ps_r},
             {"ell", ps_ell},
             {"seeds", ps_seeds},
             {"constants",
              {{"c_ell", c.c_ell},
               {"c_bar_r", c.c_bar_r},
               {"c_r_ell", c.c_r_ell},
               {"gamma_r", c.gamma_r}}},
             {"prepared", prep.prepared},
             {"overlapping_pairs", prep.overlapping_pairs},
             {"seeds_used", used},
             {"passes", passes},
             {"successes", ex.good.size()},
             {"short_collisions", ex.short_collisions},
             {"long_collisions", ex.long_collisions},
             {"double_collisions", ex.double_collisions},
             {"min_fresh", ex.min_fresh},
             {"fresh_floor", ex.fresh_floor},
             {"bookkeeping_ok", ex.bookkeeping_ok},
             {"good_target", target},
             {"good_target_met", ex.target_met},
             {"regenerative_verified", regenerative}};
    write_json(ps_out, rep);
    if (!prep.prepared) status = kUnreliable;
  });

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Binomial large-deviation bound against the exact tail");
  std::size_t b_m = 30;
  double b_p = 0.1;
  double b_delta = 0.2;
  bnd->add_option("--m", b_m, "Trials")->required();
  bnd->add_option("--p", b_p, "Success probability")->required();
  bnd->add_option("--delta", b_delta, "Deviation")->required();
  bnd->callback([&] {
    TailBoundQuery q{b_m, b_p, b_delta};
    const std::size_t k = tail_threshold(b_m, b_p, b_delta);
    std::printf("psi        %.12g\n", psi(b_p, b_delta));
    std::printf("threshold  %zu\n", k);
    std::printf("bound      %.12g\n", binomial_tail_bound(q));
    std::printf("exact      %.12g\n", exact_binomial_tail(b_m, b_p, k));
  });

  // experiments
  auto add_experiment = [&](const std::string& name, const std::string& help,
                            ExperimentFlags& flags) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("--config", flags.config, "JSON config file");
    sc->add_option("--seed", flags.seed, "Override the master seed");
    sc->add_option("--out-dir", flags.out_dir, "Output directory");
    return sc;
  };
  ExperimentFlags scan_flags;
  add_experiment("scan-lambda", "Censoring fraction and median extinction time per lambda",
                 scan_flags)
      ->callback([&] {
        ExperimentConfig cfg = experiment_config(scan_flags);
        ScanResult r = lambda_scan(cfg);
        std::filesystem::path dir(scan_flags.out_dir);
        auto csv = open_out(dir / "scan_lambda.csv");
        write_scan_csv(csv, r);
        write_json((dir / "scan_lambda.json").string(),
                   {{"config", config_to_json(cfg)}, {"result", to_json(r)}});
      });
  ExperimentFlags scaling_flags;
  add_experiment("extinction-scaling", "Extinction time against n on random regular graphs",
                 scaling_flags)
      ->callback([&] {
        ExperimentConfig cfg = experiment_config(scaling_flags);
        ScalingResult r = extinction_scaling(cfg);
        std::filesystem::path dir(scaling_flags.out_dir);
        auto rec = open_out(dir / "extinction_scaling_records.csv");
        write_records_csv(rec, r.records, cfg.sample_times);
        auto cells = open_out(dir / "extinction_scaling_cells.csv");
        write_cells_csv(cells, r.cells);
        write_json((dir / "extinction_scaling.json").string(),
                   {{"config", config_to_json(cfg)}, {"result", to_json(r)}});
      });
  ExperimentFlags iter_flags;
  add_experiment("supercritical-iteration",
                 "Growth from a regenerative subset under shared marks", iter_flags)
      ->callback([&] {
        ExperimentConfig cfg = experiment_config(iter_flags);
        json reports = json::array();
        for (std::size_t n : cfg.ns) {
          for (double lambda : cfg.lambdas) {
            IterationReport r = supercritical_iteration(cfg, n, lambda);
            if (!r.reliable) status = kUnreliable;
            reports.push_back(to_json(r));
          }
        }
        write_json((std::filesystem::path(iter_flags.out_dir) / "supercritical_iteration.json")
                       .string(),
                   {{"config", config_to_json(cfg)}, {"reports", reports}});
      });
  ExperimentFlags decay_flags;
  add_experiment("subcritical-decay", "Decay of the mean infected count on a truncated tree",
                 decay_flags)
      ->callback([&] {
        ExperimentConfig cfg = experiment_config(decay_flags);
        std::filesystem::path dir(decay_flags.out_dir);
        auto csv = open_out(dir / "subcritical_decay.csv");
        json reports = json::array();
        bool header = true;
        for (double lambda : cfg.lambdas) {
          DecayResult r = subcritical_decay(cfg.d, lambda, cfg.ell_trunc, cfg.t_grid,
                                            cfg.replicas, cfg.seed, cfg.workers);
          write_decay_csv(csv, r, header);
          header = false;
          if (!r.reliable) status = kUnreliable;
          reports.push_back(to_json(r));
        }
        write_json((dir / "subcritical_decay.json").string(),
                   {{"config", config_to_json(cfg)}, {"reports", reports}});
      });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return status;
}
