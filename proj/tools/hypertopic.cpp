#include "hypertopic/config.hpp"
#include "hypertopic/error.hpp"
#include "hypertopic/eval.hpp"
#include "hypertopic/io.hpp"
#include "hypertopic/rank_select.hpp"
#include "hypertopic/solver.hpp"
#include "hypertopic/synthgen.hpp"

#include <CLI11.hpp>

#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ht = hypertopic;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_path;
  std::string seed;
  int threads = 1;
  bool quiet = false;
};

// Flags that map onto configuration keys. A flag given on the command line
// overrides the same key from --config.
class KeyedFlags {
 public:
  void option(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
    auto& slot = slots_.emplace_back(Slot{key, {}, nullptr});
    slot.opt = app->add_option(name, slot.value, help);
  }
  void flag(CLI::App* app, const std::string& name, const std::string& key, const std::string& value,
            const std::string& help) {
    auto& slot = slots_.emplace_back(Slot{key, value, nullptr});
    slot.opt = app->add_flag(name, help);
  }
  void apply(ht::ConfigMap& map) const {
    for (const auto& s : slots_)
      if (s.opt->count() > 0) map.set(s.key, s.value);
  }

 private:
  struct Slot {
    std::string key;
    std::string value;
    CLI::Option* opt;
  };
  std::deque<Slot> slots_;
};

ht::ConfigMap build_map(const Globals& g, const KeyedFlags& flags, const std::set<std::string>& known) {
  ht::ConfigMap map = g.config_path.empty() ? ht::ConfigMap{} : ht::ConfigMap::load(g.config_path);
  flags.apply(map);
  if (!g.seed.empty()) map.set("seed", g.seed);
  map.check_keys(known);
  return map;
}

std::string hash_of(const std::string& command, const ht::ConfigMap& map) {
  ht::ConfigMap hashed;
  for (const auto& [k, v] : map.values())
    if (k != "threads") hashed.set(k, v);
  return ht::hex64(ht::fnv1a(command + "\n" + hashed.canonical()));
}

std::string provenance(const std::string& hash) {
  return std::string("# hypertopic ") + ht::kVersion + " config_hash=" + hash;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ht::Error(ht::ErrorKind::ConfigInvalid, "cannot write " + path);
  return out;
}

void add_bounds(CLI::App* app, KeyedFlags& flags) {
  flags.option(app, "--lp", "lp", "lower occurrence bound");
  flags.option(app, "--up", "up", "upper occurrence bound");
  flags.option(app, "--la", "la", "lower repetition bound");
  flags.option(app, "--ua", "ua", "upper repetition bound");
}

void add_solver_flags(CLI::App* app, KeyedFlags& flags) {
  flags.option(app, "-K,--K", "K", "number of topics");
  flags.option(app, "--tau-p", "tau_p", "occurrence penalty weight");
  flags.option(app, "--tau-a", "tau_a", "repetition penalty weight");
  flags.option(app, "--eta0", "eta0", "base step size");
  flags.option(app, "--max-iters", "max_iters", "iteration budget");
  flags.option(app, "--tolerance", "tolerance", "early-stopping threshold on delta");
  flags.option(app, "--init", "init_mode", "spectral | random");
  flags.option(app, "--step-mode", "step_mode", "kappa | fixed");
  flags.option(app, "--penalty-gradient", "penalty_gradient", "as_printed | exact");
  flags.flag(app, "--no-backtracking", "backtracking", "false", "disable step halving");
  flags.flag(app, "--strict-alg1", "backtracking", "false", "plain fixed-step iteration (same as --no-backtracking)");
  flags.flag(app, "--no-penalty-scaling", "scale_penalty", "false", "use tau as given");
}

void add_synth_flags(CLI::App* app, KeyedFlags& flags) {
  flags.option(app, "--T", "T", "number of time slices");
  flags.option(app, "--n-t", "n_t", "documents per slice");
  flags.option(app, "--p", "p", "vocabulary size");
  flags.option(app, "--regime", "regime", "aligned | misaligned");
  flags.option(app, "--sigma", "sigma", "temporal drift");
  flags.option(app, "--design", "design", "theta0 | theta1");
  flags.option(app, "--rho", "rho", "repetition scaling");
  flags.option(app, "--doc-concentration", "doc_concentration", "Dirichlet parameter of W rows");
  flags.option(app, "--word-concentration", "word_concentration", "Dirichlet parameter of base profiles");
  flags.option(app, "--rho-min", "rho_min", "lower rho guard");
  flags.option(app, "--rho-max", "rho_max", "upper rho guard");
  flags.flag(app, "--heterogeneous-rho", "heterogeneous_rho", "true", "draw rho per document");
  flags.flag(app, "--allow-rho-outside-guards", "allow_rho_outside_guards", "true", "skip rho guard check");
}

void add_rank_flags(CLI::App* app, KeyedFlags& flags) {
  flags.option(app, "--delta", "delta", "failure probability of the threshold");
  flags.option(app, "--alpha", "alpha", "drift exponent");
  flags.option(app, "--k-cap", "k_cap", "number of singular values computed");
}

ht::RankSelectConfig rank_from(const ht::ConfigMap& map) {
  auto cfg = ht::rank_config_from(map);
  cfg.validate();
  return cfg;
}

// Splits a ranked-option map into the solver part and the rank part.
ht::ConfigMap subset(const ht::ConfigMap& map, const std::set<std::string>& keys) {
  ht::ConfigMap out;
  for (const auto& [k, v] : map.values())
    if (keys.contains(k)) out.set(k, v);
  return out;
}

std::set<std::string> merged(std::initializer_list<const std::set<std::string>*> sets) {
  std::set<std::string> out;
  for (const auto* s : sets) out.insert(s->begin(), s->end());
  return out;
}

int run_fit(const Globals& g, const KeyedFlags& flags, const std::string& corpus_path, const std::string& out_path,
            std::string trace_path, bool auto_k) {
  const ht::ConfigMap map = build_map(g, flags, merged({&ht::solver_keys(), &ht::rank_keys()}));
  ht::SolverConfig cfg = ht::solver_config_from(subset(map, ht::solver_keys()));
  cfg.threads = g.threads;
  const ht::Corpus corpus = ht::read_corpus(fs::path(corpus_path));
  const std::string hash = hash_of(auto_k ? "fit --auto-k" : "fit", map);

  ht::ModelFile model;
  if (auto_k) {
    ht::RankSelectConfig rc = rank_from(subset(map, ht::rank_keys()));
    if (!map.contains("lp")) rc.lp = cfg.bounds.lp;
    if (!map.contains("up")) rc.up = cfg.bounds.up;
    const auto est = ht::estimate_k(corpus, rc);
    // k_hat = 0 means no singular value clears the threshold; fit one topic
    // and keep the estimate on record.
    cfg.K = std::max<ht::Index>(est.k_hat, 1);
    if (est.k_hat == 0 && !g.quiet) std::cerr << "rank selection found k_hat = 0; fitting K = 1\n";
    model.meta["k_hat"] = std::to_string(est.k_hat);
    model.meta["rank_tau"] = ht::format_number(est.tau);
  } else if (cfg.K < 1) {
    throw ht::Error(ht::ErrorKind::ConfigInvalid, "K must be given (use -K or --auto-k)");
  }
  cfg.validate();

  const ht::FitResult result = ht::fit(corpus, cfg);
  const auto& iters = result.trace.iterations;
  model.params = result.params;
  model.meta["version"] = ht::kVersion;
  model.meta["config_hash"] = hash;
  model.meta["iterations"] = std::to_string(iters.size());
  model.meta["status"] = result.trace.status == ht::SolverStatus::Converged ? "converged" : "max_iters";
  model.meta["final_delta"] = iters.empty() ? "NA" : ht::format_number(iters.back().delta);
  model.meta["final_f"] = ht::format_number(iters.empty() ? result.trace.initial_objective : iters.back().objective);
  model.meta["seed"] = std::to_string(cfg.seed);
  ht::write_model(fs::path(out_path), model);

  if (trace_path.empty()) trace_path = out_path + ".trace.csv";
  auto trace = open_output(trace_path);
  trace << provenance(hash) << '\n' << "iter,f,delta,eta\n";
  trace << "0," << ht::format_number(result.trace.initial_objective) << ",NA,NA\n";
  for (const auto& r : iters)
    trace << r.iter << ',' << ht::format_number(r.objective) << ',' << ht::format_number(r.delta) << ','
          << ht::format_number(r.eta) << '\n';

  if (!g.quiet)
    std::cerr << "fit: K=" << cfg.K << " iterations=" << iters.size() << " status=" << model.meta["status"]
              << " f=" << model.meta["final_f"] << '\n';
  return 0;
}

int run_simulate(const Globals& g, const KeyedFlags& flags, const std::string& corpus_path,
                 const std::string& truth_path, const std::string& labels_path, int replicate) {
  const ht::ConfigMap map = build_map(g, flags, ht::synth_keys());
  ht::SynthConfig cfg = ht::synth_config_from(map);
  cfg.validate();
  const std::string hash = hash_of("simulate replicate=" + std::to_string(replicate), map);
  const ht::SynthInstance inst = ht::generate(cfg, replicate);

  ht::write_corpus(fs::path(corpus_path), inst.corpus);
  ht::ModelFile truth{inst.truth, {}};
  truth.meta["version"] = ht::kVersion;
  truth.meta["config_hash"] = hash;
  truth.meta["kind"] = "truth";
  truth.meta["regime"] = ht::to_string(cfg.regime);
  truth.meta["design"] = ht::to_string(cfg.design);
  truth.meta["sigma"] = ht::format_number(cfg.sigma);
  truth.meta["rho"] = ht::format_number(cfg.rho);
  truth.meta["n_t"] = std::to_string(cfg.n_t);
  truth.meta["seed"] = std::to_string(cfg.seed);
  truth.meta["replicate"] = std::to_string(replicate);
  ht::write_model(fs::path(truth_path), truth);
  if (!labels_path.empty()) ht::write_labels(fs::path(labels_path), inst.labels);

  if (!g.quiet)
    std::cerr << "simulate: " << inst.corpus.num_documents() << " documents, p=" << inst.corpus.vocab_size()
              << ", T=" << inst.corpus.num_slices() << '\n';
  return 0;
}

int run_evaluate(const Globals& g, const std::string& model_path, const std::string& truth_path,
                 const std::string& labels_path, const std::string& out_path, const std::string& cell_id) {
  if (truth_path.empty() && labels_path.empty())
    throw ht::Error(ht::ErrorKind::ParseError, "evaluate needs --truth or --labels");
  const ht::ModelFile model = ht::read_model(fs::path(model_path));

  ht::EvalReport row;
  row.cell_id = cell_id;
  row.K = std::to_string(model.params.K);
  row.T = std::to_string(model.params.num_slices());
  if (const auto it = model.meta.find("k_hat"); it != model.meta.end()) row.k_hat = std::stoll(it->second);

  std::vector<std::vector<int>> labels;
  if (!truth_path.empty()) {
    const ht::ModelFile truth = ht::read_model(fs::path(truth_path));
    auto meta = [&](const char* key) {
      const auto it = truth.meta.find(key);
      return it == truth.meta.end() ? std::string("NA") : it->second;
    };
    row.regime = meta("regime");
    row.sigma = meta("sigma");
    row.rho = meta("rho");
    row.design = meta("design");
    if (const auto r = meta("replicate"); r != "NA") row.replicate = std::stoi(r);
    row.err_w = ht::err_w(model.params, truth.params);
    for (const auto& sp : truth.params.slices) {
      std::vector<int> slice_labels;
      for (ht::Index i = 0; i < sp.W.rows(); ++i) {
        Eigen::Index k = 0;
        sp.W.row(i).maxCoeff(&k);
        slice_labels.push_back(static_cast<int>(k));
      }
      labels.push_back(std::move(slice_labels));
    }
  }
  if (!labels_path.empty()) {
    std::vector<ht::Index> sizes;
    for (const auto& sp : model.params.slices) sizes.push_back(sp.num_docs());
    labels = ht::read_labels(fs::path(labels_path), sizes);
  }
  row.weighted_f1 = ht::weighted_f1(model.params, labels);

  ht::ConfigMap hashed;
  hashed.set("cell_id", cell_id);
  hashed.set("mode", truth_path.empty() ? "labels" : (labels_path.empty() ? "truth" : "truth+labels"));
  std::ostringstream csv;
  const auto model_hash = model.meta.contains("config_hash") ? model.meta.at("config_hash") : std::string("NA");
  csv << provenance(hash_of("evaluate", hashed)) << " model_config_hash=" << model_hash << '\n';
  ht::write_report_header(csv);
  ht::write_report_row(csv, row);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    auto out = open_output(out_path);
    out << csv.str();
  }
  if (!g.quiet && row.err_w) std::cerr << "evaluate: err_w=" << ht::format_number(*row.err_w) << '\n';
  return 0;
}

int run_rank(const Globals& g, const KeyedFlags& flags, const std::string& corpus_path, const std::string& scree_path) {
  const ht::ConfigMap map = build_map(g, flags, ht::rank_keys());
  const ht::RankSelectConfig cfg = rank_from(map);
  const ht::Corpus corpus = ht::read_corpus(fs::path(corpus_path));
  const auto est = ht::estimate_k(corpus, cfg);
  const auto sizes = corpus.slice_sizes();

  std::ostringstream csv;
  csv << provenance(hash_of("rank", map)) << '\n' << "k,singular_value,tau\n";
  for (Eigen::Index k = 0; k < est.singular_values.size(); ++k)
    csv << k + 1 << ',' << ht::format_number(est.singular_values(k)) << ','
        << ht::format_number(ht::rank_threshold(sizes, corpus.vocab_size(), static_cast<double>(k + 1), cfg)) << '\n';
  if (!scree_path.empty()) {
    auto out = open_output(scree_path);
    out << csv.str();
  }
  std::cout << "k_hat=" << est.k_hat << " tau=" << ht::format_number(est.tau) << " k_tilde=" << est.k_tilde << '\n';
  if (scree_path.empty()) std::cout << csv.str();
  return 0;
}

struct GridLists {
  std::vector<std::string> regimes{"aligned"};
  std::vector<std::string> designs{"theta0"};
  std::vector<double> sigmas{0.3};
  std::vector<double> rhos{1.0};
  std::vector<ht::Index> ks{3};
  std::vector<ht::Index> ts{3};
};

int run_grid(const Globals& g, const KeyedFlags& synth_flags, const KeyedFlags& solver_flags, const GridLists& lists,
             const std::string& out_path, const std::string& summary_path, bool estimate_rank) {
  ht::ConfigMap synth_map = build_map(g, synth_flags, ht::synth_keys());
  ht::ConfigMap solver_map;
  solver_flags.apply(solver_map);
  solver_map.check_keys(ht::solver_keys());
  if (!g.seed.empty()) solver_map.set("seed", g.seed);

  const ht::SynthConfig base = ht::synth_config_from(synth_map);
  ht::SolverConfig solver = ht::solver_config_from(solver_map);

  std::vector<ht::GridCell> cells;
  for (const auto& regime : lists.regimes)
    for (const auto& design : lists.designs)
      for (double sigma : lists.sigmas)
        for (double rho : lists.rhos)
          for (ht::Index K : lists.ks)
            for (ht::Index T : lists.ts) {
              ht::SynthConfig c = base;
              c.regime = ht::parse_regime(regime);
              c.design = ht::parse_design(design);
              c.sigma = sigma;
              c.rho = rho;
              c.K = K;
              c.T = T;
              const std::string id = regime + "-" + design + "-K" + std::to_string(K) + "-T" + std::to_string(T) +
                                     "-sigma" + ht::format_number(sigma) + "-rho" + ht::format_number(rho);
              c.seed = base.seed ^ ht::fnv1a(id);
              c.validate();
              cells.push_back({id, c});
            }
  solver.K = 1;
  solver.validate();

  const std::string hash = hash_of("grid", synth_map) + "-" + hash_of("grid-solver", solver_map);
  const ht::GridReport report = ht::run_grid(cells, solver, {estimate_rank, g.threads});

  auto out = open_output(out_path);
  out << provenance(hash) << '\n';
  ht::write_report_header(out);
  for (const auto& r : report.replicates) ht::write_report_row(out, r);
  if (!summary_path.empty()) {
    auto sum = open_output(summary_path);
    sum << provenance(hash) << '\n';
    ht::write_aggregate_csv(sum, report.cells);
  }
  if (!g.quiet) {
    for (const auto& c : report.cells)
      std::cerr << c.cell_id << ": err_w median=" << ht::format_number(c.err_w.median)
                << " weighted_f1 median=" << ht::format_number(c.weighted_f1.median) << " failures=" << c.failures
                << '\n';
  }
  return 0;
}

int exit_code(ht::ErrorKind kind) {
  switch (kind) {
    case ht::ErrorKind::ParseError:
    case ht::ErrorKind::EmptySupport:
    case ht::ErrorKind::DimensionMismatch:
    case ht::ErrorKind::ShapeMismatch:
      return 2;
    case ht::ErrorKind::NonFiniteLoss:
    case ht::ErrorKind::NonFiniteGradient:
    case ht::ErrorKind::NonFiniteObjective:
      return 4;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic topic modeling with the hypergraph-induced multinomial model"};
  app.set_version_flag("--version", std::string("hypertopic ") + ht::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "key=value configuration file (flags take precedence)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "suppress progress messages");

  auto* fit = app.add_subcommand("fit", "fit the model to a corpus");
  KeyedFlags fit_flags;
  std::string fit_corpus, fit_out, fit_trace;
  bool auto_k = false;
  fit->add_option("--corpus", fit_corpus, "corpus TSV")->required();
  fit->add_option("-o,--out", fit_out, "model output path")->required();
  fit->add_option("--trace", fit_trace, "trace CSV path (default <out>.trace.csv)");
  fit->add_flag("--auto-k", auto_k, "choose K by rank selection");
  add_solver_flags(fit, fit_flags);
  add_bounds(fit, fit_flags);
  add_rank_flags(fit, fit_flags);

  auto* sim = app.add_subcommand("simulate", "draw a synthetic corpus with known truth");
  KeyedFlags sim_flags;
  std::string sim_corpus, sim_truth, sim_labels;
  int sim_replicate = 0;
  sim->add_option("--corpus", sim_corpus, "corpus output path")->required();
  sim->add_option("--truth", sim_truth, "truth model output path")->required();
  sim->add_option("--labels", sim_labels, "labels output path");
  sim->add_option("--replicate", sim_replicate, "replicate index")->check(CLI::NonNegativeNumber);
  sim_flags.option(sim, "-K,--K", "K", "number of topics");
  add_synth_flags(sim, sim_flags);
  add_bounds(sim, sim_flags);

  auto* eval = app.add_subcommand("evaluate", "score a fitted model");
  std::string ev_model, ev_truth, ev_labels, ev_out, ev_cell = "eval";
  eval->add_option("--model", ev_model, "fitted model")->required();
  eval->add_option("--truth", ev_truth, "truth model (from simulate)");
  eval->add_option("--labels", ev_labels, "labels TSV");
  eval->add_option("-o,--out", ev_out, "report CSV path (default stdout)");
  eval->add_option("--cell-id", ev_cell, "cell_id column value");

  auto* rank = app.add_subcommand("rank", "estimate the number of topics");
  KeyedFlags rank_flags;
  std::string rank_corpus, rank_scree;
  rank->add_option("--corpus", rank_corpus, "corpus TSV")->required();
  rank->add_option("--scree", rank_scree, "scree CSV path (default stdout)");
  add_rank_flags(rank, rank_flags);
  rank_flags.option(rank, "--lp", "lp", "lower occurrence bound");
  rank_flags.option(rank, "--up", "up", "upper occurrence bound");

  auto* grid = app.add_subcommand("grid", "Monte Carlo benchmark over a grid of synthetic cells");
  KeyedFlags grid_synth, grid_solver;
  GridLists lists;
  std::string grid_out, grid_summary;
  bool grid_rank = false;
  grid->add_option("-o,--out", grid_out, "per-replicate report CSV")->required();
  grid->add_option("--summary", grid_summary, "per-cell aggregate CSV");
  grid->add_option("--regimes", lists.regimes, "regimes")->delimiter(',');
  grid->add_option("--designs", lists.designs, "designs")->delimiter(',');
  grid->add_option("--sigmas", lists.sigmas, "drift levels")->delimiter(',');
  grid->add_option("--rhos", lists.rhos, "repetition scalings")->delimiter(',');
  grid->add_option("--Ks", lists.ks, "topic counts")->delimiter(',');
  grid->add_option("--Ts", lists.ts, "slice counts")->delimiter(',');
  grid->add_flag("--estimate-rank", grid_rank, "also record k_hat");
  grid_synth.option(grid, "--n-t", "n_t", "documents per slice");
  grid_synth.option(grid, "--p", "p", "vocabulary size");
  grid_synth.option(grid, "--replicates", "replicates", "replicates per cell");
  grid_synth.option(grid, "--doc-concentration", "doc_concentration", "Dirichlet parameter of W rows");
  grid_synth.option(grid, "--word-concentration", "word_concentration", "Dirichlet parameter of base profiles");
  add_bounds(grid, grid_synth);
  grid_solver.option(grid, "--tau-p", "tau_p", "occurrence penalty weight");
  grid_solver.option(grid, "--tau-a", "tau_a", "repetition penalty weight");
  grid_solver.option(grid, "--eta0", "eta0", "base step size");
  grid_solver.option(grid, "--max-iters", "max_iters", "iteration budget");
  grid_solver.option(grid, "--init", "init_mode", "spectral | random");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (fit->parsed()) return run_fit(g, fit_flags, fit_corpus, fit_out, fit_trace, auto_k);
    if (sim->parsed()) return run_simulate(g, sim_flags, sim_corpus, sim_truth, sim_labels, sim_replicate);
    if (eval->parsed()) return run_evaluate(g, ev_model, ev_truth, ev_labels, ev_out, ev_cell);
    if (rank->parsed()) return run_rank(g, rank_flags, rank_corpus, rank_scree);
    if (grid->parsed()) return run_grid(g, grid_synth, grid_solver, lists, grid_out, grid_summary, grid_rank);
  } catch (const ht::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
