#include "hypertopic/eval.hpp"

#include "hypertopic/alignment.hpp"
#include "hypertopic/error.hpp"
#include "hypertopic/parallel.hpp"
#include "hypertopic/rank_select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

namespace hypertopic {

double err_w(const ModelParams& est, const ModelParams& truth) {
  const auto oa = oracle_align(est, truth, operator_norm_weights(truth));
  double total = 0.0;
  Index n = 0;
  for (Index t = 0; t < truth.num_slices(); ++t) {
    const Eigen::MatrixXd w = oa.alignment.perms[t].apply_columns(est.slices[t].W);
    total += (w - truth.slices[t].W).rowwise().norm().sum();
    n += truth.slices[t].num_docs();
  }
  return total / static_cast<double>(n);
}

double uniform_baseline_err_w(const ModelParams& truth) {
  double total = 0.0;
  Index n = 0;
  const double u = 1.0 / static_cast<double>(truth.K);
  for (const auto& sp : truth.slices) {
    total += (sp.W.array() - u).matrix().rowwise().norm().sum();
    n += sp.num_docs();
  }
  return total / static_cast<double>(n);
}

std::vector<int> dominant_topics(const ModelParams& est) {
  std::vector<int> out;
  for (const auto& sp : est.slices)
    for (Index i = 0; i < sp.W.rows(); ++i) {
      Index k = 0;
      sp.W.row(i).maxCoeff(&k);
      out.push_back(static_cast<int>(k));
    }
  return out;
}

double weighted_f1(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorKind::ShapeMismatch, "prediction and label counts differ");
  if (truth.empty()) return 0.0;

  std::map<int, Index> topic_index, class_index;
  for (int v : predicted) topic_index.emplace(v, 0);
  for (int v : truth) class_index.emplace(v, 0);
  Index m = 0;
  for (auto& [k, idx] : topic_index) idx = m++;
  m = 0;
  for (auto& [k, idx] : class_index) idx = m++;
  const Index size = std::max<Index>(static_cast<Index>(topic_index.size()), static_cast<Index>(class_index.size()));

  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(size, size);  // topics x classes
  for (std::size_t i = 0; i < truth.size(); ++i)
    confusion(topic_index[predicted[i]], class_index[truth[i]]) += 1.0;
  const Eigen::VectorXd class_support = confusion.colwise().sum().transpose();
  const Eigen::VectorXd topic_size = confusion.rowwise().sum();

  // Each matched pair adds its own term to the weighted F1, so ties in
  // agreement can be broken by F1 inside the same assignment. The F1 terms
  // sum to at most 1/2 and never outweigh one agreement.
  Eigen::MatrixXd f1_term = Eigen::MatrixXd::Zero(size, size);
  const double n = static_cast<double>(truth.size());
  for (Index topic = 0; topic < size; ++topic)
    for (Index cls = 0; cls < size; ++cls)
      if (confusion(topic, cls) > 0.0)
        f1_term(topic, cls) =
            class_support(cls) * 2.0 * confusion(topic, cls) / ((topic_size(topic) + class_support(cls)) * n);
  const Assignment match = hungarian(-(confusion + 0.5 * f1_term));
  double weighted = 0.0;
  for (Index topic = 0; topic < size; ++topic) {
    const Index cls = match.row_to_col[topic];
    if (class_support(cls) == 0.0) continue;
    const double tp = confusion(topic, cls);
    const double denom = topic_size(topic) + class_support(cls);
    const double f1 = denom > 0.0 ? 2.0 * tp / denom : 0.0;
    weighted += class_support(cls) * f1;
  }
  return weighted / static_cast<double>(truth.size());
}

double weighted_f1(const ModelParams& est, const std::vector<std::vector<int>>& labels) {
  std::vector<int> flat;
  for (const auto& slice : labels) flat.insert(flat.end(), slice.begin(), slice.end());
  return weighted_f1(dominant_topics(est), flat);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_report_header(std::ostream& os) { os << kReportHeader << '\n'; }

void write_report_row(std::ostream& os, const EvalReport& r) {
  auto opt = [](const auto& v) -> std::string {
    if (!v) return "NA";
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>) return format_number(*v);
    else return std::to_string(*v);
  };
  os << r.cell_id << ',' << r.regime << ',' << r.K << ',' << r.T << ',' << r.sigma << ',' << r.rho << ','
     << r.design << ',' << r.replicate << ',' << opt(r.err_w) << ',' << opt(r.weighted_f1) << ','
     << opt(r.k_hat) << ',' << opt(r.runtime_ms) << '\n';
}

MetricSummary summarize(std::vector<double> values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double prob) {
    const double pos = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  s.median = quantile(0.5);
  s.q1 = quantile(0.25);
  s.q3 = quantile(0.75);
  s.min = values.front();
  s.max = values.back();
  return s;
}

std::vector<CellAggregate> aggregate(const std::vector<EvalReport>& reports) {
  std::vector<CellAggregate> cells;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> errs, f1s;
  for (const auto& r : reports) {
    auto [it, inserted] = index.emplace(r.cell_id, cells.size());
    if (inserted) {
      cells.push_back({r.cell_id, {}, {}, 0});
      errs.emplace_back();
      f1s.emplace_back();
    }
    const std::size_t c = it->second;
    if (!r.failure.empty()) ++cells[c].failures;
    if (r.err_w) errs[c].push_back(*r.err_w);
    if (r.weighted_f1) f1s[c].push_back(*r.weighted_f1);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    cells[c].err_w = summarize(errs[c]);
    cells[c].weighted_f1 = summarize(f1s[c]);
  }
  return cells;
}

GridReport run_grid(const std::vector<GridCell>& grid, const SolverConfig& solver, GridOptions options) {
  struct Job {
    std::size_t cell;
    int replicate;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < grid.size(); ++c)
    for (int r = 0; r < grid[c].synth.replicates; ++r) jobs.push_back({c, r});

  GridReport report;
  report.replicates.resize(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t j) {
    const auto& cell = grid[jobs[j].cell];
    const auto& sc = cell.synth;
    EvalReport& rep = report.replicates[j];
    rep.cell_id = cell.id;
    rep.regime = to_string(sc.regime);
    rep.K = std::to_string(sc.K);
    rep.T = std::to_string(sc.T);
    rep.sigma = format_number(sc.sigma);
    rep.rho = format_number(sc.rho);
    rep.design = to_string(sc.design);
    rep.replicate = jobs[j].replicate;
    const auto started = std::chrono::steady_clock::now();
    try {
      const SynthInstance inst = generate(sc, jobs[j].replicate);
      SolverConfig cfg = solver;
      cfg.K = sc.K;
      cfg.bounds = sc.bounds;
      cfg.threads = 1;
      cfg.seed = solver.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(jobs[j].replicate + 1));
      if (options.estimate_rank) {
        RankSelectConfig rc;
        rc.lp = sc.bounds.lp;
        rc.up = sc.bounds.up;
        rc.seed = cfg.seed;
        rep.k_hat = estimate_k(inst.corpus, rc).k_hat;
      }
      const FitResult fitted = fit(inst.corpus, cfg);
      rep.err_w = err_w(fitted.params, inst.truth);
      rep.weighted_f1 = weighted_f1(fitted.params, inst.labels);
    } catch (const std::exception& ex) {
      rep.failure = ex.what();
    }
    rep.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  });
  report.cells = aggregate(report.replicates);
  return report;
}

void write_aggregate_csv(std::ostream& os, const std::vector<CellAggregate>& cells) {
  os << "cell_id,metric,count,mean,median,q1,q3,min,max,failures\n";
  for (const auto& c : cells) {
    for (const auto& [name, m] : {std::pair{"err_w", c.err_w}, std::pair{"weighted_f1", c.weighted_f1}}) {
      os << c.cell_id << ',' << name << ',' << m.count << ',' << format_number(m.mean) << ','
         << format_number(m.median) << ',' << format_number(m.q1) << ',' << format_number(m.q3) << ','
         << format_number(m.min) << ',' << format_number(m.max) << ',' << c.failures << '\n';
    }
  }
}

}  // namespace hypertopic
