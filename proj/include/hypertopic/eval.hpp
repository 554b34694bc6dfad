#pragma once

#include "hypertopic/factor_model.hpp"
#include "hypertopic/solver.hpp"
#include "hypertopic/synthgen.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hypertopic {

/// Mean over documents of ||w_hat - w*||_2 after oracle label alignment.
double err_w(const ModelParams& est, const ModelParams& truth);

/// Same distance against ŵ = (1/K, ..., 1/K) for every document.
double uniform_baseline_err_w(const ModelParams& truth);

/// argmax_k of every W row (ties to the smallest index), flattened over slices.
std::vector<int> dominant_topics(const ModelParams& est);

/// Support-weighted F1 of predicted topics against labels. Topics are first
/// matched to classes by the assignment maximizing agreement; among equally
/// agreeing assignments the one with the highest weighted F1 is used, so the
/// score does not depend on how topics are numbered.
double weighted_f1(const std::vector<int>& predicted, const std::vector<int>& truth);
double weighted_f1(const ModelParams& est, const std::vector<std::vector<int>>& labels);

struct EvalReport {
  std::string cell_id;
  std::string regime = "NA";
  std::string K = "NA";
  std::string T = "NA";
  std::string sigma = "NA";
  std::string rho = "NA";
  std::string design = "NA";
  int replicate = 0;
  std::optional<double> err_w;
  std::optional<double> weighted_f1;
  std::optional<Index> k_hat;
  std::optional<double> runtime_ms;
  std::string failure;  ///< non-empty when the replicate failed
};

inline constexpr const char* kReportHeader =
    "cell_id,regime,K,T,sigma,rho,design,replicate,err_w,weighted_f1,k_hat,runtime_ms";

void write_report_header(std::ostream& os);
void write_report_row(std::ostream& os, const EvalReport& r);

struct GridCell {
  std::string id;
  SynthConfig synth;
};

struct MetricSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Boxplot statistics, quartiles by linear interpolation between order statistics.
MetricSummary summarize(std::vector<double> values);

struct CellAggregate {
  std::string cell_id;
  MetricSummary err_w;
  MetricSummary weighted_f1;
  std::size_t failures = 0;
};

struct GridOptions {
  bool estimate_rank = false;
  int threads = 1;
};

struct GridReport {
  std::vector<EvalReport> replicates;
  std::vector<CellAggregate> cells;
};

std::vector<CellAggregate> aggregate(const std::vector<EvalReport>& reports);

/// Generate, fit and evaluate every replicate of every cell. Replicates use
/// independent streams, so results do not depend on the thread count.
/// Failures are recorded per replicate.
GridReport run_grid(const std::vector<GridCell>& grid, const SolverConfig& solver, GridOptions options = {});

void write_aggregate_csv(std::ostream& os, const std::vector<CellAggregate>& cells);

/// Decimal with 12 significant digits.
std::string format_number(double v);

}  // namespace hypertopic
