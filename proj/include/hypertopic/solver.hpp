#pragma once

#include "hypertopic/alignment.hpp"
#include "hypertopic/document.hpp"
#include "hypertopic/factor_model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace hypertopic {

enum class StepMode { KappaScaled, Fixed };
enum class InitMode { Spectral, Random, Provided };

struct SolverConfig {
  Index K = 0;
  double tau_p = 1.0;
  double tau_a = 1.0;
  /// Multiply tau_p, tau_a by n / (T p) so penalty and likelihood scale alike.
  bool scale_penalty = true;
  double eta0 = 0.1;
  int max_iters = 2000;
  /// Early-stopping threshold on delta; default 1e-6 sqrt(max_t n_t p).
  std::optional<double> tolerance;
  StepMode step_mode = StepMode::KappaScaled;
  InitMode init_mode = InitMode::Spectral;
  std::uint64_t seed = 0;
  /// Halve eta0 while the objective increases. Off gives plain fixed-step
  /// projected gradient descent.
  bool backtracking = true;
  int max_halvings = 20;
  PenaltyGradient penalty_gradient = PenaltyGradient::AsPrinted;
  /// Iterations between refreshes of the plug-in kappa step scalings.
  int kappa_refresh = 10;
  /// Validate every iterate against the feasible region.
  bool check_feasibility = false;
  int threads = 1;
  FeasibleBounds bounds;

  void validate() const;
  double penalty_scale(const Corpus& corpus) const;
  double resolved_tolerance(const Corpus& corpus) const;
};

enum class SolverStatus { Converged, MaxIters };

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double step_norm_W = 0.0;  ///< max_t ||W_t^{l+1} - W_t^l||_F
  double step_norm_P = 0.0;
  double step_norm_A = 0.0;
  int halvings = 0;
  std::vector<Permutation> perms;
  double wall_ms = 0.0;
};

struct SolverTrace {
  double initial_objective = 0.0;
  std::vector<IterationRecord> iterations;
  SolverStatus status = SolverStatus::MaxIters;
};

struct FitResult {
  ModelParams params;
  SolverTrace trace;
};

using IterationObserver = std::function<void(const IterationRecord&, const ModelParams&)>;

/// Spectral + k-means initializer: truncated SVD of the stacked support
/// matrix, k-means on the document embeddings, barycentric weights against
/// the centers projected to the simplex, then cluster-conditional occurrence
/// and repetition profiles projected onto the feasible region.
ModelParams init_spectral(const Corpus& corpus, Index K, const FeasibleBounds& bounds, std::uint64_t seed);

/// Dirichlet(1) rows for W, uniform P and A projected onto the feasible region.
ModelParams init_random(const Corpus& corpus, Index K, const FeasibleBounds& bounds, std::uint64_t seed);

/// Projected gradient descent with blockwise steps, sequential realignment
/// after every update and early stopping on the largest block change.
/// `initial` is required for InitMode::Provided and ignored otherwise.
FitResult fit(const Corpus& corpus, const SolverConfig& config, const ModelParams* initial = nullptr,
              const IterationObserver& observer = {});

struct ErrorReport {
  double error = 0.0;
  std::vector<double> per_slice;
  std::vector<Permutation> perms;
};

/// Oracle-aligned error with operator-norm block weights taken from the truth.
ErrorReport error_metric(const ModelParams& est, const ModelParams& truth);

}  // namespace hypertopic
