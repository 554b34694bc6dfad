#pragma once

#include "hypertopic/document.hpp"
#include "hypertopic/permutation.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hypertopic {

/// Box bounds of the feasible region: occurrence in [lp, up] with
/// 0 < lp < up < 1, repetition intensity in [la, ua] with 0 < la < 1 < ua.
struct FeasibleBounds {
  double lp = 0.01;
  double up = 0.99;
  double la = 0.1;
  double ua = 10.0;

  void validate() const;
  friend bool operator==(const FeasibleBounds&, const FeasibleBounds&) = default;
};

/// Factors of one time slice: Q = W P^T, Lambda = W A^T.
struct TimeSliceParams {
  Eigen::MatrixXd W;  ///< n_t x K, rows on the simplex
  Eigen::MatrixXd P;  ///< p x K, entries in [lp, up]
  Eigen::MatrixXd A;  ///< p x K, entries in [la, ua], columns sum to p

  Index num_docs() const noexcept { return W.rows(); }
  Index vocab_size() const noexcept { return P.rows(); }
  Index num_topics() const noexcept { return W.cols(); }

  /// Topics with positive column mass in W.
  std::vector<Index> active_topics() const;

  /// Throws InvalidParams naming the first violated constraint.
  void validate(const FeasibleBounds& bounds) const;

  TimeSliceParams permuted(const Permutation& o) const;
};

struct ModelParams {
  std::vector<TimeSliceParams> slices;
  FeasibleBounds bounds;
  Index K = 0;

  Index num_slices() const noexcept { return static_cast<Index>(slices.size()); }
  Index vocab_size() const { return slices.empty() ? 0 : slices.front().vocab_size(); }

  /// Shape consistency plus every slice's feasibility.
  void validate() const;
  /// Additionally checks p and n_t against the corpus.
  void validate_against(const Corpus& corpus) const;

  ModelParams permuted(const std::vector<Permutation>& perms) const;
};

struct PenaltyValues {
  double g_p = 0.0;
  double g_a = 0.0;
};

struct ObjectiveParts {
  double bernoulli = 0.0;
  double multinomial = 0.0;
  PenaltyValues penalties;
  double total = 0.0;
};

/// Negative log-likelihood of the activation layer.
double loss_bernoulli(const ModelParams& params, const Corpus& corpus);
/// Negative log-likelihood of the repetition layer, without terms that depend
/// only on (s, r).
double loss_multinomial(const ModelParams& params, const Corpus& corpus);

/// Squared Frobenius deviations of the aligned P_t O_t, A_t O_t from their
/// temporal means. `perms` must have one entry per slice.
PenaltyValues temporal_penalties(const ModelParams& params, const std::vector<Permutation>& perms);

ObjectiveParts evaluate_objective(const ModelParams& params, const Corpus& corpus,
                                  const std::vector<Permutation>& perms, double tau_p, double tau_a,
                                  int threads = 1);

double objective(const ModelParams& params, const Corpus& corpus,
                 const std::vector<Permutation>& perms, double tau_p, double tau_a);

enum class PenaltyGradient {
  /// tau (P_t - Pbar) with Pbar treated as a constant.
  AsPrinted,
  /// 2 tau (P_t - Pbar): the true derivative of the penalized objective.
  Exact,
};

struct GradientOptions {
  PenaltyGradient penalty = PenaltyGradient::AsPrinted;
  bool keep_sigma = false;
  int threads = 1;
};

struct SliceGradient {
  Eigen::MatrixXd grad_W;
  Eigen::MatrixXd grad_P;
  Eigen::MatrixXd grad_A;
  Eigen::MatrixXd sigma_Q;       ///< only filled with keep_sigma
  Eigen::MatrixXd sigma_Lambda;  ///< only filled with keep_sigma
};

struct GradientBlocks {
  std::vector<SliceGradient> slices;
};

GradientBlocks gradients(const ModelParams& params, const Corpus& corpus,
                         const std::vector<Permutation>& perms, double tau_p, double tau_a,
                         GradientOptions options = {});

/// Objective and gradients from a single pass over the corpus.
ObjectiveParts evaluate_with_gradients(const ModelParams& params, const Corpus& corpus,
                                       const std::vector<Permutation>& perms, double tau_p, double tau_a,
                                       GradientBlocks& grads, GradientOptions options = {});

/// Identity permutations for every slice of `params`.
std::vector<Permutation> identity_perms(const ModelParams& params);

}  // namespace hypertopic
