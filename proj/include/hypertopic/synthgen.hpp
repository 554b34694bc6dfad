#pragma once

#include "hypertopic/document.hpp"
#include "hypertopic/factor_model.hpp"
#include "hypertopic/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hypertopic {

/// aligned: repetition intensity increases with occurrence probability;
/// misaligned: the within-topic rank order of repetition is reversed.
enum class Regime { Aligned, Misaligned };
/// Theta0: every topic active in every slice; Theta1: the last topics are
/// switched off in the first half of the time windows.
enum class Design { Theta0, Theta1 };

std::string to_string(Regime r);
std::string to_string(Design d);
Regime parse_regime(const std::string& s);
Design parse_design(const std::string& s);

struct SynthConfig {
  Index K = 3;
  Index T = 3;
  Index n_t = 100;
  Index p = 400;
  Regime regime = Regime::Aligned;
  double sigma = 0.3;  ///< temporal drift on the logit / log scale
  Design design = Design::Theta0;
  double rho = 1.0;    ///< repetition scaling s = round(rho * |support|)
  int replicates = 20;
  std::uint64_t seed = 0;
  FeasibleBounds bounds;

  double doc_concentration = 0.3;   ///< Dirichlet parameter of W rows
  double word_concentration = 0.1;  ///< sparse Dirichlet of base occurrence columns
  double rho_min = 0.1;
  double rho_max = 5.0;
  bool allow_rho_outside_guards = false;
  /// Draw rho per document uniformly in [rho_min, rho_max] instead of using rho.
  bool heterogeneous_rho = false;

  void validate() const;
};

struct SynthInstance {
  Corpus corpus;
  ModelParams truth;
  std::vector<std::vector<int>> labels;  ///< dominant true topic per document
  SynthConfig config;
  int replicate = 0;
};

/// Ground-truth factors: base occurrence profiles from a sparse Dirichlet,
/// repetition profiles tied to them by regime, per-slice drift, and
/// Dirichlet document weights following the design.
ModelParams make_truth(const SynthConfig& config, Rng& rng);

/// Documents drawn from the H-Multinomial with nonempty supports and
/// s = round(rho * |support|).
SynthInstance sample_corpus(const ModelParams& truth, const SynthConfig& config, Rng& rng, int replicate = 0);

/// make_truth + sample_corpus on the stream derived from (seed, replicate).
SynthInstance generate(const SynthConfig& config, int replicate);

/// Topics switched off in slice t (0-based) under the design.
std::vector<Index> inactive_topics(const SynthConfig& config, Index t);

/// Half-up rounding used for s.
long long round_half_up(double x);

}  // namespace hypertopic
