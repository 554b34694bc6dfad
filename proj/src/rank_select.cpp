#include "hypertopic/rank_select.hpp"

#include "hypertopic/error.hpp"
#include "hypertopic/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hypertopic {

void RankSelectConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::ConfigInvalid, "delta must lie in (0,1)");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::ConfigInvalid, "alpha must lie in [0,1)");
  if (!(0.0 < lp && lp < up && up < 1.0)) throw Error(ErrorKind::ConfigInvalid, "need 0 < lp < up < 1");
  if (k_cap < 1) throw Error(ErrorKind::ConfigInvalid, "k_cap must be >= 1");
}

double rank_threshold(const std::vector<Index>& slice_sizes, Index p, double k_tilde,
                      const RankSelectConfig& config) {
  const double n = static_cast<double>(std::accumulate(slice_sizes.begin(), slice_sizes.end(), Index{0}));
  const double pd = static_cast<double>(p);
  const double max_nt = static_cast<double>(*std::max_element(slice_sizes.begin(), slice_sizes.end()));
  const double log_term = std::log((n + pd) / config.delta);
  return std::sqrt(max_nt) * std::pow(pd, config.alpha / 2.0) * std::sqrt(k_tilde) +
         std::sqrt(2.0 * std::max(1.0 - config.lp, config.up) * std::max(n, pd) * log_term) +
         (2.0 / 3.0) * log_term;
}

RankEstimate select_rank(const Eigen::VectorXd& singular_values, const std::vector<Index>& slice_sizes,
                         Index p, const RankSelectConfig& config) {
  config.validate();
  if (slice_sizes.empty()) throw Error(ErrorKind::ShapeMismatch, "no slices");
  RankEstimate out;
  out.singular_values = singular_values;
  auto count_above = [&](Index k_tilde) {
    const double tau = rank_threshold(slice_sizes, p, static_cast<double>(k_tilde), config);
    return static_cast<Index>((singular_values.array() > tau).count());
  };
  // k_tilde <- max(1, k_hat(k_tilde)) from k_tilde = 1. The count is
  // nonincreasing in k_tilde, so the iterates alternate around the fixed
  // point. A 2-cycle {a, b} with a < b is settled at k_tilde = b, whose
  // count is the smaller member a (or 0).
  Index k_tilde = 1;
  Index k_hat = count_above(k_tilde);
  Index previous = -1;
  for (Index step = 0; step <= config.k_cap; ++step) {
    const Index next = std::max<Index>(k_hat, 1);
    if (next == k_tilde) break;
    if (next == previous) {
      k_tilde = std::max(k_tilde, next);
      k_hat = count_above(k_tilde);
      break;
    }
    previous = k_tilde;
    k_tilde = next;
    k_hat = count_above(k_tilde);
  }
  out.k_hat = k_hat;
  out.k_tilde = k_tilde;
  out.tau = rank_threshold(slice_sizes, p, static_cast<double>(k_tilde), config);
  return out;
}

RankEstimate estimate_k(const Corpus& corpus, const RankSelectConfig& config) {
  config.validate();
  const auto e = corpus.stacked_support();
  const Index rank = std::min({config.k_cap, e.rows(), e.cols()});
  const TruncatedSvd svd = truncated_svd(e, rank, 10, config.seed);
  return select_rank(svd.singular_values, corpus.slice_sizes(), corpus.vocab_size(), config);
}

}  // namespace hypertopic
