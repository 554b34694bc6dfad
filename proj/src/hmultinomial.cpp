#include "hypertopic/hmultinomial.hpp"

#include "hypertopic/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypertopic {

namespace {

constexpr double kQClamp = 1e-12;

double clamp_q(double q) { return std::clamp(q, kQClamp, 1.0 - kQClamp); }

void compositions(int remaining, std::size_t slot, std::vector<int>& parts,
                  std::vector<std::vector<int>>& out) {
  if (slot + 1 == parts.size()) {
    parts[slot] = remaining;
    out.push_back(parts);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    parts[slot] = v;
    compositions(remaining - v, slot + 1, parts, out);
  }
}

}  // namespace

HMultinomialParams::HMultinomialParams(long long s, Eigen::VectorXd q, Eigen::VectorXd lambda)
    : s_(s), q_(std::move(q)), lambda_(std::move(lambda)) {
  if (s_ < 0) throw Error(ErrorKind::InvalidParams, "s must be nonnegative");
  if (q_.size() < 1 || q_.size() != lambda_.size())
    throw Error(ErrorKind::DimensionMismatch, "q and lambda must share a positive length");
  for (Index j = 0; j < q_.size(); ++j) {
    if (!(q_(j) > 0.0 && q_(j) < 1.0)) throw Error(ErrorKind::InvalidParams, "q outside (0,1)");
    if (!(lambda_(j) > 0.0)) throw Error(ErrorKind::InvalidParams, "lambda must be positive");
  }
  const double p = static_cast<double>(q_.size());
  const double total = lambda_.sum();
  if (std::abs(total - p) > 1e-9 * p)
    throw Error(ErrorKind::InvalidParams, "lambda must sum to p");
  lambda_ *= p / total;
}

double log_pmf(const HMultinomialParams& params, const Document& doc) {
  if (doc.vocab_size() != params.dim())
    throw Error(ErrorKind::DimensionMismatch, "document and parameter dimensions differ");

  const auto& q = params.q();
  double log_absent = 0.0;
  for (Index j = 0; j < q.size(); ++j) log_absent += std::log1p(-clamp_q(q(j)));
  if (doc.empty()) return log_absent;
  if (doc.total_repetitions() != params.s()) return -std::numeric_limits<double>::infinity();

  const auto& lambda = params.lambda();
  auto words = doc.words();
  auto counts = doc.counts();

  double bernoulli = log_absent;
  double support_mass = 0.0;
  for (auto j : words) {
    const double qj = clamp_q(q(j));
    bernoulli += std::log(qj) - std::log1p(-qj);
    support_mass += lambda(j);
  }

  double log_coef = std::lgamma(static_cast<double>(params.s()) + 1.0);
  double allocation = 0.0;
  for (std::size_t k = 0; k < words.size(); ++k) {
    const int r = counts[k] - 1;
    if (r == 0) continue;
    log_coef -= std::lgamma(r + 1.0);
    allocation += r * std::log(lambda(words[k]) / support_mass);
  }
  return log_coef + bernoulli + allocation;
}

double log_pmf(const HMultinomialParams& params, const Eigen::Ref<const Eigen::VectorXi>& counts) {
  return log_pmf(params, decompose(counts, false));
}

Eigen::VectorXi sample_support(const Eigen::Ref<const Eigen::VectorXd>& q, Rng& rng,
                               bool reject_empty) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXi e(q.size());
  do {
    for (Index j = 0; j < q.size(); ++j) e(j) = unif(rng) < q(j) ? 1 : 0;
  } while (reject_empty && e.sum() == 0);
  return e;
}

Eigen::VectorXi sample_repetitions(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                   const Eigen::Ref<const Eigen::VectorXi>& support,
                                   long long s, Rng& rng) {
  if (support.sum() == 0) return Eigen::VectorXi::Zero(support.size());
  Eigen::VectorXd theta = lambda.cwiseProduct(support.cast<double>());
  return sample_multinomial(rng, s, theta);
}

Document sample(const HMultinomialParams& params, Rng& rng, SampleOptions options) {
  Eigen::VectorXi e = sample_support(params.q(), rng, options.reject_empty);
  Eigen::VectorXi r = sample_repetitions(params.lambda(), e, params.s(), rng);
  return decompose(e + r, false);
}

std::vector<Eigen::VectorXi> enumerate_support(int p, int s) {
  if (p < 1 || s < 0) throw Error(ErrorKind::InvalidParams, "need p >= 1 and s >= 0");
  if (p > 6 || s > 4) throw Error(ErrorKind::SizeGuard, "enumeration limited to p <= 6, s <= 4");

  std::vector<Eigen::VectorXi> out;
  out.push_back(Eigen::VectorXi::Zero(p));
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    std::vector<int> active;
    for (int j = 0; j < p; ++j)
      if (mask & (1u << j)) active.push_back(j);
    std::vector<int> parts(active.size());
    std::vector<std::vector<int>> allocations;
    compositions(s, 0, parts, allocations);
    for (const auto& alloc : allocations) {
      Eigen::VectorXi d = Eigen::VectorXi::Zero(p);
      for (std::size_t k = 0; k < active.size(); ++k) d(active[k]) = 1 + alloc[k];
      out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace hypertopic
