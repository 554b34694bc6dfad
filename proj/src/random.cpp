#include "hypertopic/random.hpp"

#include <algorithm>
#include <vector>

namespace hypertopic {

Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto k : keys) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

Eigen::VectorXd sample_dirichlet(Rng& rng, const Eigen::Ref<const Eigen::VectorXd>& alpha) {
  Eigen::VectorXd x(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    std::gamma_distribution<double> gamma(alpha(k), 1.0);
    x(k) = gamma(rng);
  }
  double total = x.sum();
  if (!(total > 0.0)) {
    // every gamma draw underflowed (tiny alpha): put the mass on one coordinate
    std::uniform_int_distribution<Eigen::Index> pick(0, alpha.size() - 1);
    x.setZero();
    x(pick(rng)) = 1.0;
    return x;
  }
  return x / total;
}

Eigen::VectorXi sample_multinomial(Rng& rng, long long trials,
                                   const Eigen::Ref<const Eigen::VectorXd>& probs) {
  Eigen::VectorXi out = Eigen::VectorXi::Zero(probs.size());
  Eigen::Index last = -1;
  for (Eigen::Index j = 0; j < probs.size(); ++j)
    if (probs(j) > 0.0) last = j;
  if (last < 0 || trials <= 0) return out;

  double remaining_mass = probs.cwiseMax(0.0).sum();
  long long remaining = trials;
  for (Eigen::Index j = 0; j <= last && remaining > 0; ++j) {
    if (probs(j) <= 0.0) continue;
    long long draw = remaining;
    if (j != last) {
      double share = std::clamp(probs(j) / remaining_mass, 0.0, 1.0);
      std::binomial_distribution<long long> binom(remaining, share);
      draw = binom(rng);
    }
    out(j) = static_cast<int>(draw);
    remaining -= draw;
    remaining_mass -= probs(j);
  }
  return out;
}

}  // namespace hypertopic
