#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hypertopic {

using Rng = std::mt19937_64;

/// Independent stream for a (seed, key...) tuple. Used to give every
/// replicate / worker its own generator so results do not depend on
/// scheduling or thread count.
Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// One draw from Dirichlet(alpha).
Eigen::VectorXd sample_dirichlet(Rng& rng, const Eigen::Ref<const Eigen::VectorXd>& alpha);

/// Multinomial(trials, probs) by sequential conditional binomials. `probs`
/// must be nonnegative; it is normalized internally.
Eigen::VectorXi sample_multinomial(Rng& rng, long long trials,
                                   const Eigen::Ref<const Eigen::VectorXd>& probs);

}  // namespace hypertopic
