#include "hypertopic/permutation.hpp"

#include "hypertopic/error.hpp"

#include <numeric>

namespace hypertopic {

Permutation::Permutation(std::vector<Eigen::Index> source) : source_(std::move(source)) {
  std::vector<bool> seen(source_.size(), false);
  for (auto s : source_) {
    if (s < 0 || s >= static_cast<Eigen::Index>(source_.size()) || seen[static_cast<std::size_t>(s)])
      throw Error(ErrorKind::InvalidParams, "not a permutation");
    seen[static_cast<std::size_t>(s)] = true;
  }
}

Permutation Permutation::identity(Eigen::Index k) {
  std::vector<Eigen::Index> s(static_cast<std::size_t>(k));
  std::iota(s.begin(), s.end(), Eigen::Index{0});
  return Permutation(std::move(s));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t k = 0; k < source_.size(); ++k)
    if (source_[k] != static_cast<Eigen::Index>(k)) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<Eigen::Index> inv(source_.size());
  for (std::size_t k = 0; k < source_.size(); ++k)
    inv[static_cast<std::size_t>(source_[k])] = static_cast<Eigen::Index>(k);
  return Permutation(std::move(inv));
}

Permutation Permutation::then(const Permutation& other) const {
  if (other.size() != size()) throw Error(ErrorKind::ShapeMismatch, "permutation sizes differ");
  std::vector<Eigen::Index> composed(source_.size());
  for (std::size_t k = 0; k < source_.size(); ++k)
    composed[k] = source_[static_cast<std::size_t>(other.source_[k])];
  return Permutation(std::move(composed));
}

Eigen::MatrixXd Permutation::matrix() const {
  const auto k = size();
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index c = 0; c < k; ++c) o(source(c), c) = 1.0;
  return o;
}

}  // namespace hypertopic
