#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hypertopic {

/// Column permutation O of a K-column factor. `source(k)` is the column of the
/// original matrix that lands in position k of M O, i.e. O(source(k), k) = 1.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Eigen::Index> source);

  static Permutation identity(Eigen::Index k);

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(source_.size()); }
  Eigen::Index source(Eigen::Index k) const { return source_.at(static_cast<std::size_t>(k)); }
  const std::vector<Eigen::Index>& sources() const noexcept { return source_; }
  bool is_identity() const noexcept;

  Permutation inverse() const;
  /// (M this) other == M (this * other)
  Permutation then(const Permutation& other) const;

  Eigen::MatrixXd matrix() const;

  /// M O: column k of the result is column source(k) of m.
  template <typename Derived>
  typename Derived::PlainObject apply_columns(const Eigen::MatrixBase<Derived>& m) const {
    typename Derived::PlainObject out(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < m.cols(); ++k) out.col(k) = m.col(source_[static_cast<std::size_t>(k)]);
    return out;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Eigen::Index> source_;
};

}  // namespace hypertopic
