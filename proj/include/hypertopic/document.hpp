#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hypertopic {

using Index = Eigen::Index;

/// A document as a weighted hyperedge: the support e (words present) and the
/// repetitions r = d - e on that support. Stored sparsely by word index.
class Document {
 public:
  Document() = default;

  /// `words` need not be sorted; counts must be positive and words unique.
  Document(Index vocab_size, std::vector<Index> words, std::vector<int> counts);

  Index vocab_size() const noexcept { return vocab_size_; }
  Index support_size() const noexcept { return static_cast<Index>(words_.size()); }
  bool empty() const noexcept { return words_.empty(); }

  /// s = sum_j r_j
  long long total_repetitions() const noexcept { return total_repetitions_; }

  std::span<const Index> words() const noexcept { return words_; }
  std::span<const int> counts() const noexcept { return counts_; }

  Eigen::VectorXi dense_counts() const;
  Eigen::VectorXi support() const;
  Eigen::VectorXi repetitions() const;

  friend bool operator==(const Document&, const Document&) = default;

 private:
  Index vocab_size_ = 0;
  std::vector<Index> words_;
  std::vector<int> counts_;
  long long total_repetitions_ = 0;
};

/// Splits a count vector d into (e, r, s). In strict mode an all-zero vector
/// is rejected with EmptySupport.
Document decompose(const Eigen::Ref<const Eigen::VectorXi>& counts, bool strict = true);

/// Documents grouped into T ordered time slices over a shared vocabulary.
class Corpus {
 public:
  Corpus() = default;
  Corpus(Index vocab_size, std::vector<std::vector<Document>> slices);

  Index vocab_size() const noexcept { return vocab_size_; }
  Index num_slices() const noexcept { return static_cast<Index>(slices_.size()); }
  Index slice_size(Index t) const { return static_cast<Index>(slices_.at(t).size()); }
  Index num_documents() const noexcept;
  std::vector<Index> slice_sizes() const;

  const std::vector<Document>& slice(Index t) const { return slices_.at(t); }
  const std::vector<std::vector<Document>>& slices() const noexcept { return slices_; }

  /// Dense support rows [begin, end) of slice t, as doubles.
  Eigen::MatrixXd support_block(Index t, Index begin, Index end) const;
  Eigen::MatrixXd repetition_block(Index t, Index begin, Index end) const;

  /// E = (E_1^T, ..., E_T^T)^T as a sparse 0/1 matrix, n x p.
  Eigen::SparseMatrix<double, Eigen::RowMajor> stacked_support() const;

  std::optional<std::vector<std::string>> vocabulary;
  /// Ground-truth label per document, indexed [t][i].
  std::optional<std::vector<std::vector<int>>> labels;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.vocab_size_ == b.vocab_size_ && a.slices_ == b.slices_;
  }

 private:
  Index vocab_size_ = 0;
  std::vector<std::vector<Document>> slices_;
};

}  // namespace hypertopic
