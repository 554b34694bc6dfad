#include "hypertopic/document.hpp"

#include "hypertopic/error.hpp"

#include <algorithm>
#include <numeric>

namespace hypertopic {

Document::Document(Index vocab_size, std::vector<Index> words, std::vector<int> counts)
    : vocab_size_(vocab_size) {
  if (vocab_size < 1) throw Error(ErrorKind::DimensionMismatch, "vocabulary size must be >= 1");
  if (words.size() != counts.size())
    throw Error(ErrorKind::DimensionMismatch, "words and counts differ in length");

  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return words[a] < words[b]; });

  words_.reserve(words.size());
  counts_.reserve(words.size());
  for (auto k : order) {
    if (words[k] < 0 || words[k] >= vocab_size)
      throw Error(ErrorKind::DimensionMismatch, "word index out of range");
    if (counts[k] <= 0) throw Error(ErrorKind::InvalidParams, "counts must be positive");
    if (!words_.empty() && words_.back() == words[k])
      throw Error(ErrorKind::InvalidParams, "duplicate word index " + std::to_string(words[k]));
    words_.push_back(words[k]);
    counts_.push_back(counts[k]);
    total_repetitions_ += counts[k] - 1;
  }
}

Eigen::VectorXi Document::dense_counts() const {
  Eigen::VectorXi d = Eigen::VectorXi::Zero(vocab_size_);
  for (std::size_t k = 0; k < words_.size(); ++k) d(words_[k]) = counts_[k];
  return d;
}

Eigen::VectorXi Document::support() const {
  Eigen::VectorXi e = Eigen::VectorXi::Zero(vocab_size_);
  for (auto j : words_) e(j) = 1;
  return e;
}

Eigen::VectorXi Document::repetitions() const {
  Eigen::VectorXi r = Eigen::VectorXi::Zero(vocab_size_);
  for (std::size_t k = 0; k < words_.size(); ++k) r(words_[k]) = counts_[k] - 1;
  return r;
}

Document decompose(const Eigen::Ref<const Eigen::VectorXi>& counts, bool strict) {
  if (counts.size() < 1) throw Error(ErrorKind::DimensionMismatch, "empty count vector");
  std::vector<Index> words;
  std::vector<int> values;
  for (Index j = 0; j < counts.size(); ++j) {
    if (counts(j) < 0) throw Error(ErrorKind::InvalidParams, "negative count");
    if (counts(j) > 0) {
      words.push_back(j);
      values.push_back(counts(j));
    }
  }
  if (strict && words.empty()) throw Error(ErrorKind::EmptySupport, "document has no words");
  return Document(counts.size(), std::move(words), std::move(values));
}

Corpus::Corpus(Index vocab_size, std::vector<std::vector<Document>> slices)
    : vocab_size_(vocab_size), slices_(std::move(slices)) {
  if (vocab_size_ < 1) throw Error(ErrorKind::DimensionMismatch, "vocabulary size must be >= 1");
  if (slices_.empty()) throw Error(ErrorKind::ShapeMismatch, "corpus needs at least one slice");
  for (std::size_t t = 0; t < slices_.size(); ++t) {
    if (slices_[t].empty())
      throw Error(ErrorKind::ShapeMismatch, "slice " + std::to_string(t) + " has no documents");
    for (std::size_t i = 0; i < slices_[t].size(); ++i) {
      const auto& doc = slices_[t][i];
      if (doc.vocab_size() != vocab_size_)
        throw Error(ErrorKind::DimensionMismatch, "document vocabulary size differs from corpus");
      if (doc.empty())
        throw Error(ErrorKind::EmptySupport,
                    "document " + std::to_string(i) + " of slice " + std::to_string(t));
    }
  }
}

Index Corpus::num_documents() const noexcept {
  Index n = 0;
  for (const auto& s : slices_) n += static_cast<Index>(s.size());
  return n;
}

std::vector<Index> Corpus::slice_sizes() const {
  std::vector<Index> sizes;
  for (const auto& s : slices_) sizes.push_back(static_cast<Index>(s.size()));
  return sizes;
}

Eigen::MatrixXd Corpus::support_block(Index t, Index begin, Index end) const {
  const auto& docs = slices_.at(t);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(end - begin, vocab_size_);
  for (Index i = begin; i < end; ++i)
    for (auto j : docs[i].words()) block(i - begin, j) = 1.0;
  return block;
}

Eigen::MatrixXd Corpus::repetition_block(Index t, Index begin, Index end) const {
  const auto& docs = slices_.at(t);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(end - begin, vocab_size_);
  for (Index i = begin; i < end; ++i) {
    auto words = docs[i].words();
    auto counts = docs[i].counts();
    for (std::size_t k = 0; k < words.size(); ++k) block(i - begin, words[k]) = counts[k] - 1;
  }
  return block;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> Corpus::stacked_support() const {
  std::vector<Eigen::Triplet<double>> triplets;
  Index row = 0;
  for (const auto& slice : slices_)
    for (const auto& doc : slice) {
      for (auto j : doc.words()) triplets.emplace_back(row, j, 1.0);
      ++row;
    }
  Eigen::SparseMatrix<double, Eigen::RowMajor> e(row, vocab_size_);
  e.setFromTriplets(triplets.begin(), triplets.end());
  return e;
}

}  // namespace hypertopic
