#pragma once

#include "hypertopic/document.hpp"
#include "hypertopic/factor_model.hpp"
#include "hypertopic/projections.hpp"
#include "hypertopic/random.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace hypertopic::testing {

inline Eigen::VectorXd uniform_vector(Rng& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline Eigen::MatrixXd uniform_matrix(Rng& rng, Index rows, Index cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

/// Small corpus with random supports (at least one word) and repetition counts.
inline Corpus random_corpus(Rng& rng, const std::vector<Index>& sizes, Index p, int max_count = 4) {
  std::bernoulli_distribution on(0.4);
  std::uniform_int_distribution<int> count(1, max_count);
  std::uniform_int_distribution<Index> word(0, p - 1);
  std::vector<std::vector<Document>> slices;
  for (Index n : sizes) {
    std::vector<Document> docs;
    for (Index i = 0; i < n; ++i) {
      Eigen::VectorXi d = Eigen::VectorXi::Zero(p);
      for (Index j = 0; j < p; ++j)
        if (on(rng)) d(j) = count(rng);
      if (d.sum() == 0) d(word(rng)) = count(rng);
      docs.push_back(decompose(d));
    }
    slices.push_back(std::move(docs));
  }
  return Corpus(p, std::move(slices));
}

/// Feasible parameters strictly inside every box constraint.
inline ModelParams random_interior_params(Rng& rng, const std::vector<Index>& sizes, Index p, Index K,
                                          const FeasibleBounds& bounds = {}) {
  ModelParams params{{}, bounds, K};
  for (Index n : sizes) {
    TimeSliceParams sp;
    sp.W = uniform_matrix(rng, n, K, 0.2, 1.0);
    for (Index i = 0; i < n; ++i) sp.W.row(i) /= sp.W.row(i).sum();
    sp.P = uniform_matrix(rng, p, K, bounds.lp + 0.05, bounds.up - 0.05);
    sp.A = uniform_matrix(rng, p, K, 0.5, 1.5);
    for (Index k = 0; k < K; ++k) sp.A.col(k) *= static_cast<double>(p) / sp.A.col(k).sum();
    sp.A = project_columns_capped(sp.A, bounds.la, bounds.ua, static_cast<double>(p));
    params.slices.push_back(std::move(sp));
  }
  return params;
}

inline Permutation random_permutation(Rng& rng, Index K) {
  std::vector<Index> src(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) src[k] = k;
  std::shuffle(src.begin(), src.end(), rng);
  return Permutation(src);
}

// Each slice holds `docs_per_topic` documents per topic; a topic-k document
// uses every word of block k (words [k b, (k+1) b)) once, plus each other
// word with probability `noise`. With noise = 0 the support matrix has
// exactly K singular values, all equal to sqrt(T docs_per_topic b).
inline Corpus block_corpus(Rng& rng, Index T, Index K, Index docs_per_topic, Index block, Index p,
                           double noise = 0.0) {
  std::bernoulli_distribution extra(noise);
  std::vector<std::vector<Document>> slices;
  for (Index t = 0; t < T; ++t) {
    std::vector<Document> docs;
    for (Index k = 0; k < K; ++k)
      for (Index i = 0; i < docs_per_topic; ++i) {
        Eigen::VectorXi d = Eigen::VectorXi::Zero(p);
        for (Index j = 0; j < p; ++j) d(j) = (j >= k * block && j < (k + 1) * block) || (noise > 0 && extra(rng));
        d(k * block) += 1 + i % 3;
        docs.push_back(decompose(d));
      }
    slices.push_back(std::move(docs));
  }
  return Corpus(p, std::move(slices));
}

}  // namespace hypertopic::testing
