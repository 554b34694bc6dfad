#include "hypertopic/error.hpp"
#include "hypertopic/projections.hpp"
#include "hypertopic/random.hpp"
#include "hypertopic/solver.hpp"
#include "hypertopic/svd.hpp"

#include <cmath>
#include <limits>

namespace hypertopic {

namespace {

// k-means++ seeding followed by Lloyd iterations. Returns K x d centers.
Eigen::MatrixXd kmeans(const Eigen::MatrixXd& x, Index k, Rng& rng, int iterations = 100) {
  const Index n = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  std::uniform_int_distribution<Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  Eigen::VectorXd nearest = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (Index c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      double target = unif(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= nearest(pick);
        if (target <= 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = x.row(pick);
    nearest = nearest.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<Index> label(n, -1);
  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (best != label[i]) {
        label[i] = best;
        changed = true;
      }
    }
    if (!changed && it > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Index i = 0; i < n; ++i) {
      sums.row(label[i]) += x.row(i);
      counts(label[i]) += 1.0;
    }
    for (Index c = 0; c < k; ++c)
      if (counts(c) > 0.0) centers.row(c) = sums.row(c) / counts(c);
  }
  return centers;
}

// Barycentric coordinates of each row of x relative to the center rows,
// least squares with a weighted sum-to-one row, then projected to the simplex.
Eigen::MatrixXd barycentric_weights(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers) {
  const Index k = centers.rows();
  const Index d = centers.cols();
  const double scale = std::max(1.0, centers.cwiseAbs().maxCoeff());
  Eigen::MatrixXd system(d + 1, k);
  system.topRows(d) = centers.transpose();
  system.row(d).setConstant(scale);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver(system);

  Eigen::MatrixXd w(x.rows(), k);
  Eigen::VectorXd rhs(d + 1);
  for (Index i = 0; i < x.rows(); ++i) {
    rhs.head(d) = x.row(i).transpose();
    rhs(d) = scale;
    w.row(i) = project_simplex(solver.solve(rhs)).transpose();
  }
  return w;
}

// Occurrence and repetition profiles of one slice given document weights.
// Columns without mass fall back to `fallback_p` / `fallback_a`.
void profiles(const Corpus& corpus, Index t, const Eigen::MatrixXd& w, Eigen::MatrixXd& occ,
              Eigen::MatrixXd& rep_num, Eigen::MatrixXd& rep_den, Eigen::VectorXd& mass) {
  const Index p = corpus.vocab_size();
  const Index k = w.cols();
  occ = Eigen::MatrixXd::Zero(p, k);
  rep_num = Eigen::MatrixXd::Zero(p, k);
  rep_den = Eigen::MatrixXd::Zero(p, k);
  mass = w.colwise().sum().transpose();
  const auto& docs = corpus.slice(t);
  for (Index i = 0; i < static_cast<Index>(docs.size()); ++i) {
    const auto& doc = docs[i];
    auto words = doc.words();
    auto counts = doc.counts();
    const double rho = static_cast<double>(doc.total_repetitions()) / static_cast<double>(doc.support_size());
    for (std::size_t m = 0; m < words.size(); ++m) {
      occ.row(words[m]) += w.row(i);
      if (rho > 0.0) {
        rep_num.row(words[m]) += w.row(i) * ((counts[m] - 1) / rho);
        rep_den.row(words[m]) += w.row(i);
      }
    }
  }
}

Eigen::VectorXd repetition_column(const Eigen::VectorXd& num, const Eigen::VectorXd& den,
                                  const FeasibleBounds& bounds) {
  const Index p = num.size();
  Eigen::VectorXd a(p);
  for (Index j = 0; j < p; ++j) a(j) = den(j) > 0.0 ? num(j) / den(j) : 0.0;
  const double total = a.sum();
  if (total > 0.0) {
    // words never seen repeating get the smallest observed positive rate
    double floor_rate = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < p; ++j)
      if (a(j) > 0.0) floor_rate = std::min(floor_rate, a(j));
    for (Index j = 0; j < p; ++j)
      if (a(j) <= 0.0) a(j) = floor_rate;
    a *= static_cast<double>(p) / a.sum();
  } else {
    a.setOnes();
  }
  return project_capped_simplex(a, bounds.la, bounds.ua, static_cast<double>(p));
}

ModelParams params_from_weights(const Corpus& corpus, std::vector<Eigen::MatrixXd> weights,
                                const FeasibleBounds& bounds) {
  const Index k = weights.front().cols();
  const Index p = corpus.vocab_size();
  const Index slices = corpus.num_slices();

  std::vector<Eigen::MatrixXd> occ(slices), num(slices), den(slices);
  std::vector<Eigen::VectorXd> mass(slices);
  Eigen::MatrixXd pooled_occ = Eigen::MatrixXd::Zero(p, k);
  Eigen::MatrixXd pooled_num = Eigen::MatrixXd::Zero(p, k);
  Eigen::MatrixXd pooled_den = Eigen::MatrixXd::Zero(p, k);
  Eigen::VectorXd pooled_mass = Eigen::VectorXd::Zero(k);
  for (Index t = 0; t < slices; ++t) {
    profiles(corpus, t, weights[t], occ[t], num[t], den[t], mass[t]);
    pooled_occ += occ[t];
    pooled_num += num[t];
    pooled_den += den[t];
    pooled_mass += mass[t];
  }
  const double overall = pooled_occ.sum() / std::max(1e-300, pooled_mass.sum() * static_cast<double>(p));

  ModelParams out{{}, bounds, k};
  for (Index t = 0; t < slices; ++t) {
    TimeSliceParams sp;
    sp.W = std::move(weights[t]);
    sp.P.resize(p, k);
    sp.A.resize(p, k);
    for (Index c = 0; c < k; ++c) {
      // a topic nearly absent from this slice borrows the pooled profile
      const bool local = mass[t](c) >= 1.0;
      if (local) sp.P.col(c) = occ[t].col(c) / mass[t](c);
      else if (pooled_mass(c) > 0.0) sp.P.col(c) = pooled_occ.col(c) / pooled_mass(c);
      else sp.P.col(c).setConstant(overall);
      sp.A.col(c) = local ? repetition_column(num[t].col(c), den[t].col(c), bounds)
                          : repetition_column(pooled_num.col(c), pooled_den.col(c), bounds);
    }
    sp.P = project_box(sp.P, bounds.lp, bounds.up);
    out.slices.push_back(std::move(sp));
  }
  return out;
}

void check_rank(const Corpus& corpus, Index k) {
  if (k < 1) throw Error(ErrorKind::ConfigInvalid, "K must be >= 1");
  for (Index t = 0; t < corpus.num_slices(); ++t)
    if (k > std::min(corpus.slice_size(t), corpus.vocab_size()))
      throw Error(ErrorKind::ConfigInvalid, "K exceeds min(n_t, p)");
}

}  // namespace

ModelParams init_spectral(const Corpus& corpus, Index K, const FeasibleBounds& bounds, std::uint64_t seed) {
  bounds.validate();
  check_rank(corpus, K);

  std::vector<Eigen::MatrixXd> weights;
  if (K == 1) {
    for (Index t = 0; t < corpus.num_slices(); ++t)
      weights.push_back(Eigen::MatrixXd::Ones(corpus.slice_size(t), 1));
    return params_from_weights(corpus, std::move(weights), bounds);
  }

  const auto e = corpus.stacked_support();
  const TruncatedSvd svd = truncated_svd(e, K, 10, seed);
  const double top = svd.singular_values(0);
  Index positive = 0;
  for (Index k = 0; k < svd.singular_values.size(); ++k)
    if (svd.singular_values(k) > 1e-10 * std::max(top, 1.0)) ++positive;
  if (positive < K)
    throw Error(ErrorKind::RankDeficient, "support matrix has fewer than K positive singular values");

  const Eigen::MatrixXd embedding = svd.U * svd.singular_values.asDiagonal();
  Rng rng = derive_stream(seed, {0x6b6dULL});
  const Eigen::MatrixXd centers = kmeans(embedding, K, rng);
  const Eigen::MatrixXd w = barycentric_weights(embedding, centers);

  Index row = 0;
  for (Index t = 0; t < corpus.num_slices(); ++t) {
    weights.push_back(w.middleRows(row, corpus.slice_size(t)));
    row += corpus.slice_size(t);
  }
  return params_from_weights(corpus, std::move(weights), bounds);
}

ModelParams init_random(const Corpus& corpus, Index K, const FeasibleBounds& bounds, std::uint64_t seed) {
  bounds.validate();
  check_rank(corpus, K);
  Rng rng = derive_stream(seed, {0x72616eULL});
  const Index p = corpus.vocab_size();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ModelParams out{{}, bounds, K};
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(K);
  for (Index t = 0; t < corpus.num_slices(); ++t) {
    TimeSliceParams sp;
    sp.W.resize(corpus.slice_size(t), K);
    for (Index i = 0; i < sp.W.rows(); ++i) sp.W.row(i) = sample_dirichlet(rng, ones).transpose();
    sp.P.resize(p, K);
    sp.A.resize(p, K);
    for (Index k = 0; k < K; ++k)
      for (Index j = 0; j < p; ++j) {
        sp.P(j, k) = bounds.lp + (bounds.up - bounds.lp) * unif(rng);
        sp.A(j, k) = bounds.la + (bounds.ua - bounds.la) * unif(rng);
      }
    sp.A = project_columns_capped(sp.A, bounds.la, bounds.ua, static_cast<double>(p));
    out.slices.push_back(std::move(sp));
  }
  return out;
}

}  // namespace hypertopic
