#include "hypertopic/alignment.hpp"

#include "hypertopic/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace hypertopic {

namespace {

// Squared distances between every column of `a` and every column of `b`.
Eigen::MatrixXd column_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::VectorXd a2 = a.colwise().squaredNorm().transpose();
  const Eigen::VectorXd b2 = b.colwise().squaredNorm().transpose();
  Eigen::MatrixXd d = -2.0 * a.transpose() * b;
  d.colwise() += a2;
  d.rowwise() += b2.transpose();
  return d.cwiseMax(0.0);
}

// Kuhn's augmenting path search restricted to allowed edges.
bool augment(Index row, const std::vector<std::vector<char>>& allowed, std::vector<Index>& col_owner,
             std::vector<char>& visited) {
  for (std::size_t c = 0; c < allowed[row].size(); ++c) {
    if (!allowed[row][c] || visited[c]) continue;
    visited[c] = 1;
    if (col_owner[c] < 0 || augment(col_owner[c], allowed, col_owner, visited)) {
      col_owner[c] = row;
      return true;
    }
  }
  return false;
}

bool has_perfect_matching(const std::vector<std::vector<char>>& allowed, Index first_row) {
  const std::size_t k = allowed.size();
  std::vector<Index> owner(k, -1);
  for (std::size_t r = static_cast<std::size_t>(first_row); r < k; ++r) {
    std::vector<char> visited(k, 0);
    if (!augment(static_cast<Index>(r), allowed, owner, visited)) return false;
  }
  return true;
}

}  // namespace

Assignment hungarian(const Eigen::Ref<const Eigen::MatrixXd>& cost) {
  const Index k = cost.rows();
  if (k < 1 || cost.cols() != k) throw Error(ErrorKind::ShapeMismatch, "cost matrix must be square, K >= 1");
  if (!cost.allFinite()) throw Error(ErrorKind::InvalidParams, "cost matrix must be finite");

  // Shortest augmenting path with potentials; 1-based with a sentinel column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<Index> match(k + 1, 0), way(k + 1, 0);
  for (Index i = 1; i <= k; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = match[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= k; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  // Every optimal matching uses only tight edges of the optimal dual, so the
  // lexicographically smallest optimum is a greedy pick over tight edges that
  // keeps a perfect matching available.
  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double tight_tol = 1e-10 * scale;
  std::vector<std::vector<char>> allowed(k, std::vector<char>(k, 0));
  for (Index r = 0; r < k; ++r)
    for (Index c = 0; c < k; ++c)
      allowed[r][c] = std::abs(cost(r, c) - u[r + 1] - v[c + 1]) <= tight_tol;

  Assignment out;
  out.row_to_col.assign(k, -1);
  bool consistent = has_perfect_matching(allowed, 0);
  for (Index r = 0; r < k && consistent; ++r) {
    bool placed = false;
    for (Index c = 0; c < k; ++c) {
      if (!allowed[r][c]) continue;
      auto trial = allowed;
      trial[r].assign(k, 0);
      trial[r][c] = 1;
      for (Index rr = r + 1; rr < k; ++rr) trial[rr][c] = 0;
      if (has_perfect_matching(trial, r)) {
        allowed = std::move(trial);
        out.row_to_col[r] = c;
        placed = true;
        break;
      }
    }
    consistent = placed;
  }
  if (!consistent) {
    // numerically degenerate duals: fall back to the raw Hungarian matching
    for (Index j = 1; j <= k; ++j) out.row_to_col[match[j] - 1] = j - 1;
  }
  for (Index r = 0; r < k; ++r) out.cost += cost(r, out.row_to_col[r]);
  return out;
}

Permutation permutation_from_cost(const Eigen::Ref<const Eigen::MatrixXd>& cost, double* total) {
  Assignment a = hungarian(cost);
  if (total) *total = a.cost;
  // estimate column k goes to position row_to_col[k]
  std::vector<Index> source(a.row_to_col.size());
  for (std::size_t k = 0; k < a.row_to_col.size(); ++k)
    source[static_cast<std::size_t>(a.row_to_col[k])] = static_cast<Index>(k);
  return Permutation(std::move(source));
}

AlignmentResult align_sequential(const ModelParams& params, double tau_p, double tau_a) {
  if (params.slices.empty()) throw Error(ErrorKind::ShapeMismatch, "no slices to align");
  AlignmentResult out;
  out.perms.push_back(Permutation::identity(params.K));
  Eigen::MatrixXd prev_p = params.slices[0].P;
  Eigen::MatrixXd prev_a = params.slices[0].A;
  for (Index t = 1; t < params.num_slices(); ++t) {
    const auto& sp = params.slices[t];
    const Eigen::MatrixXd cost =
        tau_p * column_distances(sp.P, prev_p) + tau_a * column_distances(sp.A, prev_a);
    double c = 0.0;
    Permutation o = permutation_from_cost(cost, &c);
    out.cost += c;
    prev_p = o.apply_columns(sp.P);
    prev_a = o.apply_columns(sp.A);
    out.perms.push_back(std::move(o));
  }
  return out;
}

double squared_operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXd gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().maxCoeff());
}

BlockWeights operator_norm_weights(const TimeSliceParams& truth) {
  const double w = squared_operator_norm(truth.W);
  return {squared_operator_norm(truth.P) + squared_operator_norm(truth.A), w, w};
}

std::vector<BlockWeights> operator_norm_weights(const ModelParams& truth) {
  std::vector<BlockWeights> out;
  for (const auto& s : truth.slices) out.push_back(operator_norm_weights(s));
  return out;
}

OracleAlignment oracle_align(const ModelParams& est, const ModelParams& truth,
                             const std::vector<BlockWeights>& weights) {
  if (est.num_slices() != truth.num_slices() || est.K != truth.K ||
      weights.size() != truth.slices.size())
    throw Error(ErrorKind::ShapeMismatch, "estimate, truth and weights disagree in T or K");
  OracleAlignment out;
  for (Index t = 0; t < truth.num_slices(); ++t) {
    const auto& e = est.slices[t];
    const auto& s = truth.slices[t];
    if (e.W.rows() != s.W.rows() || e.P.rows() != s.P.rows() || e.W.cols() != s.W.cols())
      throw Error(ErrorKind::ShapeMismatch, "slice shapes differ");
    const auto& kw = weights[t];
    const Eigen::MatrixXd cost = kw.w * column_distances(e.W, s.W) +
                                 kw.p * column_distances(e.P, s.P) +
                                 kw.a * column_distances(e.A, s.A);
    Permutation r = permutation_from_cost(cost);
    const auto aligned = e.permuted(r);
    // recompute from the aligned blocks so the value carries no expansion error
    const double err = kw.w * (aligned.W - s.W).squaredNorm() + kw.p * (aligned.P - s.P).squaredNorm() +
                       kw.a * (aligned.A - s.A).squaredNorm();
    out.per_slice.push_back(err);
    out.error += err;
    out.alignment.cost += err;
    out.alignment.perms.push_back(std::move(r));
  }
  return out;
}

}  // namespace hypertopic
