#include "hypertopic/svd.hpp"

#include "hypertopic/error.hpp"
#include "hypertopic/random.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>

namespace hypertopic {

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, Eigen::Index rank,
                           Eigen::Index oversample, std::uint64_t seed, double tol, int max_iters) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = a.cols();
  const Eigen::Index full = std::min(n, p);
  if (rank < 1 || full < 1) throw Error(ErrorKind::InvalidParams, "truncated SVD needs rank >= 1");
  rank = std::min(rank, full);
  const Eigen::Index width = std::min(rank + std::max<Eigen::Index>(oversample, 0), full);

  TruncatedSvd out;
  if (width >= full) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.singular_values = svd.singularValues().head(rank);
    out.U = svd.matrixU().leftCols(rank);
    out.V = svd.matrixV().leftCols(rank);
    return out;
  }

  Rng rng = derive_stream(seed, {0x5fdULL});
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd omega(p, width);
  for (Eigen::Index j = 0; j < omega.cols(); ++j)
    for (Eigen::Index i = 0; i < omega.rows(); ++i) omega(i, j) = normal(rng);

  Eigen::MatrixXd q = orthonormalize(a * omega);
  Eigen::VectorXd previous = Eigen::VectorXd::Zero(rank);
  Eigen::JacobiSVD<Eigen::MatrixXd> small;
  for (int it = 1; it <= max_iters; ++it) {
    const Eigen::MatrixXd z = orthonormalize(a.transpose() * q);
    q = orthonormalize(a * z);
    const Eigen::MatrixXd b = q.transpose() * a;  // width x p
    small.compute(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd current = small.singularValues().head(rank);
    out.iterations = it;
    const double change = (current - previous).cwiseAbs().maxCoeff();
    previous = current;
    if (change <= tol * std::max(1.0, current(0))) break;
  }
  out.singular_values = previous;
  out.U = q * small.matrixU().leftCols(rank);
  out.V = small.matrixV().leftCols(rank);
  return out;
}

}  // namespace hypertopic
