#include "hypertopic/factor_model.hpp"

#include "hypertopic/error.hpp"
#include "hypertopic/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hypertopic {

namespace {

constexpr Index kDocBlock = 256;
constexpr double kQClamp = 1e-12;

struct SliceTerms {
  double bernoulli = 0.0;
  double multinomial = 0.0;
  SliceGradient grad;
};

// One pass over the documents of slice t in row blocks: losses and, when
// requested, the likelihood part of every gradient block. Only q = W P^T is
// formed densely; the repetition layer is evaluated on document supports.
SliceTerms slice_terms(const TimeSliceParams& sp, const Corpus& corpus, Index t, bool with_grad,
                       bool keep_sigma) {
  SliceTerms out;
  const Index n = sp.num_docs();
  const Index p = sp.vocab_size();
  const Index k = sp.num_topics();
  if (with_grad) {
    out.grad.grad_W = Eigen::MatrixXd::Zero(n, k);
    out.grad.grad_P = Eigen::MatrixXd::Zero(p, k);
    out.grad.grad_A = Eigen::MatrixXd::Zero(p, k);
    if (keep_sigma) {
      out.grad.sigma_Q.resize(n, p);
      out.grad.sigma_Lambda = Eigen::MatrixXd::Zero(n, p);
    }
  }
  const auto& docs = corpus.slice(t);
  const Eigen::MatrixXd a_rows = sp.A.transpose();  // column j is row j of A
  thread_local Eigen::MatrixXd q;
  thread_local Eigen::MatrixXd sigma_q;
  std::vector<double> lambda;

  for (Index begin = 0; begin < n; begin += kDocBlock) {
    const Index end = std::min(n, begin + kDocBlock);
    const Index rows = end - begin;
    const auto w = sp.W.middleRows(begin, rows);
    q.resize(rows, p);
    q.noalias() = w * sp.P.transpose();

    if (!q.allFinite() || (q.array() < -kQClamp).any() || (q.array() > 1.0 + kQClamp).any())
      throw Error(ErrorKind::NonFiniteLoss, "occurrence probability outside (0,1)");

    out.bernoulli -= (1.0 - q.array().max(kQClamp).min(1.0 - kQClamp)).log().sum();
    if (with_grad) sigma_q = (1.0 - q.array()).inverse().matrix();

    for (Index i = 0; i < rows; ++i) {
      const auto& doc = docs[static_cast<std::size_t>(begin + i)];
      const auto words = doc.words();
      const auto counts = doc.counts();
      const auto wi = w.row(i);
      lambda.resize(words.size());
      double mass = 0.0;
      for (std::size_t m = 0; m < words.size(); ++m) {
        const Index j = words[m];
        const double qij = std::clamp(q(i, j), kQClamp, 1.0 - kQClamp);
        out.bernoulli -= std::log(qij) - std::log(1.0 - qij);
        lambda[m] = wi.dot(a_rows.col(j));
        mass += lambda[m];
        if (with_grad) sigma_q(i, j) = -1.0 / q(i, j);
      }
      const double s = static_cast<double>(doc.total_repetitions());
      if (s == 0.0) continue;
      for (std::size_t m = 0; m < words.size(); ++m) {
        const int rij = counts[m] - 1;
        if (rij == 0) continue;
        if (!(lambda[m] > 0.0)) throw Error(ErrorKind::NonFiniteLoss, "repeated word with nonpositive intensity");
        out.multinomial -= rij * std::log(lambda[m] / mass);
      }
      if (!with_grad) continue;
      if (!(mass > 0.0)) throw Error(ErrorKind::NonFiniteGradient, "document support has zero intensity");
      auto gw = out.grad.grad_W.row(begin + i);
      for (std::size_t m = 0; m < words.size(); ++m) {
        const Index j = words[m];
        const int rij = counts[m] - 1;
        const double v = s / mass - (rij != 0 ? rij / lambda[m] : 0.0);
        gw.noalias() += v * a_rows.col(j).transpose();
        out.grad.grad_A.row(j).noalias() += v * wi;
        if (keep_sigma) out.grad.sigma_Lambda(begin + i, j) = v;
      }
    }

    if (!with_grad) continue;
    if (!sigma_q.allFinite()) throw Error(ErrorKind::NonFiniteGradient, "gradient matrix at the feasible boundary");
    out.grad.grad_W.middleRows(begin, rows).noalias() += sigma_q * sp.P;
    out.grad.grad_P.noalias() += sigma_q.transpose() * w;
    if (keep_sigma) out.grad.sigma_Q.middleRows(begin, rows) = sigma_q;
  }
  if (with_grad && !out.grad.grad_W.allFinite())
    throw Error(ErrorKind::NonFiniteGradient, "gradient is not finite");
  return out;
}

void check_perms(const ModelParams& params, const std::vector<Permutation>& perms) {
  if (static_cast<Index>(perms.size()) != params.num_slices())
    throw Error(ErrorKind::ShapeMismatch, "need one permutation per slice");
  for (const auto& o : perms)
    if (o.size() != params.K) throw Error(ErrorKind::ShapeMismatch, "permutation size differs from K");
}

void check_corpus(const ModelParams& params, const Corpus& corpus) {
  if (params.num_slices() != corpus.num_slices() || params.vocab_size() != corpus.vocab_size())
    throw Error(ErrorKind::ShapeMismatch, "model and corpus shapes differ");
  for (Index t = 0; t < corpus.num_slices(); ++t)
    if (params.slices[t].num_docs() != corpus.slice_size(t))
      throw Error(ErrorKind::ShapeMismatch, "slice size differs from corpus");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> aligned_means(const ModelParams& params,
                                                          const std::vector<Permutation>& perms) {
  const Index p = params.vocab_size();
  Eigen::MatrixXd p_bar = Eigen::MatrixXd::Zero(p, params.K);
  Eigen::MatrixXd a_bar = Eigen::MatrixXd::Zero(p, params.K);
  for (Index t = 0; t < params.num_slices(); ++t) {
    p_bar += perms[t].apply_columns(params.slices[t].P);
    a_bar += perms[t].apply_columns(params.slices[t].A);
  }
  const double inv_t = 1.0 / static_cast<double>(params.num_slices());
  return {p_bar * inv_t, a_bar * inv_t};
}

}  // namespace

void FeasibleBounds::validate() const {
  if (!(0.0 < lp && lp < up && up < 1.0))
    throw Error(ErrorKind::ConfigInvalid, "occurrence bounds need 0 < lp < up < 1");
  if (!(0.0 < la && la < 1.0 && 1.0 < ua))
    throw Error(ErrorKind::ConfigInvalid, "repetition bounds need 0 < la < 1 < ua");
}

std::vector<Index> TimeSliceParams::active_topics() const {
  std::vector<Index> active;
  for (Index k = 0; k < W.cols(); ++k)
    if (W.col(k).lpNorm<1>() > 0.0) active.push_back(k);
  return active;
}

void TimeSliceParams::validate(const FeasibleBounds& bounds) const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParams, what); };
  const Index k = W.cols();
  if (P.cols() != k || A.cols() != k || P.rows() != A.rows())
    fail("factor shapes are inconsistent");
  if (!W.allFinite() || !P.allFinite() || !A.allFinite()) fail("non-finite factor entry");
  if ((W.array() < 0.0).any() || (W.array() > 1.0).any()) fail("W entry outside [0,1]");
  for (Index i = 0; i < W.rows(); ++i)
    if (std::abs(W.row(i).sum() - 1.0) > 1e-9) fail("W row " + std::to_string(i) + " does not sum to 1");
  if ((P.array() < bounds.lp).any() || (P.array() > bounds.up).any()) fail("P entry outside [lp,up]");
  if ((A.array() < bounds.la).any() || (A.array() > bounds.ua).any()) fail("A entry outside [la,ua]");
  const double p = static_cast<double>(A.rows());
  for (Index c = 0; c < k; ++c)
    if (std::abs(A.col(c).sum() - p) > 1e-8 * p) fail("A column " + std::to_string(c) + " does not sum to p");
}

TimeSliceParams TimeSliceParams::permuted(const Permutation& o) const {
  return {o.apply_columns(W), o.apply_columns(P), o.apply_columns(A)};
}

void ModelParams::validate() const {
  bounds.validate();
  if (slices.empty()) throw Error(ErrorKind::ShapeMismatch, "model has no slices");
  const Index p = vocab_size();
  for (const auto& s : slices) {
    if (s.num_topics() != K || s.vocab_size() != p)
      throw Error(ErrorKind::ShapeMismatch, "inconsistent K or p across slices");
    s.validate(bounds);
  }
}

void ModelParams::validate_against(const Corpus& corpus) const {
  validate();
  check_corpus(*this, corpus);
}

ModelParams ModelParams::permuted(const std::vector<Permutation>& perms) const {
  check_perms(*this, perms);
  ModelParams out{{}, bounds, K};
  for (Index t = 0; t < num_slices(); ++t) out.slices.push_back(slices[t].permuted(perms[t]));
  return out;
}

std::vector<Permutation> identity_perms(const ModelParams& params) {
  return std::vector<Permutation>(params.slices.size(), Permutation::identity(params.K));
}

double loss_bernoulli(const ModelParams& params, const Corpus& corpus) {
  check_corpus(params, corpus);
  double total = 0.0;
  for (Index t = 0; t < corpus.num_slices(); ++t)
    total += slice_terms(params.slices[t], corpus, t, false, false).bernoulli;
  return total;
}

double loss_multinomial(const ModelParams& params, const Corpus& corpus) {
  check_corpus(params, corpus);
  double total = 0.0;
  for (Index t = 0; t < corpus.num_slices(); ++t)
    total += slice_terms(params.slices[t], corpus, t, false, false).multinomial;
  return total;
}

PenaltyValues temporal_penalties(const ModelParams& params, const std::vector<Permutation>& perms) {
  check_perms(params, perms);
  auto [p_bar, a_bar] = aligned_means(params, perms);
  PenaltyValues out;
  for (Index t = 0; t < params.num_slices(); ++t) {
    out.g_p += (perms[t].apply_columns(params.slices[t].P) - p_bar).squaredNorm();
    out.g_a += (perms[t].apply_columns(params.slices[t].A) - a_bar).squaredNorm();
  }
  return out;
}

ObjectiveParts evaluate_objective(const ModelParams& params, const Corpus& corpus,
                                  const std::vector<Permutation>& perms, double tau_p, double tau_a,
                                  int threads) {
  check_corpus(params, corpus);
  std::vector<SliceTerms> terms(params.slices.size());
  parallel_for(terms.size(), threads, [&](std::size_t t) {
    terms[t] = slice_terms(params.slices[t], corpus, static_cast<Index>(t), false, false);
  });
  ObjectiveParts parts;
  for (const auto& st : terms) {
    parts.bernoulli += st.bernoulli;
    parts.multinomial += st.multinomial;
  }
  parts.penalties = temporal_penalties(params, perms);
  parts.total = parts.bernoulli + parts.multinomial + tau_p * parts.penalties.g_p +
                tau_a * parts.penalties.g_a;
  if (!std::isfinite(parts.total)) throw Error(ErrorKind::NonFiniteObjective, "objective is not finite");
  return parts;
}

double objective(const ModelParams& params, const Corpus& corpus,
                 const std::vector<Permutation>& perms, double tau_p, double tau_a) {
  return evaluate_objective(params, corpus, perms, tau_p, tau_a).total;
}

ObjectiveParts evaluate_with_gradients(const ModelParams& params, const Corpus& corpus,
                                       const std::vector<Permutation>& perms, double tau_p, double tau_a,
                                       GradientBlocks& grads, GradientOptions options) {
  check_corpus(params, corpus);
  check_perms(params, perms);
  auto [p_bar, a_bar] = aligned_means(params, perms);
  const double factor = options.penalty == PenaltyGradient::Exact ? 2.0 : 1.0;

  std::vector<SliceTerms> terms(params.slices.size());
  parallel_for(terms.size(), options.threads, [&](std::size_t ts) {
    const auto& sp = params.slices[ts];
    terms[ts] = slice_terms(sp, corpus, static_cast<Index>(ts), true, options.keep_sigma);
    // d/dP_t of ||P_t O_t - Pbar||^2 is 2 (P_t O_t - Pbar) O_t^T; the cross
    // terms through Pbar cancel because the deviations sum to zero.
    const Permutation back = perms[ts].inverse();
    terms[ts].grad.grad_P += factor * tau_p * back.apply_columns(perms[ts].apply_columns(sp.P) - p_bar);
    terms[ts].grad.grad_A += factor * tau_a * back.apply_columns(perms[ts].apply_columns(sp.A) - a_bar);
  });

  ObjectiveParts parts;
  grads.slices.clear();
  for (auto& st : terms) {
    parts.bernoulli += st.bernoulli;
    parts.multinomial += st.multinomial;
    grads.slices.push_back(std::move(st.grad));
  }
  parts.penalties = temporal_penalties(params, perms);
  parts.total = parts.bernoulli + parts.multinomial + tau_p * parts.penalties.g_p +
                tau_a * parts.penalties.g_a;
  if (!std::isfinite(parts.total)) throw Error(ErrorKind::NonFiniteObjective, "objective is not finite");
  return parts;
}

GradientBlocks gradients(const ModelParams& params, const Corpus& corpus,
                         const std::vector<Permutation>& perms, double tau_p, double tau_a,
                         GradientOptions options) {
  GradientBlocks blocks;
  evaluate_with_gradients(params, corpus, perms, tau_p, tau_a, blocks, options);
  return blocks;
}

}  // namespace hypertopic
