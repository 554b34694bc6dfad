#include "hypertopic/synthgen.hpp"

#include "hypertopic/error.hpp"
#include "hypertopic/hmultinomial.hpp"
#include "hypertopic/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hypertopic {

namespace {

Eigen::VectorXd repetition_from_occurrence(const Eigen::VectorXd& occ, Regime regime,
                                           const FeasibleBounds& b) {
  const Index p = occ.size();
  Eigen::VectorXd raw = occ * (static_cast<double>(p) / occ.sum());
  if (regime == Regime::Misaligned) {
    // hand the largest intensity to the least frequent word and so on
    std::vector<Index> order(p);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) { return occ(a) > occ(c); });
    Eigen::VectorXd sorted_desc(p);
    for (Index m = 0; m < p; ++m) sorted_desc(m) = raw(order[m]);
    for (Index m = 0; m < p; ++m) raw(order[m]) = sorted_desc(p - 1 - m);
  }
  return project_capped_simplex(raw, b.la, b.ua, static_cast<double>(p));
}

}  // namespace

std::string to_string(Regime r) { return r == Regime::Aligned ? "aligned" : "misaligned"; }
std::string to_string(Design d) { return d == Design::Theta0 ? "theta0" : "theta1"; }

Regime parse_regime(const std::string& s) {
  if (s == "aligned") return Regime::Aligned;
  if (s == "misaligned") return Regime::Misaligned;
  throw Error(ErrorKind::ConfigInvalid, "unknown regime '" + s + "'");
}

Design parse_design(const std::string& s) {
  if (s == "theta0" || s == "0") return Design::Theta0;
  if (s == "theta1" || s == "1") return Design::Theta1;
  throw Error(ErrorKind::ConfigInvalid, "unknown design '" + s + "'");
}

long long round_half_up(double x) { return static_cast<long long>(std::floor(x + 0.5)); }

void SynthConfig::validate() const {
  bounds.validate();
  if (K < 1 || T < 1 || n_t < 1 || p < 1) throw Error(ErrorKind::ConfigInvalid, "K, T, n_t, p must be >= 1");
  if (K > p) throw Error(ErrorKind::ConfigInvalid, "K must not exceed p");
  if (!(sigma >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "sigma must be >= 0");
  if (replicates < 0) throw Error(ErrorKind::ConfigInvalid, "replicates must be >= 0");
  if (!(doc_concentration > 0.0) || !(word_concentration > 0.0))
    throw Error(ErrorKind::ConfigInvalid, "Dirichlet concentrations must be > 0");
  if (!(rho_min > 0.0 && rho_min <= rho_max)) throw Error(ErrorKind::ConfigInvalid, "need 0 < rho_min <= rho_max");
  if (!(rho >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "rho must be >= 0");
  if (!allow_rho_outside_guards && !heterogeneous_rho && (rho < rho_min || rho > rho_max))
    throw Error(ErrorKind::ConfigInvalid, "rho outside [rho_min, rho_max]");
}

std::vector<Index> inactive_topics(const SynthConfig& config, Index t) {
  std::vector<Index> off;
  if (config.design != Design::Theta1) return off;
  const Index early = (config.T + 1) / 2;  // ceil(T/2) windows, 1-based t <= early
  if (t + 1 > early) return off;
  // topics K-1 and K (1-based) sleep early on; topic 1 always stays active
  for (Index k = std::max<Index>(1, config.K - 2); k < config.K; ++k) off.push_back(k);
  return off;
}

ModelParams make_truth(const SynthConfig& config, Rng& rng) {
  config.validate();
  const auto& b = config.bounds;
  const Index p = config.p;
  const Index k = config.K;

  Eigen::MatrixXd base_p(p, k);
  const Eigen::VectorXd word_alpha = Eigen::VectorXd::Constant(p, config.word_concentration);
  for (Index c = 0; c < k; ++c) {
    const Eigen::VectorXd x = sample_dirichlet(rng, word_alpha);
    base_p.col(c) = (b.lp + (b.up - b.lp) * (x.array() / x.maxCoeff())).matrix();
  }
  Eigen::MatrixXd base_a(p, k);
  for (Index c = 0; c < k; ++c) base_a.col(c) = repetition_from_occurrence(base_p.col(c), config.regime, b);

  std::normal_distribution<double> normal(0.0, 1.0);
  ModelParams truth{{}, b, k};
  const Eigen::VectorXd doc_alpha = Eigen::VectorXd::Constant(k, config.doc_concentration);
  for (Index t = 0; t < config.T; ++t) {
    TimeSliceParams sp;
    if (config.sigma == 0.0) {
      sp.P = base_p;
      sp.A = base_a;
    } else {
      sp.P.resize(p, k);
      sp.A.resize(p, k);
      for (Index c = 0; c < k; ++c)
        for (Index j = 0; j < p; ++j) {
          const double logit = std::log(base_p(j, c) / (1.0 - base_p(j, c))) + config.sigma * normal(rng);
          sp.P(j, c) = 1.0 / (1.0 + std::exp(-logit));
          sp.A(j, c) = base_a(j, c) * std::exp(config.sigma * normal(rng));
        }
      sp.P = project_box(sp.P, b.lp, b.up);
      for (Index c = 0; c < k; ++c) {
        sp.A.col(c) *= static_cast<double>(p) / sp.A.col(c).sum();
        sp.A.col(c) = project_capped_simplex(sp.A.col(c), b.la, b.ua, static_cast<double>(p));
      }
    }

    const auto off = inactive_topics(config, t);
    Eigen::VectorXd alpha = doc_alpha;
    for (auto c : off) alpha(c) = 0.0;
    std::vector<Index> on;
    for (Index c = 0; c < k; ++c)
      if (alpha(c) > 0.0) on.push_back(c);
    Eigen::VectorXd sub_alpha(static_cast<Index>(on.size()));
    for (std::size_t m = 0; m < on.size(); ++m) sub_alpha(static_cast<Index>(m)) = alpha(on[m]);

    sp.W = Eigen::MatrixXd::Zero(config.n_t, k);
    for (Index i = 0; i < config.n_t; ++i) {
      const Eigen::VectorXd w = sample_dirichlet(rng, sub_alpha);
      for (std::size_t m = 0; m < on.size(); ++m) sp.W(i, on[m]) = w(static_cast<Index>(m));
    }
    truth.slices.push_back(std::move(sp));
  }
  return truth;
}

SynthInstance sample_corpus(const ModelParams& truth, const SynthConfig& config, Rng& rng, int replicate) {
  config.validate();
  const Index p = truth.vocab_size();
  std::uniform_real_distribution<double> rho_draw(config.rho_min, config.rho_max);
  std::vector<std::vector<Document>> slices;
  std::vector<std::vector<int>> labels;
  for (const auto& sp : truth.slices) {
    std::vector<Document> docs;
    std::vector<int> slice_labels;
    docs.reserve(static_cast<std::size_t>(sp.num_docs()));
    for (Index i = 0; i < sp.num_docs(); ++i) {
      const Eigen::VectorXd w = sp.W.row(i).transpose();
      const Eigen::VectorXd q = sp.P * w;
      Eigen::VectorXd lambda = sp.A * w;
      lambda *= static_cast<double>(p) / lambda.sum();

      const Eigen::VectorXi e = sample_support(q, rng, true);
      const double rho = config.heterogeneous_rho ? rho_draw(rng) : config.rho;
      const long long s = round_half_up(rho * e.sum());
      const Eigen::VectorXi r = sample_repetitions(lambda, e, s, rng);
      docs.push_back(decompose(e + r, true));

      Index label = 0;
      w.maxCoeff(&label);  // first maximal index
      slice_labels.push_back(static_cast<int>(label));
    }
    slices.push_back(std::move(docs));
    labels.push_back(std::move(slice_labels));
  }
  SynthInstance inst{Corpus(p, std::move(slices)), truth, labels, config, replicate};
  inst.corpus.labels = std::move(labels);
  return inst;
}

SynthInstance generate(const SynthConfig& config, int replicate) {
  Rng rng = derive_stream(config.seed, {0x73796eULL, static_cast<std::uint64_t>(replicate)});
  ModelParams truth = make_truth(config, rng);
  return sample_corpus(truth, config, rng, replicate);
}

}  // namespace hypertopic
