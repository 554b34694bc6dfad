#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypertopic/error.hpp"
#include "hypertopic/io.hpp"
#include "hypertopic/synthgen.hpp"

#include "support.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

using namespace hypertopic;

namespace {

SynthConfig small_config() {
  SynthConfig c;
  c.K = 3;
  c.T = 4;
  c.n_t = 40;
  c.p = 60;
  c.seed = 7;
  return c;
}

Eigen::VectorXd ranks(const Eigen::VectorXd& x) {
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return x(a) < x(b); });
  Eigen::VectorXd r(x.size());
  for (Index i = 0; i < x.size();) {
    Index j = i;
    while (j + 1 < x.size() && x(idx[j + 1]) == x(idx[i])) ++j;
    for (Index m = i; m <= j; ++m) r(idx[m]) = 0.5 * (i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd ra = ranks(a).array() - ranks(a).mean(), rb = ranks(b).array() - ranks(b).mean();
  return (ra * rb).sum() / std::sqrt((ra * ra).sum() * (rb * rb).sum());
}

std::string corpus_bytes(const Corpus& c) {
  std::ostringstream out;
  write_corpus(out, c);
  return out.str();
}

}  // namespace

TEST_CASE("truth is feasible and shaped") {
  for (auto design : {Design::Theta0, Design::Theta1})
    for (auto regime : {Regime::Aligned, Regime::Misaligned}) {
      SynthConfig c = small_config();
      c.design = design;
      c.regime = regime;
      const SynthInstance inst = generate(c, 0);
      CHECK_NOTHROW(inst.truth.validate());
      CHECK_NOTHROW(inst.truth.validate_against(inst.corpus));
      CHECK(inst.corpus.num_slices() == 4);
      CHECK(inst.corpus.num_documents() == 160);
      CHECK(inst.labels.size() == 4);
    }
}

TEST_CASE("zero drift copies slices") {
  SynthConfig c = small_config();
  c.sigma = 0.0;
  const SynthInstance inst = generate(c, 0);
  for (Index t = 1; t < c.T; ++t) {
    CHECK(inst.truth.slices[t].P == inst.truth.slices[0].P);
    CHECK(inst.truth.slices[t].A == inst.truth.slices[0].A);
  }
  c.sigma = 0.3;
  const SynthInstance drift = generate(c, 0);
  CHECK(drift.truth.slices[1].P != drift.truth.slices[0].P);
}

TEST_CASE("regimes tie repetition to occurrence") {
  for (int seed = 0; seed < 10; ++seed) {
    SynthConfig c = small_config();
    c.K = 1;
    c.sigma = 0.0;
    c.seed = static_cast<std::uint64_t>(seed);
    c.regime = Regime::Misaligned;
    const auto mis = generate(c, 0).truth.slices[0];
    CHECK(spearman(mis.P.col(0), mis.A.col(0)) <= 0.0);
    c.regime = Regime::Aligned;
    const auto al = generate(c, 0).truth.slices[0];
    CHECK(spearman(al.P.col(0), al.A.col(0)) >= 0.0);
  }
}

TEST_CASE("designs control active topics") {
  SynthConfig c = small_config();
  c.K = 4;
  c.T = 5;
  c.design = Design::Theta1;
  const SynthInstance inst = generate(c, 1);
  for (Index t = 0; t < c.T; ++t) {
    const auto off = inactive_topics(c, t);
    if (t < 3) CHECK(off == std::vector<Index>{2, 3});
    else CHECK(off.empty());
    for (Index k = 0; k < c.K; ++k) {
      const bool is_off = std::find(off.begin(), off.end(), k) != off.end();
      CHECK((inst.truth.slices[t].W.col(k).sum() == 0.0) == is_off);
    }
  }
  c.K = 2;
  CHECK(inactive_topics(c, 0) == std::vector<Index>{1});
  c.design = Design::Theta0;
  for (Index t = 0; t < c.T; ++t) CHECK(inactive_topics(c, t).empty());
}

TEST_CASE("repetitions follow the rho rule") {
  SynthConfig c = small_config();
  for (double rho : {0.5, 1.0, 2.5}) {
    c.rho = rho;
    const SynthInstance inst = generate(c, 0);
    for (Index t = 0; t < c.T; ++t)
      for (const auto& d : inst.corpus.slice(t)) {
        CHECK_FALSE(d.empty());
        CHECK(d.total_repetitions() == round_half_up(rho * static_cast<double>(d.support_size())));
      }
  }
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(0.49) == 0);

  c.rho = 0.0;
  CHECK_THROWS_AS(generate(c, 0), Error);
  c.allow_rho_outside_guards = true;
  const SynthInstance binary = generate(c, 0);
  for (const auto& d : binary.corpus.slice(0)) CHECK(d.total_repetitions() == 0);
}

TEST_CASE("generation is deterministic per seed and replicate") {
  const SynthConfig c = small_config();
  CHECK(corpus_bytes(generate(c, 3).corpus) == corpus_bytes(generate(c, 3).corpus));
  CHECK(corpus_bytes(generate(c, 3).corpus) != corpus_bytes(generate(c, 4).corpus));
  SynthConfig other = c;
  other.seed = 8;
  CHECK(corpus_bytes(generate(c, 3).corpus) != corpus_bytes(generate(other, 3).corpus));
}

TEST_CASE("labels are the dominant true topics") {
  const SynthInstance inst = generate(small_config(), 0);
  for (Index t = 0; t < 4; ++t)
    for (Index i = 0; i < 40; ++i) {
      Index k = 0;
      inst.truth.slices[t].W.row(i).maxCoeff(&k);
      CHECK(inst.labels[t][i] == k);
    }
}

TEST_CASE("activation frequencies match the conditioned Bernoulli layer") {
  SynthConfig c;
  c.K = 1;
  c.T = 1;
  c.p = 20;
  c.n_t = 20000;
  Rng rng(9);
  ModelParams truth{{}, c.bounds, 1};
  TimeSliceParams sp;
  sp.W = Eigen::MatrixXd::Ones(c.n_t, 1);
  sp.P = testing::uniform_vector(rng, c.p, 0.01, 0.15);
  sp.A = Eigen::VectorXd::Ones(c.p);
  truth.slices.push_back(sp);
  const SynthInstance inst = sample_corpus(truth, c, rng);

  const Eigen::ArrayXd q = sp.P.col(0).array();
  const double nonempty = 1.0 - (1.0 - q).prod();
  Eigen::ArrayXd freq = Eigen::ArrayXd::Zero(c.p);
  for (const auto& d : inst.corpus.slice(0))
    for (Index j : d.words()) freq(j) += 1.0;
  freq /= static_cast<double>(c.n_t);
  for (Index j = 0; j < c.p; ++j) {
    const double expected = q(j) / nonempty;
    const double se = std::sqrt(expected * (1 - expected) / c.n_t);
    CHECK(std::abs(freq(j) - expected) < 3.5 * se);
  }
}

TEST_CASE("document weights span every active topic") {
  SynthConfig c = small_config();
  c.n_t = 100;
  const SynthInstance inst = generate(c, 0);
  for (const auto& sp : inst.truth.slices) {
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(sp.W).singularValues();
    CHECK(sv(c.K - 1) > 0.1 * sv(0));
  }
}

TEST_CASE("config validation") {
  SynthConfig c = small_config();
  c.K = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.sigma = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.K = 100;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(parse_regime("misaligned") == Regime::Misaligned);
  CHECK(parse_design("theta1") == Design::Theta1);
  CHECK_THROWS_AS(parse_regime("sideways"), Error);
  CHECK(to_string(Design::Theta0) == "theta0");
}
