#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypertopic/config.hpp"
#include "hypertopic/error.hpp"
#include "hypertopic/io.hpp"
#include "hypertopic/synthgen.hpp"

#include "support.hpp"

#include <sstream>

using namespace hypertopic;

namespace {

std::string corpus_text(const Corpus& c) {
  std::ostringstream out;
  write_corpus(out, c);
  return out.str();
}

std::string model_text(const ModelFile& m) {
  std::ostringstream out;
  write_model(out, m);
  return out.str();
}

Error parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_corpus(in, "mem");
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected a parse failure");
  return Error(ErrorKind::ParseError, "");
}

}  // namespace

TEST_CASE("corpus fixture loads") {
  const Corpus c = read_corpus(std::filesystem::path(HYPERTOPIC_TEST_DATA) / "tiny.tsv");
  CHECK(c.vocab_size() == 8);
  CHECK(c.num_slices() == 2);
  CHECK(c.slice_sizes() == std::vector<Index>{3, 3});
  CHECK(c.slice(0)[0].dense_counts()(0) == 3);
}

TEST_CASE("corpus round trip is byte identical") {
  Rng rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    const Corpus c = testing::random_corpus(rng, {5, 7, 3}, 11, 5);
    const std::string text = corpus_text(c);
    std::istringstream in(text);
    const Corpus back = read_corpus(in);
    CHECK(corpus_text(back) == text);
    for (Index t = 0; t < 3; ++t)
      for (Index i = 0; i < c.slice_size(t); ++i)
        CHECK(back.slice(t)[i].dense_counts() == c.slice(t)[i].dense_counts());
  }
}

TEST_CASE("corpus reader accepts comments and any triplet order") {
  std::istringstream in(
      "#hypertopic-corpus v1 p=3 T=1\n"
      "# comment\n"
      "\n"
      "0 1 2 1\n"
      "0\t0\t1\t2\n");
  const Corpus c = read_corpus(in);
  CHECK(c.slice_size(0) == 2);
  CHECK(c.slice(0)[0].dense_counts() == Eigen::Vector3i(0, 2, 0));
}

TEST_CASE("corpus errors carry line numbers") {
  CHECK(std::string(parse_error("garbage\n").what()).find("mem:1:") != std::string::npos);
  CHECK(std::string(parse_error("#hypertopic-corpus v1 p=3 T=1\n0\t0\t5\t1\n").what()).find("mem:2:") !=
        std::string::npos);
  CHECK(std::string(parse_error("#hypertopic-corpus v1 p=3 T=1\n0\t0\t1\t1\n0\t0\t1\t2\n").what())
            .find("mem:3: duplicate") != std::string::npos);
  CHECK(std::string(parse_error("#hypertopic-corpus v1 p=3 T=1\n0\t0\t1\t0\n").what()).find("mem:2:") !=
        std::string::npos);
  CHECK(std::string(parse_error("#hypertopic-corpus v1 p=3 T=1\n0\t0\t1\n").what()).find("mem:2:") !=
        std::string::npos);
  CHECK(parse_error("#hypertopic-corpus v1 p=3 T=2\n0\t0\t1\t1\n").kind() == ErrorKind::ParseError);
  CHECK(parse_error("#hypertopic-corpus v1 p=3 T=1\n0\t1\t1\t1\n").kind() == ErrorKind::EmptySupport);
  CHECK_THROWS_AS(read_corpus(std::filesystem::path("/nonexistent/corpus.tsv")), Error);
}

TEST_CASE("labels") {
  const std::vector<Index> sizes{3, 3};
  const auto labels = read_labels(std::filesystem::path(HYPERTOPIC_TEST_DATA) / "tiny_labels.tsv", sizes);
  CHECK(labels == std::vector<std::vector<int>>{{0, 0, 1}, {0, 1, 1}});
  std::ostringstream out;
  write_labels(out, labels);
  std::istringstream in(out.str());
  CHECK(read_labels(in, sizes) == labels);

  std::istringstream missing("0\t0\t1\n");
  CHECK_THROWS_AS(read_labels(missing, {2}), Error);
  std::istringstream twice("0\t0\t1\n0\t0\t1\n");
  CHECK_THROWS_AS(read_labels(twice, {1}), Error);
}

TEST_CASE("vocabulary round trip") {
  const auto path = std::filesystem::temp_directory_path() / "hypertopic_test_vocab.txt";
  const std::vector<std::string> vocab{"alpha", "beta", "gamma"};
  write_vocabulary(path, vocab);
  CHECK(read_vocabulary(path) == vocab);
  std::filesystem::remove(path);
}

TEST_CASE("model round trip") {
  SynthConfig cfg;
  cfg.K = 3;
  cfg.T = 2;
  cfg.n_t = 10;
  cfg.p = 20;
  ModelFile m{generate(cfg, 0).truth, {{"kind", "truth"}, {"seed", "0"}}};
  const std::string first = model_text(m);
  std::istringstream in(first);
  const ModelFile back = read_model(in);
  CHECK(back.meta == m.meta);
  CHECK(back.params.K == 3);
  CHECK(back.params.bounds == m.params.bounds);
  for (Index t = 0; t < 2; ++t) {
    CHECK((back.params.slices[t].W - m.params.slices[t].W).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((back.params.slices[t].A - m.params.slices[t].A).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(model_text(back) == first);
}

TEST_CASE("infeasible or malformed models are rejected") {
  Rng rng(2);
  ModelFile m{testing::random_interior_params(rng, {3}, 5, 2), {}};
  m.params.slices[0].W(0, 0) += 0.5;
  std::istringstream bad(model_text(m));
  try {
    read_model(bad, "m");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("infeasible") != std::string::npos);
  }
  std::istringstream header("#hypertopic-model v2\n");
  CHECK_THROWS_AS(read_model(header), Error);
  m.params.slices[0].W(0, 0) -= 0.5;
  std::string text = model_text(m);
  text.resize(text.size() / 2);
  std::istringstream truncated(text);
  CHECK_THROWS_AS(read_model(truncated), Error);
}

TEST_CASE("config maps") {
  std::istringstream in("# settings\nK=4\n tau_p = 0.5 \n\nbacktracking=false\n");
  ConfigMap map = ConfigMap::parse(in);
  CHECK(map.get_int("K", 0) == 4);
  CHECK(map.get_double("tau_p", 0) == 0.5);
  CHECK_FALSE(map.get_bool("backtracking", true));
  CHECK(map.get_string("missing", "x") == "x");
  CHECK(map.canonical() == "K=4\nbacktracking=false\ntau_p=0.5\n");
  CHECK_NOTHROW(map.check_keys(solver_keys()));

  const SolverConfig s = solver_config_from(map);
  CHECK(s.K == 4);
  CHECK(s.tau_p == 0.5);
  CHECK_FALSE(s.backtracking);
  CHECK(s.tau_a == SolverConfig{}.tau_a);

  map.set("K", "7");
  CHECK(solver_config_from(map).K == 7);

  map.set("bogus", "1");
  try {
    map.check_keys(solver_keys());
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigInvalid);
  }

  ConfigMap bad;
  bad.set("K", "four");
  CHECK_THROWS_AS(solver_config_from(bad), Error);
  std::istringstream broken("K\n");
  CHECK_THROWS_AS(ConfigMap::parse(broken), Error);

  ConfigMap synth;
  synth.set("regime", "misaligned");
  synth.set("design", "theta1");
  CHECK(synth_config_from(synth).regime == Regime::Misaligned);
  ConfigMap rank;
  rank.set("delta", "0.1");
  CHECK(rank_config_from(rank).delta == 0.1);
}

TEST_CASE("config hash") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  ConfigMap a, b;
  a.set("x", "1");
  a.set("y", "2");
  b.set("y", "2");
  b.set("x", "1");
  CHECK(fnv1a(a.canonical()) == fnv1a(b.canonical()));
}
