#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypertopic/io.hpp"

#include "support.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hypertopic;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string("\"") + HYPERTOPIC_CLI + "\" " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  for (std::string f; std::getline(s, f, ',');) out.push_back(f);
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hypertopic_cli_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string tiny = std::string(HYPERTOPIC_TEST_DATA) + "/tiny.tsv";
const std::string tiny_labels = std::string(HYPERTOPIC_TEST_DATA) + "/tiny_labels.tsv";

}  // namespace

TEST_CASE("version") {
  const RunResult r = run("--version");
  CHECK(r.code == 0);
  CHECK(r.output.find("hypertopic 0.1.0") != std::string::npos);
}

TEST_CASE("fit the bundled corpus") {
  TempDir dir;
  const auto start = std::chrono::steady_clock::now();
  const RunResult r = run("--quiet fit --corpus " + tiny + " -K 2 -o " + (dir / "m.model"));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(r.code == 0);
  CHECK(seconds < 1.0);

  const ModelFile m = read_model(fs::path(dir / "m.model"));
  CHECK(m.params.K == 2);
  CHECK(m.meta.contains("config_hash"));
  CHECK(m.meta.at("version") == "0.1.0");
  CHECK(m.meta.contains("iterations"));
  CHECK(m.meta.contains("final_delta"));
  CHECK(m.meta.contains("final_f"));

  const auto trace = lines(slurp(dir / "m.model.trace.csv"));
  REQUIRE(trace.size() >= 3);
  CHECK(trace[0].rfind("# hypertopic 0.1.0 config_hash=", 0) == 0);
  CHECK(trace[1] == "iter,f,delta,eta");
  CHECK(trace.size() == 3 + std::stoul(m.meta.at("iterations")));

  // same seed, same bytes
  CHECK(run("--quiet fit --corpus " + tiny + " -K 2 -o " + (dir / "again.model")).code == 0);
  CHECK(slurp(dir / "again.model") == slurp(dir / "m.model"));
}

TEST_CASE("fit with rank selection records the estimate") {
  TempDir dir;
  const RunResult r = run("--quiet fit --corpus " + tiny + " --auto-k -o " + (dir / "m.model"));
  CHECK(r.code == 0);
  const ModelFile m = read_model(fs::path(dir / "m.model"));
  CHECK(m.meta.contains("k_hat"));
  CHECK(m.meta.contains("rank_tau"));
}

TEST_CASE("config file and flag precedence") {
  TempDir dir;
  {
    std::ofstream cfg(dir / "fit.cfg");
    cfg << "K=3\nmax_iters=4\n";
  }
  CHECK(run("--quiet --config " + (dir / "fit.cfg") + " fit --corpus " + tiny + " -o " + (dir / "a.model")).code ==
        0);
  CHECK(read_model(fs::path(dir / "a.model")).params.K == 3);
  CHECK(run("--quiet --config " + (dir / "fit.cfg") + " fit --corpus " + tiny + " -K 2 -o " + (dir / "b.model"))
            .code == 0);
  const ModelFile b = read_model(fs::path(dir / "b.model"));
  CHECK(b.params.K == 2);
  CHECK(b.meta.at("iterations") == "4");

  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "K=2\nfrobnicate=1\n";
  }
  CHECK(run("--quiet --config " + (dir / "bad.cfg") + " fit --corpus " + tiny + " -o " + (dir / "c.model")).code ==
        3);
}

TEST_CASE("error exit codes") {
  TempDir dir;
  {
    std::ofstream bad(dir / "bad.tsv");
    bad << "#hypertopic-corpus v0\n0\t0\t0\t1\n";
  }
  RunResult r = run("--quiet fit --corpus " + (dir / "bad.tsv") + " -K 2 -o " + (dir / "m.model"));
  CHECK(r.code == 2);
  CHECK(r.output.find("bad.tsv:1:") != std::string::npos);

  r = run("--quiet fit --corpus " + tiny + " -K 2 --lp 0.7 --up 0.2 -o " + (dir / "m.model"));
  CHECK(r.code == 3);
  r = run("--quiet fit --corpus " + tiny + " -o " + (dir / "m.model"));
  CHECK(r.code == 3);
  r = run("--quiet fit --corpus " + tiny + " -K two -o " + (dir / "m.model"));
  CHECK(r.code == 2);
  r = run("--quiet frobnicate");
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir / "m.model"));
}

TEST_CASE("simulate, fit and evaluate end to end") {
  TempDir dir;
  RunResult r = run("--quiet --seed 5 simulate --corpus " + (dir / "c.tsv") + " --truth " + (dir / "t.model") +
                    " --labels " + (dir / "l.tsv") + " --regime misaligned");
  REQUIRE(r.code == 0);
  const Corpus c = read_corpus(fs::path(dir / "c.tsv"));
  CHECK(c.num_documents() == 300);
  CHECK(c.num_slices() == 3);
  const ModelFile truth = read_model(fs::path(dir / "t.model"));
  CHECK(truth.meta.at("regime") == "misaligned");
  CHECK(truth.params.K == 3);

  // deterministic under the seed
  CHECK(run("--quiet --seed 5 simulate --corpus " + (dir / "c2.tsv") + " --truth " + (dir / "t2.model") +
            " --regime misaligned")
            .code == 0);
  CHECK(slurp(dir / "c2.tsv") == slurp(dir / "c.tsv"));

  r = run("--quiet fit --corpus " + (dir / "c.tsv") + " -K 3 --max-iters 20 -o " + (dir / "f.model"));
  REQUIRE(r.code == 0);
  r = run("--quiet evaluate --model " + (dir / "f.model") + " --truth " + (dir / "t.model") + " --labels " +
          (dir / "l.tsv") + " -o " + (dir / "report.csv"));
  REQUIRE(r.code == 0);
  const auto report = lines(slurp(dir / "report.csv"));
  REQUIRE(report.size() == 3);
  CHECK(report[0].rfind("# hypertopic 0.1.0 config_hash=", 0) == 0);
  CHECK(report[1] == "cell_id,regime,K,T,sigma,rho,design,replicate,err_w,weighted_f1,k_hat,runtime_ms");
  const auto fields = split(report[2]);
  REQUIRE(fields.size() == 12);
  CHECK(fields[1] == "misaligned");
  CHECK(std::stod(fields[8]) >= 0.0);
  CHECK(std::stod(fields[9]) >= 0.0);
  CHECK(std::stod(fields[9]) <= 1.0);

  // the truth against itself
  r = run("--quiet evaluate --model " + (dir / "t.model") + " --truth " + (dir / "t.model"));
  REQUIRE(r.code == 0);
  const auto self = split(lines(r.output).back());
  CHECK(self[8] == "0");
  CHECK(self[9] == "1");
}

TEST_CASE("labels-only evaluation omits err_w") {
  TempDir dir;
  REQUIRE(run("--quiet fit --corpus " + tiny + " -K 2 -o " + (dir / "m.model")).code == 0);
  const RunResult r = run("--quiet evaluate --model " + (dir / "m.model") + " --labels " + tiny_labels);
  REQUIRE(r.code == 0);
  const auto fields = split(lines(r.output).back());
  REQUIRE(fields.size() == 12);
  CHECK(fields[8] == "NA");
  CHECK(fields[9] != "NA");
}

TEST_CASE("rank on the bundled corpus") {
  TempDir dir;
  const RunResult r = run("--quiet rank --corpus " + tiny + " --scree " + (dir / "scree.csv"));
  REQUIRE(r.code == 0);
  CHECK(r.output.find("k_hat=") != std::string::npos);
  CHECK(r.output.find("tau=") != std::string::npos);
  const auto scree = lines(slurp(dir / "scree.csv"));
  CHECK(scree[1] == "k,singular_value,tau");
  CHECK(scree.size() == 2 + 6);  // min(k_cap, n = 6, p = 8)

  const RunResult capped = run("--quiet rank --corpus " + tiny + " --k-cap 2 --scree " + (dir / "s2.csv"));
  REQUIRE(capped.code == 0);
  CHECK(lines(slurp(dir / "s2.csv")).size() == 2 + 2);
}

TEST_CASE("rank recovers three topics on a strong-signal corpus") {
  TempDir dir;
  Rng rng(2024);
  write_corpus(fs::path(dir / "strong.tsv"), testing::block_corpus(rng, 3, 3, 50, 200, 600, 0.02));
  const RunResult r = run("--quiet rank --corpus " + (dir / "strong.tsv"));
  REQUIRE(r.code == 0);
  CHECK(r.output.find("k_hat=3 ") != std::string::npos);
}

TEST_CASE("grid writes per-replicate and summary files") {
  TempDir dir;
  const RunResult r =
      run("--quiet grid -o " + (dir / "g.csv") + " --summary " + (dir / "s.csv") +
          " --regimes aligned misaligned --Ks 2 --Ts 2 --sigmas 0.3 --rhos 1 --n-t 12 --p 20 --replicates 2 "
          "--max-iters 5");
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(dir / "g.csv"));
  CHECK(rows.size() == 2 + 4);
  CHECK(rows[1] == "cell_id,regime,K,T,sigma,rho,design,replicate,err_w,weighted_f1,k_hat,runtime_ms");
  CHECK(lines(slurp(dir / "s.csv")).size() == 2 + 4);
}
