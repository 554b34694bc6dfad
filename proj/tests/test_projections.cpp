#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypertopic/error.hpp"
#include "hypertopic/projections.hpp"
#include "hypertopic/random.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <cmath>
#include <limits>

using namespace hypertopic;
using testing::uniform_vector;

namespace {

Eigen::VectorXd vecd(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

bool in_capped(const Eigen::VectorXd& x, double lo, double hi, double total) {
  return (x.array() >= lo - 1e-12).all() && (x.array() <= hi + 1e-12).all() &&
         std::abs(x.sum() - total) <= 1e-10 * std::max(1.0, total);
}

}  // namespace

TEST_CASE("simplex examples") {
  CHECK((project_simplex(vecd({1.2, -0.2, 0.0})) - vecd({1, 0, 0})).norm() < 1e-15);
  CHECK((project_simplex(vecd({0.3, 0.3, 0.4})) - vecd({0.3, 0.3, 0.4})).norm() < 1e-15);
  CHECK((project_simplex(vecd({0.0, 0.0})) - vecd({0.5, 0.5})).norm() < 1e-15);
  CHECK((project_simplex(vecd({5.0})) - vecd({1.0})).norm() < 1e-15);
}

TEST_CASE("box examples") {
  CHECK(project_box(vecd({-1.0, 0.5, 2.0}), 0.01, 0.99) == vecd({0.01, 0.5, 0.99}));
  CHECK_THROWS_AS(project_box(vecd({0.5}), 0.5, 0.5), Error);
}

TEST_CASE("capped simplex examples") {
  CHECK((project_capped_simplex(vecd({3.0, 0.0, 0.0}), 0.5, 2.0, 3.0) - vecd({2.0, 0.5, 0.5})).norm() < 1e-12);
  CHECK((project_capped_simplex(vecd({1.0, 1.0, 1.0}), 0.5, 2.0, 3.0) - vecd({1.0, 1.0, 1.0})).norm() < 1e-14);
  try {
    project_capped_simplex(vecd({1.0, 1.0}), 0.5, 2.0, 5.0);
    FAIL("expected InfeasibleTarget");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleTarget);
  }
  CHECK_THROWS_AS(project_capped_simplex(vecd({1.0, 1.0}), 0.5, 2.0, 0.5), Error);
}

TEST_CASE("unbounded cap reduces to a scaled simplex") {
  Rng rng(1);
  const double inf = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::VectorXd v = uniform_vector(rng, 6, -2.0, 2.0);
    const Eigen::VectorXd capped = project_capped_simplex(v, 0.0, inf, 1.0);
    CHECK((capped - project_simplex(v)).norm() < 1e-12);
  }
}

TEST_CASE("projections are idempotent and feasible") {
  Rng rng(2);
  for (int rep = 0; rep < 300; ++rep) {
    const Index n = 2 + rep % 9;
    const Eigen::VectorXd v = uniform_vector(rng, n, -3.0, 3.0);

    const Eigen::VectorXd s = project_simplex(v);
    CHECK((s.array() >= 0).all());
    CHECK(std::abs(s.sum() - 1.0) < 1e-14);
    CHECK((project_simplex(s) - s).norm() < 1e-14);

    const Eigen::VectorXd b = project_box(v, 0.01, 0.99);
    CHECK(project_box(b, 0.01, 0.99) == b);

    const double total = static_cast<double>(n);
    const Eigen::VectorXd c = project_capped_simplex(v * 4.0, 0.1, 10.0, total);
    CHECK(in_capped(c, 0.1, 10.0, total));
    CHECK((project_capped_simplex(c, 0.1, 10.0, total) - c).norm() < 1e-12);
  }
}

TEST_CASE("projections are non-expansive") {
  Rng rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const Index n = 2 + rep % 7;
    const Eigen::VectorXd u = uniform_vector(rng, n, -3.0, 3.0), v = uniform_vector(rng, n, -3.0, 3.0);
    const double d = (u - v).norm();
    CHECK((project_simplex(u) - project_simplex(v)).norm() <= d + 1e-12);
    CHECK((project_box(u, 0.01, 0.99) - project_box(v, 0.01, 0.99)).norm() <= d + 1e-12);
    const double total = static_cast<double>(n);
    CHECK((project_capped_simplex(u, 0.1, 10.0, total) - project_capped_simplex(v, 0.1, 10.0, total)).norm() <=
          d + 1e-12);
  }
}

TEST_CASE("projections match brute-force quadratic programs") {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 2 + rep % 5;
    const Eigen::VectorXd v = uniform_vector(rng, n, -2.0, 2.0);
    CHECK((project_simplex(v) - v).squaredNorm() == doctest::Approx(testing::oracle_simplex(v)).epsilon(1e-10));
    CHECK((project_box(v, 0.01, 0.99) - v).squaredNorm() <= testing::oracle_box(v, 0.01, 0.99) + 1e-12);
    const Eigen::VectorXd w = uniform_vector(rng, n, -5.0, 15.0);
    const double total = static_cast<double>(n);
    const double got = (project_capped_simplex(w, 0.1, 10.0, total) - w).squaredNorm();
    CHECK(got == doctest::Approx(testing::oracle_capped(w, 0.1, 10.0, total)).epsilon(1e-9));
  }
}

TEST_CASE("float scalars") {
  Eigen::VectorXf v(3);
  v << 1.2f, -0.2f, 0.0f;
  const Eigen::VectorXf s = project_simplex(v);
  CHECK(s(0) == doctest::Approx(1.0f));
  CHECK(s(1) == 0.0f);
}
