#include <doctest.h>

#include "helpers.hpp"
#include "sawcomb/reconstruct.hpp"

using namespace sawcomb;

TEST_CASE("single mode below vacuum") {
  const CovarianceMatrix v(Eigen::Matrix2d(Eigen::Vector2d(0.5, 0.5).asDiagonal()));
  const auto r = reconstruct_physical(v, Eigen::Matrix2d::Constant(0.1));
  CHECK(r.converged);
  CHECK(r.objective == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(r.v.is_physical(1e-7));
  CHECK(r.v(0, 0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("physical input is returned unchanged") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const CovarianceMatrix v = testutil::random_physical(rng, 1 + trial % 3, 0.5);
    const Eigen::MatrixXd sig = Eigen::MatrixXd::Constant(v.matrix().rows(), v.matrix().cols(), 0.05);
    const auto r = reconstruct_physical(v, sig);
    CHECK(r.objective == 0.0);
    CHECK(testutil::max_abs(Eigen::MatrixXd(r.v.matrix() - v.matrix())) == 0.0);
  }
}

TEST_CASE("single mode against the closed-form oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.02, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix2d v;
    v(0, 0) = 0.9 + 0.6 * u(rng);
    v(1, 1) = 0.9 + 0.6 * u(rng);
    v(0, 1) = v(1, 0) = 0.5 * u(rng);
    Eigen::Matrix2d s;
    s(0, 0) = pos(rng);
    s(1, 1) = pos(rng);
    s(0, 1) = s(1, 0) = pos(rng);
    const auto r = reconstruct_physical(CovarianceMatrix(v), s);
    CHECK(r.converged);
    CHECK(r.objective == doctest::Approx(testutil::one_mode_reconstruct_oracle(v, s)).epsilon(1e-5));
    CHECK(r.v.is_physical(1e-7));
  }
}

TEST_CASE("two modes against the frozen SDP oracle") {
  const auto data = testutil::load_json("reconstruct_oracle.json");
  REQUIRE(data["cases"].size() == 50);
  for (const auto& c : data["cases"]) {
    const CovarianceMatrix v(testutil::to_matrix(c["v"]));
    const Eigen::MatrixXd s = testutil::to_matrix(c["sigma"]);
    const double expected = c["objective"].get<double>();
    const auto r = reconstruct_physical(v, s);
    CHECK(r.converged);
    CHECK(std::abs(r.objective - expected) < 1e-4);
    CHECK(r.v.is_physical(1e-7));
    // the result sits inside its own box
    const Eigen::MatrixXd ratio = (r.v.matrix() - v.matrix()).cwiseAbs().cwiseQuotient(s);
    CHECK(ratio.maxCoeff() <= r.objective + 1e-6);
  }
}

TEST_CASE("reconstruction is idempotent and scales with sigma") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd(0.0, 0.15);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd m = testutil::random_physical(rng, 2, 0.1).matrix();
    Eigen::MatrixXd noise(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b <= a; ++b) noise(a, b) = noise(b, a) = nd(rng);
    m += noise - 0.3 * Eigen::MatrixXd::Identity(4, 4);
    const CovarianceMatrix v(m);
    const Eigen::MatrixXd s = Eigen::MatrixXd::Constant(4, 4, 0.1) + 0.05 * Eigen::MatrixXd::Identity(4, 4);
    const auto first = reconstruct_physical(v, s);
    const auto again = reconstruct_physical(first.v, s);
    CHECK(again.objective < 1e-5);
    const auto scaled = reconstruct_physical(v, 3.0 * s);
    CHECK(scaled.objective == doctest::Approx(first.objective / 3.0).epsilon(1e-4));
  }
}

TEST_CASE("zero sigma holds elements fixed") {
  const CovarianceMatrix v(Eigen::Matrix2d(Eigen::Vector2d(0.2, 2.5).asDiagonal()));
  Eigen::Matrix2d s = Eigen::Matrix2d::Constant(0.1);
  s(1, 1) = 0.0;
  const auto r = reconstruct_physical(v, s);
  CHECK(r.v(1, 1) == 2.5);
  CHECK(r.v(0, 0) == doctest::Approx(0.4).epsilon(1e-5));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-4));
}
