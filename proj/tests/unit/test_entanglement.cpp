#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "sawcomb/entanglement.hpp"
#include "sawcomb/errors.hpp"

using namespace sawcomb;

namespace {

// Exact minimum of E: for fixed signs of the two inner products E is a
// quadratic form on the sphere, so the minimum is twice its lowest eigenvalue.
double svl_oracle(const CovarianceMatrix& v, const Bipartition& bp) {
  const int n = v.n_modes();
  double best = 1e300;
  for (int si : {-1, 1}) {
    for (int sj : {-1, 1}) {
      Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      q.topLeftCorner(n, n) = v.ii_block();
      q.bottomRightCorner(n, n) = v.qq_block();
      for (int m : bp.set_i) q(m, n + m) = q(n + m, m) = -si;
      for (int m : bp.set_j) q(m, n + m) = q(n + m, m) = -sj;
      best = std::min(best, 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues()(0));
    }
  }
  return best;
}

CovarianceMatrix thermal_product(int n, double nbar) {
  return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n, 2 * n) * (2 * nbar + 1));
}

}  // namespace

TEST_CASE("bipartition enumeration and labels") {
  const auto bps = all_bipartitions(4);
  REQUIRE(bps.size() == 7);
  const char* labels[] = {"{0} : {1, 2, 3}", "{1} : {0, 2, 3}", "{0, 1} : {2, 3}", "{2} : {0, 1, 3}",
                          "{0, 2} : {1, 3}", "{1, 2} : {0, 3}", "{0, 1, 2} : {3}"};
  for (int k = 0; k < 7; ++k) {
    CHECK(bps[k].label() == labels[k]);
    CHECK(bps[k].set_i.front() == 0);
    CHECK(bps[k].n_modes() == 4);
  }
  CHECK(all_bipartitions(2).size() == 1);
  CHECK(all_bipartitions(5).size() == 15);
  CHECK(Bipartition::from_subset({3, 1}, 4) == Bipartition::from_subset({0, 2}, 4));
  CHECK_THROWS(Bipartition::from_subset({}, 3));
  CHECK_THROWS(Bipartition::from_subset({0, 1, 2}, 3));
}

TEST_CASE("PPT eigenvalue examples") {
  const std::vector<int> second{1};
  CHECK(std::abs(ppt_min_eigenvalue(CovarianceMatrix::identity(2), second)) < 1e-12);
  for (double r : {0.1, 0.4, 0.9})
    CHECK(ppt_min_eigenvalue(two_mode_squeezed(r), second) == doctest::Approx(std::exp(-2 * r) - 1).epsilon(1e-10));
  const double nbar = 0.35;
  CHECK(ppt_min_eigenvalue(thermal_product(2, nbar), second) == doctest::Approx(2 * nbar));
}

TEST_CASE("SvL value for TMS with the textbook vectors") {
  const double r = 0.3;
  Eigen::VectorXd h(2), g(2);
  h << 1, 1;
  g << 1, -1;
  h /= std::sqrt(2.0);
  g /= std::sqrt(2.0);
  const auto bp = Bipartition::from_subset({0}, 2);
  // these vectors fit the TMS with anti-correlated I quadratures
  CHECK(svl_value(two_mode_squeezed(-r), bp, h, g) == doctest::Approx(2 * (std::exp(-2 * r) - 1)).epsilon(1e-12));
  CHECK(svl_value(two_mode_squeezed(r), bp, g, h) == doctest::Approx(2 * (std::exp(-2 * r) - 1)).epsilon(1e-12));
  const auto rep = svl_test(two_mode_squeezed(r), bp);
  CHECK(rep.value_e <= 2 * (std::exp(-2 * r) - 1) + 1e-10);
  CHECK(rep.value_e == doctest::Approx(svl_value(two_mode_squeezed(r), bp, rep.h_vec, rep.g_vec)).epsilon(1e-12));
  CHECK(rep.h_vec.squaredNorm() + rep.g_vec.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("separable product states never violate") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int n : {2, 3, 4}) {
    const auto v = thermal_product(n, 0.2);
    for (const auto& bp : all_bipartitions(n)) {
      CHECK(svl_test(v, bp).value_e >= -1e-10);
      for (int probe = 0; probe < 100; ++probe) {
        Eigen::VectorXd x(2 * n);
        for (int a = 0; a < 2 * n; ++a) x(a) = nd(rng);
        x *= std::sqrt(2.0) / x.norm();
        CHECK(svl_value(v, bp, x.head(n), x.tail(n)) >= -1e-12);
      }
    }
  }
}

TEST_CASE("optimizer reaches the exact minimum") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3;
    const Decorrelation d = decorrelate(testutil::random_physical(rng, n, 0.1));
    for (const auto& bp : all_bipartitions(n)) {
      const auto rep = svl_test(d.v, bp);
      CHECK(rep.value_e == doctest::Approx(svl_oracle(d.v, bp)).epsilon(1e-8));
    }
  }
}

TEST_CASE("two-mode PPT and SvL agree in sign") {
  std::mt19937_64 rng(31);
  const std::vector<int> second{1};
  const auto bp = Bipartition::from_subset({0}, 2);
  int disagreements = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const CovarianceMatrix v = testutil::random_physical(rng, 2, 0.6);
    const double lam = ppt_min_eigenvalue(v, second);
    const double e = svl_test(decorrelate(v).v, bp).value_e;
    if (std::abs(e) > 1e-6 && (lam < 0) != (e < 0)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("decorrelation removes I-Q cross terms of rotated networks") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, testutil::kTwoPi);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = testutil::random_network(rng, 2 + trial % 3, true);
    const auto sc = to_quadrature(scattering_matrices(net.cm, net.g_ext, net.g_int));
    const auto id = CovarianceMatrix::identity(net.cm.n_modes);
    std::vector<double> angles;
    for (int k = 0; k < net.cm.n_modes; ++k) angles.push_back(u(rng));
    const CovarianceMatrix v = rotate_modes(output_covariance(sc, id, id), angles);
    const Decorrelation d = decorrelate(v);
    CHECK(d.within_tolerance);
    CHECK(d.residual_ratio <= 0.05);
    // local symplectic map: PPT verdict unchanged
    const std::vector<int> first{0};
    const double before = ppt_min_eigenvalue(v, first), after = ppt_min_eigenvalue(d.v, first);
    if (std::abs(before) > 1e-9) CHECK((before < 0) == (after < 0));
    const Eigen::MatrixXd t = d.transform;
    const Eigen::MatrixXd om = symplectic_form(net.cm.n_modes);
    CHECK(testutil::max_abs(Eigen::MatrixXd(t * om * t.transpose() - om)) < 1e-9);
    CHECK(testutil::max_abs(Eigen::MatrixXd(t * v.matrix() * t.transpose() - d.v.matrix())) < 1e-9);
  }
}

TEST_CASE("PPT eigenvalue is invariant under local rotations") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.0, testutil::kTwoPi);
  for (int trial = 0; trial < 20; ++trial) {
    const CovarianceMatrix v = testutil::random_physical(rng, 3, 0.2);
    const std::vector<double> angles{u(rng), u(rng), u(rng)};
    const std::vector<int> set{0, 2};
    CHECK(ppt_min_eigenvalue(rotate_modes(v, angles), set) == doctest::Approx(ppt_min_eigenvalue(v, set)).epsilon(1e-9));
  }
}

TEST_CASE("E sign is invariant under local rotations and relabelling") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, testutil::kTwoPi);
  for (int trial = 0; trial < 20; ++trial) {
    const CovarianceMatrix v = testutil::random_physical(rng, 3, 0.2);
    const auto bp = Bipartition::from_subset({1}, 3);
    const double e = svl_test(decorrelate(v).v, bp).value_e;
    const std::vector<double> angles{u(rng), u(rng), u(rng)};
    const double e_rot = svl_test(decorrelate(rotate_modes(v, angles)).v, bp).value_e;
    if (std::abs(e) > 1e-6) CHECK((e < 0) == (e_rot < 0));
    // swap modes 0 and 2; {1} : {0, 2} maps to itself
    const std::vector<int> perm{2, 1, 0};
    const double e_perm = svl_test(v.submatrix(perm), bp).value_e;
    CHECK(e_perm == doctest::Approx(svl_test(v, bp).value_e).epsilon(1e-8));
  }
}

TEST_CASE("thermal noise never lowers E for fixed vectors") {
  std::mt19937_64 rng(61);
  const CovarianceMatrix v = testutil::random_physical(rng, 3, 0.1);
  const auto bp = Bipartition::from_subset({0, 2}, 3);
  const auto rep = svl_test(v, bp);
  double last = rep.value_e;
  for (double t = 0.1; t < 2.0; t += 0.1) {
    const CovarianceMatrix noisy(v.matrix() + t * Eigen::MatrixXd::Identity(6, 6));
    const double e = svl_value(noisy, bp, rep.h_vec, rep.g_vec);
    CHECK(e >= last - 1e-12);
    last = e;
  }
}

TEST_CASE("error propagation") {
  std::mt19937_64 rng(71);
  const CovarianceMatrix v = testutil::random_physical(rng, 2);
  AmplifierModel amp = AmplifierModel::uniform(2, 1e4, 0.1);
  amp.gain = {1e4, 2e4};
  amp.fit_covariance = std::vector<Eigen::Matrix2d>(2, Eigen::Matrix2d::Zero());
  const CovarianceMatrix vt = amplify(v, amp);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 4);
  CHECK(testutil::max_abs(propagate_errors(vt, amp, zero)) == 0.0);

  AmplifierModel plain = amp;
  plain.fit_covariance.reset();
  CHECK_THROWS_AS(propagate_errors(vt, plain, zero), MissingFitCovariance);

  // gain uncertainty on mode 0 only
  const double sg = 150.0;
  (*amp.fit_covariance)[0](0, 0) = sg * sg;
  const Eigen::MatrixXd s = propagate_errors(vt, amp, zero);
  const double g0 = 1e4, g1 = 2e4;
  const double off = vt(0, 2) / (2 * std::sqrt(g0 * g0 * g0 * g1)) * sg;
  CHECK(s(0, 2) == doctest::Approx(std::abs(off)).epsilon(1e-12));
  CHECK(s(2, 3) == 0.0);
  const double ta = vt(0, 0) / (2 * g0 * g0) * sg;
  const double diag = 2 * (2 * ta * ta) + 2 * std::pow((2 * 0.1 + 1) / g0 * sg, 2);
  CHECK(s(0, 0) == doctest::Approx(std::sqrt(diag)).epsilon(1e-12));

  // noise uncertainty only enters the diagonal, as 2σ_n
  AmplifierModel noisy = amp;
  noisy.fit_covariance = std::vector<Eigen::Matrix2d>(2, Eigen::Matrix2d::Zero());
  (*noisy.fit_covariance)[1](1, 1) = 0.01 * 0.01;
  const Eigen::MatrixXd sn = propagate_errors(vt, noisy, zero);
  CHECK(sn(2, 2) == doctest::Approx(0.02));
  CHECK(sn(0, 2) == 0.0);

  // sampling error scales with 1/sqrt(G_i G_j)
  Eigen::MatrixXd sem = Eigen::MatrixXd::Constant(4, 4, 10.0);
  noisy.fit_covariance = std::vector<Eigen::Matrix2d>(2, Eigen::Matrix2d::Zero());
  CHECK(propagate_errors(vt, noisy, sem)(1, 3) == doctest::Approx(10.0 / std::sqrt(g0 * g1)));

  // a negative gain-noise correlation lowers the diagonal error
  AmplifierModel corr = noisy;
  const double sgc = 0.01 * g0, snc = 0.01;
  (*corr.fit_covariance)[0] << sgc * sgc, -0.9 * sgc * snc, -0.9 * sgc * snc, snc * snc;
  AmplifierModel uncorr = corr;
  (*uncorr.fit_covariance)[0](0, 1) = (*uncorr.fit_covariance)[0](1, 0) = 0.0;
  std::vector<std::string> warnings;
  const CovarianceMatrix hot(vt.matrix() + 40.0 * g0 * Eigen::MatrixXd::Identity(4, 4));
  CHECK(propagate_errors(hot, corr, zero, &warnings)(0, 0) < propagate_errors(hot, uncorr, zero)(0, 0));
  CHECK(propagate_errors(hot, corr, zero)(0, 2) == propagate_errors(hot, uncorr, zero)(0, 2));
}

TEST_CASE("SvL sigma") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 4);
  s(0, 2) = s(2, 0) = 0.1;
  s(1, 1) = 0.2;
  Eigen::VectorXd h(2), g(2);
  h << 1, 0.5;
  g << 0.3, 0.7;
  const double expected = std::sqrt(2 * 0.01 * 1 * 0.25 + 0.04 * std::pow(0.3, 4));
  CHECK(svl_sigma(s, h, g) == doctest::Approx(expected));
}

TEST_CASE("weighted significance") {
  const std::vector<double> one{-2.4}, sig{1.0};
  CHECK(significance(one, sig).significance == doctest::Approx(-2.4));
  const std::vector<double> two{-0.5, -0.5}, sig2{0.2, 0.2};
  CHECK(significance(two, sig2).significance == doctest::Approx(std::sqrt(2.0) * -2.5));
  const std::vector<double> mixed{-1.0, 1.0}, sig3{1.0, 2.0};
  const auto w = significance(mixed, sig3);
  CHECK(w.value_e == doctest::Approx((-1.0 + 0.25) / 1.25));
  CHECK(w.sigma == doctest::Approx(1.0 / std::sqrt(1.25)));
  const std::vector<double> zs{0.0};
  CHECK_THROWS_AS(significance(one, zs), ZeroVariance);
  CHECK_THROWS_AS(significance(std::vector<double>{}, std::vector<double>{}), InsufficientData);
}

TEST_CASE("significance table json") {
  std::vector<EntanglementReport> rows(2);
  rows[0].bipartition = all_bipartitions(3)[0];
  rows[0].value_e = -0.5;
  rows[0].sigma = 0.1;
  rows[0].significance = -5.0;
  rows[1].bipartition = all_bipartitions(3)[2];
  const auto j = nlohmann::json::parse(significance_table_json(rows));
  REQUIRE(j.size() == 2);
  CHECK(j[0]["bipartition"] == "{0} : {1, 2}");
  CHECK(j[0]["significance"].get<double>() == -5.0);
  CHECK(j[1]["bipartition"] == "{0, 1} : {2}");
}
