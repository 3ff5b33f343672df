#include <doctest.h>

#include "helpers.hpp"
#include "sawcomb/errors.hpp"

using namespace sawcomb;
using testutil::kTwoPi;

TEST_CASE("covariance construction and block order") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  a(0, 1) = 0.3;
  CHECK_THROWS_AS(CovarianceMatrix{a}, InvalidArgument);
  CHECK_THROWS_AS(CovarianceMatrix{Eigen::MatrixXd::Identity(3, 3)}, DimensionMismatch);
  std::mt19937_64 rng(1);
  const CovarianceMatrix v = testutil::random_physical(rng, 3);
  const CovarianceMatrix back = CovarianceMatrix::from_block_order(v.block_order());
  CHECK(testutil::max_abs(Eigen::MatrixXd(back.matrix() - v.matrix())) == 0.0);
  CHECK(v.ii_block()(1, 2) == v(2, 4));
  CHECK(v.qq_block()(0, 2) == v(1, 5));
  CHECK(v.iq_block()(2, 0) == v(4, 1));
  const std::vector<int> pick{2, 0};
  const CovarianceMatrix sub = v.submatrix(pick);
  CHECK(sub(0, 3) == v(4, 1));
}

TEST_CASE("thermal covariance") {
  const std::vector<ModeSpec> modes{ModeSpec::from_hz(0, 3.858e9, 1e3, 0.0), ModeSpec::from_hz(1, 3.9e9, 1e3, 0.0)};
  const CovarianceMatrix zero = thermal_covariance(modes, 0.0);
  CHECK(testutil::max_abs(Eigen::MatrixXd(zero.matrix() - Eigen::MatrixXd::Identity(4, 4))) == 0.0);
  const CovarianceMatrix cold = thermal_covariance(modes, 0.030);
  CHECK(cold(0, 0) == doctest::Approx(1.0041835721734775).epsilon(1e-12));
  CHECK(cold(1, 1) == cold(0, 0));
  const CovarianceMatrix hot = thermal_covariance(modes, 50.0);
  const double limit = 2.0 * constants::k_b * 50.0 / (constants::hbar * modes[0].omega);
  CHECK(hot(0, 0) == doctest::Approx(limit).epsilon(1e-3));
  CHECK(cold.is_physical());
}

TEST_CASE("output covariance of trivial and two-mode networks") {
  ScatteringPair id;
  id.s = Eigen::MatrixXcd::Identity(4, 4);
  id.s_loss = Eigen::MatrixXcd::Zero(4, 4);
  id.basis = Basis::quadrature;
  const auto v = output_covariance(id, CovarianceMatrix::identity(2), CovarianceMatrix::identity(2));
  CHECK(testutil::max_abs(Eigen::MatrixXd(v.matrix() - Eigen::MatrixXd::Identity(4, 4))) == 0.0);
  CHECK_THROWS_AS(output_covariance(id, CovarianceMatrix::identity(1), CovarianceMatrix::identity(2)), DimensionMismatch);

  const auto t = testutil::two_mode(kTwoPi * 6e3, 20e3, 0.0);
  const auto out = output_covariance(to_quadrature(t.sc), CovarianceMatrix::identity(2), CovarianceMatrix::identity(2));
  const double c = out(0, 0);
  CHECK(out(1, 1) == doctest::Approx(c));
  CHECK(out(2, 2) == doctest::Approx(c));
  const Eigen::Matrix2d cross = out.matrix().block<2, 2>(0, 2);
  const double s = std::sqrt(cross.squaredNorm() / 2.0);
  CHECK(c * c - s * s == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(out.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(out(0, 1)) < 1e-12);
}

TEST_CASE("physicality is preserved through random networks") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto net = testutil::random_network(rng, 1 + trial % 5, trial % 3 != 0);
    const auto sc = to_quadrature(scattering_matrices(net.cm, net.g_ext, net.g_int));
    const CovarianceMatrix vin = thermal_covariance(net.modes, 0.1 * u(rng));
    const CovarianceMatrix vloss = thermal_covariance(net.modes, 0.1 * u(rng));
    const auto out = output_covariance(sc, vin, vloss);
    CHECK(out.min_physical_eigenvalue() >= -1e-9);
    if (trial % 3 == 0) CHECK(std::abs(CovarianceMatrix(output_covariance(sc, CovarianceMatrix::identity(net.cm.n_modes), CovarianceMatrix::identity(net.cm.n_modes))).matrix().determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("amplifier chain") {
  const double g = 1e4, n = 0.08;
  const auto amp = AmplifierModel::uniform(2, g, n);
  const auto vac = amplify(CovarianceMatrix::identity(2), amp);
  CHECK(vac(0, 0) == doctest::Approx(g + (g - 1) * (2 * n + 1)).epsilon(1e-14));
  CHECK(vac(0, 2) == 0.0);
  const auto unity = AmplifierModel::uniform(2, 1.0, 0.0);
  std::mt19937_64 rng(9);
  const CovarianceMatrix v = testutil::random_physical(rng, 2);
  CHECK(testutil::max_abs(Eigen::MatrixXd(amplify(v, unity).matrix() - v.matrix())) < 1e-15);

  AmplifierModel mixed = amp;
  mixed.gain = {3e3, 7e4};
  mixed.added_photons = {0.1, 0.3};
  mixed.idler_gain = {3e3, 7e4};
  mixed.idler_photons = {0.002, 0.003};
  for (int k = 0; k < 20; ++k) {
    const CovarianceMatrix vr = testutil::random_physical(rng, 2);
    const auto a = amplify(vr, mixed);
    CHECK(testutil::max_abs(Eigen::MatrixXd(a.matrix() - a.matrix().transpose())) == 0.0);
    CHECK(a.matrix().trace() > vr.matrix().trace());
    CHECK(testutil::max_abs(Eigen::MatrixXd(deamplify(a, mixed).matrix() - vr.matrix())) < 1e-10);
  }
  AmplifierModel bad = amp;
  bad.gain[0] = 0.5;
  CHECK_THROWS_AS(amplify(v, bad), GainBelowUnity);
  CHECK_THROWS_AS(amp.sigma_gain(0), MissingFitCovariance);
}

TEST_CASE("correlation quantity") {
  CHECK(correlation_quantity(CovarianceMatrix::identity(2)) == 0.0);
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(4, 4) * 3.0;
  v(0, 2) = v(2, 0) = 0.7;
  v(1, 3) = v(3, 1) = -0.7;
  CHECK(correlation_quantity(CovarianceMatrix(v)) == doctest::Approx(0.7 * std::sqrt(2.0)));
  const double r = 0.42;
  CHECK(correlation_quantity(two_mode_squeezed(r)) == doctest::Approx(std::sqrt(2.0) * std::sinh(2 * r)));
  CHECK_THROWS_AS(correlation_quantity(CovarianceMatrix::identity(3)), DimensionMismatch);

  double last = -1.0;
  for (double x = 0.0; x < 0.95; x += 0.05) {
    const auto t = testutil::two_mode(x * kTwoPi * 10e3, 20e3, 0.0);
    const double cq = correlation_quantity(
        output_covariance(to_quadrature(t.sc), CovarianceMatrix::identity(2), CovarianceMatrix::identity(2)));
    CHECK(cq >= last);
    last = cq;
  }
}

TEST_CASE("vacuum-unit scaling roundtrip") {
  std::mt19937_64 rng(4);
  const CovarianceMatrix v = testutil::random_physical(rng, 2);
  const std::vector<double> w{kTwoPi * 3.85e9, kTwoPi * 3.86e9};
  const Eigen::MatrixXd raw = scale_to_raw_units(v, w, 50.0, 1e3);
  const double unit = 0.5 * 50.0 * constants::hbar * std::sqrt(w[0] * w[1]) * 1e3;
  CHECK(raw(0, 2) == doctest::Approx(v(0, 2) * unit).epsilon(1e-14));
  CHECK(testutil::max_abs(Eigen::MatrixXd(scale_to_vacuum_units(raw, w, 50.0, 1e3).matrix() - v.matrix())) < 1e-12);
}

TEST_CASE("sampling statistics and determinism") {
  const auto s = sample(CovarianceMatrix::identity(1), 1000000, 123);
  const auto m = sample_moments(s);
  CHECK(std::abs(m.covariance(0, 0) - 1.0) < 0.005);
  CHECK(std::abs(m.covariance(1, 1) - 1.0) < 0.005);
  const auto again = sample(CovarianceMatrix::identity(1), 1000, 123);
  CHECK((again.samples.array() == sample(CovarianceMatrix::identity(1), 1000, 123).samples.array()).all());
  CHECK((again.samples.array() != sample(CovarianceMatrix::identity(1), 1000, 124).samples.array()).any());

  std::mt19937_64 rng(8);
  const CovarianceMatrix v = testutil::random_physical(rng, 2);
  const auto mv = sample_moments(sample(v, 200000, 99));
  const Eigen::MatrixXd z = (mv.covariance.matrix() - v.matrix()).cwiseQuotient(mv.standard_error);
  CHECK(z.cwiseAbs().maxCoeff() < 5.0);

  Eigen::MatrixXd neg = Eigen::MatrixXd::Identity(2, 2);
  neg(1, 1) = -1e-3;
  CHECK_THROWS_AS(sample(CovarianceMatrix(neg), 10, 1), NotPSD);
}

TEST_CASE("sampled TMS correlation agrees with the closed form") {
  const auto mom = sample_moments(sample(two_mode_squeezed(0.5), 1000000, 2024));
  const double x = mom.covariance(0, 2), y = mom.covariance(1, 3);
  const double c_hat = correlation_quantity(mom.covariance);
  const double se = std::sqrt(x * x * std::pow(mom.standard_error(0, 2), 2) + y * y * std::pow(mom.standard_error(1, 3), 2)) / c_hat;
  CHECK(std::abs(c_hat - std::sqrt(2.0) * std::sinh(1.0)) < 3.0 * se);
}

TEST_CASE("squeezing statistics") {
  const double r = 0.4;
  const auto off = sample(CovarianceMatrix::identity(2), 400000, 1, PumpState::off);
  const auto same = sample(CovarianceMatrix::identity(2), 400000, 2);
  const auto flat = squeezing_stats(same, off, 0, 1);
  CHECK(flat.r_e == doctest::Approx(1.0).epsilon(0.01));
  CHECK(flat.r_p == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));

  const auto on = sample(two_mode_squeezed(r), 400000, 3);
  const auto st = squeezing_stats(on, off, 0, 1);
  CHECK(st.r_e == doctest::Approx(std::exp(2 * r)).epsilon(0.01));
  CHECK(st.r_p == doctest::Approx(std::sqrt(2.0) * std::exp(-r)).epsilon(0.01));

  // half the field lost to a vacuum port
  Eigen::MatrixXd lossy = 0.5 * two_mode_squeezed(r).matrix() + 0.5 * Eigen::MatrixXd::Identity(4, 4);
  const auto st_loss = squeezing_stats(sample(CovarianceMatrix(lossy), 400000, 4), off, 0, 1);
  CHECK(st_loss.r_e < st.r_e);

  QuadratureSamples empty;
  empty.n_modes = 2;
  empty.samples.resize(0, 4);
  CHECK_THROWS_AS(squeezing_stats(empty, off, 0, 1), EmptySamples);
}

TEST_CASE("phase alignment undoes a known rotation") {
  const CovarianceMatrix tms = two_mode_squeezed(0.5);
  const std::vector<double> angles{0.0, 0.9};
  auto s = sample(rotate_modes(tms, angles), 200000, 6);
  const double phi = align_pair_phase(s, 0, 1);
  const auto m = sample_moments(s);
  CHECK(m.covariance(0, 2) > 0.0);
  CHECK(std::abs(m.covariance(0, 3)) < 0.02);
  CHECK(std::abs(std::remainder(phi + 0.9, constants::two_pi)) < 0.02);
}

TEST_CASE("histogram normalisation") {
  const auto s = sample(CovarianceMatrix::identity(2), 10000, 5);
  const auto h = histogram_iq(s, 0, 1, 0.5, 41);
  CHECK(h.counts.rows() == 41);
  CHECK(h.counts.sum() <= 1.0 + 1e-12);
  CHECK(h.counts.sum() > 0.99);
  CHECK(h.counts.minCoeff() >= 0.0);
}
