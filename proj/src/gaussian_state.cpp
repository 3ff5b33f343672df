#include "sawcomb/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sawcomb/constants.hpp"
#include "sawcomb/errors.hpp"

namespace sawcomb {

namespace c = constants;

CovarianceMatrix::CovarianceMatrix(const Eigen::MatrixXd& v) {
  if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0)
    throw DimensionMismatch("covariance must be a non-empty 2N×2N matrix");
  if (!v.allFinite()) throw InvalidArgument("covariance has non-finite entries");
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("covariance is not symmetric");
  v_ = (v + v.transpose()) / 2.0;
}

CovarianceMatrix CovarianceMatrix::identity(int n_modes) {
  return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

std::vector<int> interleaved_to_block_order(int n_modes) {
  std::vector<int> idx(2 * n_modes);
  for (int j = 0; j < n_modes; ++j) {
    idx[j] = 2 * j;
    idx[n_modes + j] = 2 * j + 1;
  }
  return idx;
}

CovarianceMatrix CovarianceMatrix::from_block_order(const Eigen::MatrixXd& v) {
  if (v.rows() != v.cols() || v.rows() % 2 != 0) throw DimensionMismatch("expected a 2N×2N matrix");
  const auto idx = interleaved_to_block_order(static_cast<int>(v.rows() / 2));
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(idx[a], idx[b]) = v(a, b);
  return CovarianceMatrix(out);
}

Eigen::MatrixXd CovarianceMatrix::block_order() const {
  const auto idx = interleaved_to_block_order(n_modes());
  Eigen::MatrixXd out(v_.rows(), v_.cols());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = v_(idx[a], idx[b]);
  return out;
}

Eigen::MatrixXd CovarianceMatrix::ii_block() const {
  const int n = n_modes();
  Eigen::MatrixXd out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = v_(2 * a, 2 * b);
  return out;
}

Eigen::MatrixXd CovarianceMatrix::qq_block() const {
  const int n = n_modes();
  Eigen::MatrixXd out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = v_(2 * a + 1, 2 * b + 1);
  return out;
}

Eigen::MatrixXd CovarianceMatrix::iq_block() const {
  const int n = n_modes();
  Eigen::MatrixXd out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = v_(2 * a, 2 * b + 1);
  return out;
}

CovarianceMatrix CovarianceMatrix::submatrix(std::span<const int> modes) const {
  const auto k = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd out(2 * k, 2 * k);
  for (Eigen::Index a = 0; a < k; ++a) {
    if (modes[a] < 0 || modes[a] >= n_modes()) throw InvalidArgument("mode index out of range");
    for (Eigen::Index b = 0; b < k; ++b)
      out.block<2, 2>(2 * a, 2 * b) = v_.block<2, 2>(2 * modes[a], 2 * modes[b]);
  }
  return CovarianceMatrix(out);
}

double CovarianceMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXcd physicality_matrix(const Eigen::MatrixXd& v) {
  const int n = static_cast<int>(v.rows() / 2);
  Eigen::MatrixXcd h = v.cast<std::complex<double>>();
  h += std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
  return h;
}

double CovarianceMatrix::min_physical_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(physicality_matrix(v_), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

AmplifierModel AmplifierModel::uniform(int n_modes, double gain, double added_photons) {
  AmplifierModel a;
  a.gain.assign(n_modes, gain);
  a.added_photons.assign(n_modes, added_photons);
  a.idler_gain.assign(n_modes, 1.0);
  a.idler_photons.assign(n_modes, 0.0);
  a.validate();
  return a;
}

double AmplifierModel::noise_term(int mode) const {
  return (gain[mode] - 1.0) * (2.0 * added_photons[mode] + 1.0) +
         (idler_gain[mode] - 1.0) * (2.0 * idler_photons[mode] + 1.0);
}

double AmplifierModel::sigma_gain(int mode) const {
  if (!fit_covariance) throw MissingFitCovariance("amplifier model carries no fit covariance");
  return std::sqrt((*fit_covariance)[mode](0, 0));
}

double AmplifierModel::sigma_noise(int mode) const {
  if (!fit_covariance) throw MissingFitCovariance("amplifier model carries no fit covariance");
  return std::sqrt((*fit_covariance)[mode](1, 1));
}

double AmplifierModel::cov_gain_noise(int mode) const {
  if (!fit_covariance) throw MissingFitCovariance("amplifier model carries no fit covariance");
  return (*fit_covariance)[mode](0, 1);
}

void AmplifierModel::validate() const {
  const auto n = gain.size();
  if (added_photons.size() != n || idler_gain.size() != n || idler_photons.size() != n)
    throw DimensionMismatch("amplifier parameter lists differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(gain[i] >= 1.0) || !(idler_gain[i] >= 1.0))
      throw GainBelowUnity("mode " + std::to_string(i) + " has gain below unity");
    if (!(added_photons[i] >= 0.0) || !(idler_photons[i] >= 0.0))
      throw InvalidArgument("added photon numbers must be non-negative");
  }
  if (fit_covariance) {
    if (fit_covariance->size() != n) throw DimensionMismatch("fit covariance list length");
    for (const auto& cv : *fit_covariance) {
      if (std::abs(cv(0, 1) - cv(1, 0)) > 1e-12 * std::max(1.0, cv.cwiseAbs().maxCoeff()))
        throw InvalidArgument("fit covariance is not symmetric");
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cv, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, cv.cwiseAbs().maxCoeff()))
        throw InvalidArgument("fit covariance is not positive semidefinite");
    }
  }
}

double bose_occupation(double omega, double temperature) {
  if (temperature < 0.0) throw InvalidArgument("temperature must be non-negative");
  if (temperature == 0.0) return 0.0;
  const double x = c::hbar * omega / (c::k_b * temperature);
  return 1.0 / std::expm1(x);
}

CovarianceMatrix thermal_covariance(std::span<const ModeSpec> modes, double temperature) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::VectorXd d(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) d(2 * j) = d(2 * j + 1) = 2.0 * bose_occupation(modes[j].omega, temperature) + 1.0;
  return CovarianceMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

CovarianceMatrix two_mode_squeezed(double r) {
  const double ch = std::cosh(2.0 * r);
  const double sh = std::sinh(2.0 * r);
  Eigen::Matrix4d v;
  v << ch, 0, sh, 0,
       0, ch, 0, -sh,
       sh, 0, ch, 0,
       0, -sh, 0, ch;
  return CovarianceMatrix(v);
}

CovarianceMatrix output_covariance(const ScatteringPair& sc, const CovarianceMatrix& v_in,
                                   const CovarianceMatrix& v_loss) {
  if (sc.basis != Basis::quadrature) throw InvalidArgument("output_covariance expects quadrature-basis scattering");
  const Eigen::MatrixXd s = sc.s.real();
  const Eigen::MatrixXd sl = sc.s_loss.real();
  if (s.rows() != v_in.matrix().rows() || sl.cols() != v_loss.matrix().rows())
    throw DimensionMismatch("scattering and covariance dimensions differ");
  Eigen::MatrixXd out = s * v_in.matrix() * s.transpose() + sl * v_loss.matrix() * sl.transpose();
  return CovarianceMatrix((out + out.transpose()) / 2.0);
}

namespace {

void check_amp(const CovarianceMatrix& v, const AmplifierModel& amp) {
  amp.validate();
  if (amp.n_modes() != v.n_modes()) throw DimensionMismatch("amplifier model and covariance mode counts differ");
}

}  // namespace

CovarianceMatrix amplify(const CovarianceMatrix& v, const AmplifierModel& amp) {
  check_amp(v, amp);
  const int n = v.n_modes();
  Eigen::VectorXd t(2 * n), noise(2 * n);
  for (int j = 0; j < n; ++j) {
    t(2 * j) = t(2 * j + 1) = std::sqrt(amp.gain[j]);
    noise(2 * j) = noise(2 * j + 1) = amp.noise_term(j);
  }
  Eigen::MatrixXd out = t.asDiagonal() * v.matrix() * t.asDiagonal();
  out.diagonal() += noise;
  return CovarianceMatrix(out);
}

CovarianceMatrix deamplify(const CovarianceMatrix& v_amplified, const AmplifierModel& amp) {
  check_amp(v_amplified, amp);
  const int n = v_amplified.n_modes();
  Eigen::VectorXd t_inv(2 * n), noise(2 * n);
  for (int j = 0; j < n; ++j) {
    t_inv(2 * j) = t_inv(2 * j + 1) = 1.0 / std::sqrt(amp.gain[j]);
    noise(2 * j) = noise(2 * j + 1) = amp.noise_term(j);
  }
  Eigen::MatrixXd out = v_amplified.matrix();
  out.diagonal() -= noise;
  out = t_inv.asDiagonal() * out * t_inv.asDiagonal();
  return CovarianceMatrix((out + out.transpose()) / 2.0);
}

double correlation_quantity(const CovarianceMatrix& v) {
  if (v.n_modes() != 2) throw DimensionMismatch("correlation quantity needs exactly two modes");
  return v.matrix().block<2, 2>(0, 2).norm();
}

namespace {

Eigen::VectorXd quadrature_scale(std::span<const double> omegas, double z0, double bandwidth_hz, Eigen::Index dim) {
  if (static_cast<Eigen::Index>(omegas.size()) * 2 != dim) throw DimensionMismatch("one frequency per mode expected");
  if (!(z0 > 0.0) || !(bandwidth_hz > 0.0)) throw InvalidArgument("impedance and bandwidth must be positive");
  Eigen::VectorXd s(dim);
  for (std::size_t j = 0; j < omegas.size(); ++j)
    s(2 * j) = s(2 * j + 1) = std::sqrt(0.5 * z0 * c::hbar * omegas[j] * bandwidth_hz);
  return s;
}

}  // namespace

CovarianceMatrix scale_to_vacuum_units(const Eigen::MatrixXd& raw, std::span<const double> omegas, double z0,
                                       double bandwidth_hz) {
  const Eigen::VectorXd s = quadrature_scale(omegas, z0, bandwidth_hz, raw.rows()).cwiseInverse();
  Eigen::MatrixXd out = s.asDiagonal() * raw * s.asDiagonal();
  return CovarianceMatrix((out + out.transpose()) / 2.0);
}

Eigen::MatrixXd scale_to_raw_units(const CovarianceMatrix& v, std::span<const double> omegas, double z0,
                                   double bandwidth_hz) {
  const Eigen::VectorXd s = quadrature_scale(omegas, z0, bandwidth_hz, v.matrix().rows());
  return s.asDiagonal() * v.matrix() * s.asDiagonal();
}

QuadratureSamples sample(const CovarianceMatrix& v, Eigen::Index n_samples, std::uint64_t seed, PumpState state) {
  if (n_samples <= 0) throw InvalidArgument("n_samples must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.matrix());
  Eigen::VectorXd w = es.eigenvalues();
  const double floor = -1e-10 * std::max(1.0, w.cwiseAbs().maxCoeff());
  if (w.minCoeff() < floor) throw NotPSD("covariance has eigenvalue " + std::to_string(w.minCoeff()));
  w = w.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();

  const Eigen::Index dim = v.matrix().rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(dim, n_samples);
  for (Eigen::Index s = 0; s < n_samples; ++s)
    for (Eigen::Index d = 0; d < dim; ++d) z(d, s) = normal(rng);

  QuadratureSamples out;
  out.n_modes = v.n_modes();
  out.samples = (root * z).transpose();
  out.pump_state = state;
  out.seed = seed;
  return out;
}

SampleMoments sample_moments(const QuadratureSamples& s) {
  const Eigen::Index n = s.n_samples();
  if (n < 2) throw EmptySamples("need at least two samples");
  const Eigen::Index dim = s.samples.cols();
  Eigen::MatrixXd mean = (s.samples.transpose() * s.samples) / static_cast<double>(n);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = a; b < dim; ++b) {
      const double m2 = (s.samples.col(a).array() * s.samples.col(b).array()).square().sum() / static_cast<double>(n);
      const double var = std::max(0.0, m2 - mean(a, b) * mean(a, b)) * n / static_cast<double>(n - 1);
      sq(a, b) = sq(b, a) = std::sqrt(var / static_cast<double>(n));
    }
  }
  return {CovarianceMatrix((mean + mean.transpose()) / 2.0), sq};
}

void rotate_mode(QuadratureSamples& s, int mode, double angle) {
  const double co = std::cos(angle), si = std::sin(angle);
  auto i_col = s.samples.col(2 * mode);
  auto q_col = s.samples.col(2 * mode + 1);
  const Eigen::VectorXd i_new = co * i_col + si * q_col;
  const Eigen::VectorXd q_new = -si * i_col + co * q_col;
  i_col = i_new;
  q_col = q_new;
}

CovarianceMatrix rotate_modes(const CovarianceMatrix& v, std::span<const double> angles) {
  const int n = v.n_modes();
  if (static_cast<int>(angles.size()) != n) throw DimensionMismatch("one angle per mode expected");
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const double co = std::cos(angles[j]), si = std::sin(angles[j]);
    r.block<2, 2>(2 * j, 2 * j) << co, si, -si, co;
  }
  Eigen::MatrixXd out = r * v.matrix() * r.transpose();
  return CovarianceMatrix((out + out.transpose()) / 2.0);
}

double align_pair_phase(QuadratureSamples& s, int mode_j, int mode_k) {
  const double ii = s.samples.col(2 * mode_j).dot(s.samples.col(2 * mode_k));
  const double iq = s.samples.col(2 * mode_j).dot(s.samples.col(2 * mode_k + 1));
  const double angle = std::atan2(iq, ii);
  rotate_mode(s, mode_k, angle);
  return angle;
}

SqueezingStats squeezing_stats(const QuadratureSamples& on, const QuadratureSamples& off, int mode_j, int mode_k) {
  if (on.n_samples() == 0 || off.n_samples() == 0) throw EmptySamples("squeezing statistics need samples");
  for (int m : {mode_j, mode_k})
    if (m < 0 || m >= on.n_modes || m >= off.n_modes) throw InvalidArgument("mode outside the sample set");
  const auto ij = on.samples.col(2 * mode_j).array();
  const auto ik = on.samples.col(2 * mode_k).array();
  const double n_on = static_cast<double>(on.n_samples());
  SqueezingStats st;
  st.sigma_sum = std::sqrt((ik + ij).square().sum() / n_on);
  st.sigma_diff = std::sqrt((ik - ij).square().sum() / n_on);
  const double n_off = static_cast<double>(off.n_samples());
  const double var_off = 0.5 * (off.samples.col(2 * mode_j).squaredNorm() + off.samples.col(2 * mode_k).squaredNorm()) / n_off;
  st.sigma_off = std::sqrt(var_off);
  const double hi = std::max(st.sigma_sum, st.sigma_diff);
  const double lo = std::min(st.sigma_sum, st.sigma_diff);
  if (!(lo > 0.0) || !(st.sigma_off > 0.0)) throw EmptySamples("degenerate samples");
  st.r_e = hi / lo;
  st.r_p = lo / st.sigma_off;
  return st;
}

Histogram2d histogram_iq(const QuadratureSamples& s, int mode_j, int mode_k, double bin_width, int bins) {
  if (!(bin_width > 0.0) || bins <= 0) throw InvalidArgument("histogram needs positive bin width and count");
  Histogram2d h;
  h.bin_width = bin_width;
  h.bins = bins;
  h.counts = Eigen::MatrixXd::Zero(bins, bins);
  const double half = bin_width * bins / 2.0;
  for (Eigen::Index r = 0; r < s.n_samples(); ++r) {
    const double x = s.samples(r, 2 * mode_j) + half;
    const double y = s.samples(r, 2 * mode_k) + half;
    if (x < 0.0 || y < 0.0) continue;
    const auto bx = static_cast<int>(x / bin_width);
    const auto by = static_cast<int>(y / bin_width);
    if (bx < bins && by < bins) h.counts(by, bx) += 1.0;
  }
  if (s.n_samples() > 0) h.counts /= static_cast<double>(s.n_samples());
  return h;
}

}  // namespace sawcomb
