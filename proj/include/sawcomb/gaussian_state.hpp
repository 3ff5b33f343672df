#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sawcomb/modesys.hpp"
#include "sawcomb/scattering.hpp"

namespace sawcomb {

/// Real symmetric quadrature covariance in the interleaved order
/// (I_1, Q_1, ..., I_N, Q_N), normalised so that vacuum is the identity.
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  /// Throws DimensionMismatch for non-square/odd input and InvalidArgument if
  /// the asymmetry exceeds 1e-12 of the matrix scale; the stored matrix is
  /// exactly symmetrised.
  explicit CovarianceMatrix(const Eigen::MatrixXd& v);

  static CovarianceMatrix identity(int n_modes);
  /// Builds from block order (I_1..I_N, Q_1..Q_N).
  static CovarianceMatrix from_block_order(const Eigen::MatrixXd& v);

  int n_modes() const { return static_cast<int>(v_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return v_; }
  double operator()(Eigen::Index r, Eigen::Index c) const { return v_(r, c); }

  Eigen::MatrixXd block_order() const;
  Eigen::MatrixXd ii_block() const;
  Eigen::MatrixXd qq_block() const;
  Eigen::MatrixXd iq_block() const;

  /// Restriction to the listed modes (in the given order).
  CovarianceMatrix submatrix(std::span<const int> modes) const;

  /// λ_min(V).
  double min_eigenvalue() const;
  /// λ_min(V + iΩ); non-negative for states obeying the uncertainty relation.
  double min_physical_eigenvalue() const;
  bool is_psd(double tol = 1e-9) const { return min_eigenvalue() >= -tol; }
  bool is_physical(double tol = 1e-9) const { return is_psd(tol) && min_physical_eigenvalue() >= -tol; }

 private:
  Eigen::MatrixXd v_;
};

/// Index map: block_position[k] is the interleaved index stored at block slot k.
std::vector<int> interleaved_to_block_order(int n_modes);

/// Hermitian V + iΩ.
Eigen::MatrixXcd physicality_matrix(const Eigen::MatrixXd& v);

/// Per-mode amplifier chain: Ṽ = T V T + N with T = ⊕√G_i and
/// N = ⊕[(G_i-1)(2n_i+1) + (G_I,i-1)(2n_I,i+1)].
struct AmplifierModel {
  std::vector<double> gain;
  std::vector<double> added_photons;
  std::vector<double> idler_gain;     // 1 means no idler contribution
  std::vector<double> idler_photons;
  /// Per-mode covariance of the fitted (G_i, n_i); absent when the model was
  /// not produced by a fit.
  std::optional<std::vector<Eigen::Matrix2d>> fit_covariance;

  static AmplifierModel uniform(int n_modes, double gain, double added_photons);

  int n_modes() const { return static_cast<int>(gain.size()); }
  double noise_term(int mode) const;
  double sigma_gain(int mode) const;
  double sigma_noise(int mode) const;
  double cov_gain_noise(int mode) const;
  /// Throws GainBelowUnity / InvalidArgument on violated invariants.
  void validate() const;
};

enum class PumpState { on, off };

struct QuadratureSamples {
  int n_modes = 0;
  Eigen::MatrixXd samples;  // n_samples × 2N
  PumpState pump_state = PumpState::on;
  std::uint64_t seed = 0;

  Eigen::Index n_samples() const { return samples.rows(); }
};

struct SqueezingStats {
  double r_e = 1.0;
  double r_p = 1.0;
  double sigma_sum = 0.0;   // sqrt<(I₊ + I₋)²>
  double sigma_diff = 0.0;  // sqrt<(I₊ - I₋)²>
  double sigma_off = 0.0;
};

/// Mean Bose occupation at angular frequency omega and temperature T.
double bose_occupation(double omega, double temperature);

/// Diagonal thermal state, V_ii = 2n̄(ω_i, T) + 1.
CovarianceMatrix thermal_covariance(std::span<const ModeSpec> modes, double temperature);

/// Standard two-mode squeezed vacuum, [[cosh2r·I, sinh2r·Z], [sinh2r·Z, cosh2r·I]], Z = diag(1,-1).
CovarianceMatrix two_mode_squeezed(double r);

/// V_out = S V_in Sᵀ + S_loss V_loss S_lossᵀ (quadrature basis).
CovarianceMatrix output_covariance(const ScatteringPair& sc, const CovarianceMatrix& v_in,
                                   const CovarianceMatrix& v_loss);

CovarianceMatrix amplify(const CovarianceMatrix& v, const AmplifierModel& amp);
CovarianceMatrix deamplify(const CovarianceMatrix& v_amplified, const AmplifierModel& amp);

/// sqrt(V₁₃² + V₁₄² + V₂₃² + V₂₄²) of a two-mode covariance.
double correlation_quantity(const CovarianceMatrix& v);

/// Converts raw quadrature second moments (V²) into vacuum units:
/// V_ij = <A_i A_j> / (½ Z₀ ħ sqrt(ω_i ω_j) Δ_BW).
CovarianceMatrix scale_to_vacuum_units(const Eigen::MatrixXd& raw, std::span<const double> omegas, double z0,
                                       double bandwidth_hz);
/// Inverse of scale_to_vacuum_units.
Eigen::MatrixXd scale_to_raw_units(const CovarianceMatrix& v, std::span<const double> omegas, double z0,
                                   double bandwidth_hz);

/// Zero-mean multivariate normal draws through the symmetric PSD square root.
/// Throws NotPSD when an eigenvalue is below -1e-10.
QuadratureSamples sample(const CovarianceMatrix& v, Eigen::Index n_samples, std::uint64_t seed,
                         PumpState state = PumpState::on);

struct SampleMoments {
  CovarianceMatrix covariance;
  Eigen::MatrixXd standard_error;  // standard error of the mean of x_a x_b
};

/// Second moments <x_a x_b> (zero mean assumed) with their standard errors.
SampleMoments sample_moments(const QuadratureSamples& s);

/// Rotates mode `mode` by angle: I' = cos·I + sin·Q, Q' = -sin·I + cos·Q.
void rotate_mode(QuadratureSamples& s, int mode, double angle);
CovarianceMatrix rotate_modes(const CovarianceMatrix& v, std::span<const double> angles);

/// Angle for mode k that maximises <I_j I_k>; applied in place, returned.
double align_pair_phase(QuadratureSamples& s, int mode_j, int mode_k);

/// R_e = σ_max/σ_min over I₊ ± I₋ and R_p = σ_min/σ_off, with σ_off the
/// single-mode pump-off I standard deviation averaged over the pair.
SqueezingStats squeezing_stats(const QuadratureSamples& on, const QuadratureSamples& off, int mode_j, int mode_k);

struct Histogram2d {
  double bin_width = 0.0;
  int bins = 0;           // per axis, centred on zero
  Eigen::MatrixXd counts; // normalised to unit total
};

Histogram2d histogram_iq(const QuadratureSamples& s, int mode_j, int mode_k, double bin_width, int bins);

}  // namespace sawcomb
