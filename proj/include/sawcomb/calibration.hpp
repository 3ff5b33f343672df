#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sawcomb/gaussian_state.hpp"
#include "sawcomb/modesys.hpp"

namespace sawcomb {

/// Noise power per unit bandwidth, P = G h f [½coth(hf/2k_BT) + ½(2n+1)], in W/Hz.
double planck_power(double temperature, double freq_hz, double gain, double added_photons);

struct PlanckFit {
  double gain = 0.0;
  double added_photons = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // over (G, n)
  double rms_relative_residual = 0.0;
};

/// Least-squares (G, n) from output noise power versus source temperature.
/// Throws InsufficientData for fewer than three distinct temperatures,
/// InvalidArgument for non-positive powers and FitDiverged if the solver fails.
PlanckFit planck_fit(std::span<const double> temps, std::span<const double> powers, double freq_hz);

/// A symmetric pumped pair probed around its resonances. The pump sits at the
/// mean mode frequency; a probe detuning δ moves mode a down and mode b up.
struct LineshapeModel {
  ModeSpec mode_a;
  ModeSpec mode_b;
  MirrorSpec mirror;
};

/// Correlation C = sqrt(Ṽ₁₃² + Ṽ₁₄² + Ṽ₂₃² + Ṽ₂₄²) of the amplified output for a
/// thermal input at t_eff on both the signal and the loss ports.
double c_lineshape(double delta, double gain, double epsilon, const LineshapeModel& model, double t_eff);

struct CorrelationFit {
  double gain = 0.0;
  double epsilon = 0.0;                                   // rad/s
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // over (G, ε)
  double rms_relative_residual = 0.0;
};

/// Fits (G, |ε|) to measured (δ, C) pairs at a fixed effective temperature.
CorrelationFit fit_gain_from_correlations(std::span<const double> deltas, std::span<const double> c_values,
                                          const LineshapeModel& model, double t_eff);

/// Solves Ṽ_ii = G(2n̄+1) + (G-1)(2n+1) for n on each diagonal element of a
/// pump-off covariance (n̄ thermal at t_eff) and returns the average.
/// Throws GainBelowUnity for G <= 1 and NegativeNoise if the average is negative.
double added_noise_from_pump_off(const CovarianceMatrix& v_off, double gain, double t_eff,
                                 std::span<const double> omegas);

struct SweepPoint {
  double temperature = 0.0;
  double gain = 0.0;
  double added_photons = 0.0;
  double lambda_min = 0.0;
};

struct TemperatureSweep {
  std::vector<SweepPoint> points;
  std::optional<double> zero_crossing;  // linear interpolation between bracketing points
};

/// For each assumed temperature: refit G from the correlation data, infer n
/// from the pump-off covariance, de-amplify the pump-on covariance and record
/// the PPT eigenvalue across the pair. t_grid must be increasing.
TemperatureSweep ppt_temperature_sweep(const CovarianceMatrix& v_meas_on, const CovarianceMatrix& v_off,
                                       std::span<const double> deltas, std::span<const double> c_values,
                                       const LineshapeModel& model, std::span<const double> t_grid);

/// Temperature at which a pair pumped on resonance at |ε| stops being PPT
/// entangled when the input and the inferred calibration share that
/// temperature: T* = ħω / (2k_B atanh(a - |c|)), with a and |c| the local and
/// cross terms of the vacuum-input output state. Uses mode_a's rates.
double two_mode_ppt_threshold(const LineshapeModel& model, double epsilon);

/// Calibration results keyed by frequency in Hz.
class CalibrationStore {
 public:
  struct Entry {
    double gain = 1.0;
    double added_photons = 0.0;
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  };

  void put(double freq_hz, const Entry& e) { entries_[freq_hz] = e; }
  /// Exact-key lookup; throws InvalidArgument if missing.
  const Entry& at(double freq_hz) const;
  const std::map<double, Entry>& entries() const { return entries_; }

  /// Amplifier model for the listed frequencies with the idler gain tied to
  /// the signal gain and idler noise thermal at idler_temp_k.
  AmplifierModel amplifier(std::span<const double> freqs_hz, double idler_temp_k = 0.030) const;

  std::string to_json() const;
  static CalibrationStore from_json(const std::string& text);

 private:
  std::map<double, Entry> entries_;
};

}  // namespace sawcomb
