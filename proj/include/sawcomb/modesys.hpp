#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace sawcomb {

/// One resonator (SAW) mode. All rates are angular (rad/s).
struct ModeSpec {
  int index = 0;
  double omega = 0.0;
  double gamma_ext = 0.0;
  double gamma_int = 0.0;

  /// Builds a mode from ordinary frequencies; losses are full linewidths in Hz.
  static ModeSpec from_hz(int index, double freq_hz, double loss_ext_hz, double loss_int_hz);

  double gamma_tot() const { return gamma_ext + gamma_int; }
  void validate() const;
};

/// The LC mode formed by the SQUID-shunted mirror.
struct MirrorSpec {
  double omega_lc = 0.0;
  double g_vac = 0.0;
  std::optional<double> l_j;      // H
  std::optional<double> c_total;  // F

  static MirrorSpec from_hz(double freq_lc_hz, double g_vac_hz);
  /// omega_lc = 1/sqrt(L_J C).
  static MirrorSpec from_circuit(double l_j, double c_total, double g_vac_hz);

  void validate() const;
};

/// A flux-pump tone. phi_ac is the flux amplitude in units of the flux quantum.
///
/// `epsilon_override` replaces the microscopic coupling d·g̃_j·g̃_k/2ħ by a fixed
/// magnitude (rad/s) for every pair the tone matches; the phase still follows
/// theta. This is how phenomenological pump strengths are specified.
struct PumpTone {
  double omega_p = 0.0;
  double phi_ac = 0.0;
  double theta = 0.0;
  std::optional<double> epsilon_override;

  static PumpTone from_hz(double freq_hz, double phi_ac, double theta);
  void validate() const;
};

/// Substrate and mirror parameters entering the vacuum-coupling estimate.
struct MaterialParams {
  double e14 = 0.0;     // C/m^2
  double eps = 0.0;     // F/m
  double rho = 0.0;     // kg/m^3
  double v_saw = 0.0;   // m/s
  double area = 0.0;    // m^2
  double l_p = 0.0;     // m
  double l_m = 0.0;     // m
  double e_l = 0.0;     // J
  double e_c = 0.0;     // J

  void validate() const;
};

/// Resonator modes (sorted by frequency, unique indices) plus the mirror.
class ModeSystem {
 public:
  ModeSystem(std::vector<ModeSpec> modes, MirrorSpec mirror);

  const std::vector<ModeSpec>& modes() const { return modes_; }
  const MirrorSpec& mirror() const { return mirror_; }
  std::size_t size() const { return modes_.size(); }
  /// Position of the mode carrying `index`; throws InvalidArgument if absent.
  std::size_t position_of(int index) const;

 private:
  std::vector<ModeSpec> modes_;
  MirrorSpec mirror_;
};

struct EffectiveCouplings {
  std::vector<double> g_tilde;
  std::vector<double> g_bar;
};

/// Dispersive couplings g̃_j = -2gω_j/(ω_LC²-ω_j²) and ḡ_j = 2gω_LC/(ω_LC²-ω_j²).
/// Throws DegenerateMode when a mode sits within 1e6 rad/s of the LC mode.
EffectiveCouplings effective_couplings(const MirrorSpec& mirror, std::span<const ModeSpec> modes);

/// Vacuum coupling g (rad/s) from the zero-point voltage and mirror charge fluctuations.
double estimate_vacuum_coupling(const MaterialParams& m);

/// Charging energy e²/2C and inductive energy (Φ₀/2π)²/L_J.
double charging_energy(double c_total);
double inductive_energy(double l_j);

/// Effective pump amplitude d = ħω_LC(πΦ_AC/2Φ₀)²/2, in joules.
double pump_amplitude(const MirrorSpec& mirror, const PumpTone& tone);

/// ε_jk = d g̃_j g̃_k / (2ħ) · exp(-2iθ), rad/s.
std::complex<double> parametric_coupling(double d, double g_tilde_j, double g_tilde_k, double theta);

/// Renormalised mode frequency ω̃_j = ω_j + g ḡ_j.
double renormalized_frequency(const MirrorSpec& mirror, const ModeSpec& mode, double g_bar);

}  // namespace sawcomb
