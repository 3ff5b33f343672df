#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "sawcomb/modesys.hpp"

namespace sawcomb {

/// A (pump, mode pair) satisfying ω_j + ω_k ≈ 2ω_p. Mode entries are positions
/// in the mode list handed to match_four_wave, with mode_j <= mode_k.
struct FourWaveMatch {
  int pump_index = 0;
  int mode_j = 0;
  int mode_k = 0;
  double mismatch = 0.0;  // 2ω_p - ω_j - ω_k, rad/s

  bool operator==(const FourWaveMatch&) const = default;
};

/// Parametric coupling accumulated on one mode pair (all pumps summed).
struct PairCoupling {
  int mode_j = 0;
  int mode_k = 0;
  std::complex<double> epsilon;
};

/// Mode-coupling matrix in the ladder basis (b_1..b_N, b_1†..b_N†):
///   M = [[A, B], [-conj(B), -conj(A)]],  A = diag(Δ_j),  B_jk = -ε_jk.
struct CouplingMatrix {
  int n_modes = 0;
  Eigen::MatrixXcd m;
  std::vector<std::complex<double>> probe_detunings;
  std::vector<PairCoupling> couplings;

  Eigen::MatrixXcd a_block() const { return m.topLeftCorner(n_modes, n_modes); }
  Eigen::MatrixXcd b_block() const { return m.topRightCorner(n_modes, n_modes); }
};

/// Every (pump, j<=k) with |2ω_p - ω_j - ω_k| <= tolerance, ordered by
/// (pump_index, mode_j, mode_k). Throws InvalidArgument for tolerance <= 0.
std::vector<FourWaveMatch> match_four_wave(std::span<const ModeSpec> modes,
                                           std::span<const PumpTone> pumps, double tolerance);

/// Half the narrowest total linewidth.
double default_match_tolerance(std::span<const ModeSpec> modes);

/// Drops modes that coincide with a pump tone (within tolerance) unless
/// include_pump_modes is set.
std::vector<ModeSpec> select_probe_modes(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                                         double tolerance, bool include_pump_modes = false);

/// ε for one match: explicit override magnitude if the tone carries one,
/// otherwise d g̃_j g̃_k / 2ħ, with phase -2θ either way.
std::complex<double> match_coupling(const FourWaveMatch& match, std::span<const PumpTone> pumps,
                                    const MirrorSpec& mirror, const EffectiveCouplings& eff);

/// Per-mode frequency shift: 2 Σ |ε| over the pairs the mode takes part in.
/// Reduces to 4|ε| for the uniform two-neighbour ring.
std::vector<double> pump_frequency_shifts(int n_modes, std::span<const PairCoupling> couplings);

CouplingMatrix build_coupling_matrix(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                                     const MirrorSpec& mirror, std::span<const double> probe_omegas,
                                     std::span<const FourWaveMatch> matches);

/// Probe frequencies Ω_j = ω̃_j - shift_j for which every Δ_j reduces to iγ_tot/2.
std::vector<double> resonant_probe_omegas(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                                          const MirrorSpec& mirror, std::span<const FourWaveMatch> matches);

/// Rows of the matrix with real and imaginary parts interleaved.
void write_coupling_csv(std::ostream& os, const CouplingMatrix& cm);

}  // namespace sawcomb
