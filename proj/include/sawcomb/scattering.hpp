#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>

#include "sawcomb/coupling_graph.hpp"

namespace sawcomb {

enum class Basis { ladder, quadrature };

/// Signal-port and internal-loss-port scattering matrices. In the quadrature
/// basis the entries are real (imaginary parts are exactly zero).
struct ScatteringPair {
  Eigen::MatrixXcd s;
  Eigen::MatrixXcd s_loss;
  Basis basis = Basis::ladder;
};

struct ScatteringOptions {
  /// Evaluate the steady-state formulas even when a pair is pumped at or
  /// beyond its two-mode threshold |ε| >= sqrt(γ_j γ_k)/2.
  bool allow_unstable = false;
};

/// S = i K M⁻¹ K - I and S_loss = i K M⁻¹ K_int with K = diag(√γ_ext) on both blocks.
ScatteringPair scattering_matrices(const CouplingMatrix& cm, std::span<const double> gamma_ext,
                                   std::span<const double> gamma_int, const ScatteringOptions& opts = {});

/// True when every eigenvalue of M lies in the upper half plane, i.e. the
/// linearised Langevin dynamics relax to the steady state being evaluated.
bool is_stable(const CouplingMatrix& cm);

/// Ladder -> interleaved (I_1, Q_1, ..., I_N, Q_N) with I = b + b†, Q = -i(b - b†).
Eigen::MatrixXcd quadrature_transform(int n_modes);

/// U S U⁻¹ for a 2N×2N ladder-basis matrix; throws NonPhysicalInput if the
/// result carries an imaginary residue above 1e-9 (relative to its scale).
Eigen::MatrixXd to_quadrature(const Eigen::MatrixXcd& s);
ScatteringPair to_quadrature(const ScatteringPair& pair);

/// diag(+1,...,+1,-1,...,-1), the metric preserved by Bogoliubov transforms.
Eigen::MatrixXd pseudo_unitary_metric(int n_modes);
/// Interleaved symplectic form ⊕ [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(int n_modes);

/// Mode-to-mode transmission table |S| in dB, referenced to element
/// (ref_out, ref_in). Each entry combines the direct (b←b) and conjugate
/// (b←b†) paths: sqrt(|S_kj|² + |S_k,N+j|²). Ladder basis only.
void write_scattering_csv(std::ostream& os, const ScatteringPair& pair, int ref_out, int ref_in);

}  // namespace sawcomb
