#include "sawcomb/scattering.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "sawcomb/errors.hpp"
#include "sawcomb/io.hpp"

namespace sawcomb {

namespace {

Eigen::VectorXd doubled_sqrt(std::span<const double> rates) {
  const auto n = static_cast<Eigen::Index>(rates.size());
  Eigen::VectorXd k(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(rates[j] >= 0.0)) throw InvalidArgument("loss rates must be non-negative");
    k(j) = k(n + j) = std::sqrt(rates[j]);
  }
  return k;
}

}  // namespace

ScatteringPair scattering_matrices(const CouplingMatrix& cm, std::span<const double> gamma_ext,
                                   std::span<const double> gamma_int, const ScatteringOptions& opts) {
  const int n = cm.n_modes;
  if (static_cast<int>(gamma_ext.size()) != n || static_cast<int>(gamma_int.size()) != n)
    throw DimensionMismatch("loss-rate lists must have one entry per mode");
  if (cm.m.rows() != 2 * n || cm.m.cols() != 2 * n) throw DimensionMismatch("coupling matrix is not 2N×2N");

  if (!opts.allow_unstable) {
    for (const auto& c : cm.couplings) {
      const double gj = gamma_ext[c.mode_j] + gamma_int[c.mode_j];
      const double gk = gamma_ext[c.mode_k] + gamma_int[c.mode_k];
      const double threshold = std::sqrt(gj * gk) / 2.0;
      if (std::abs(c.epsilon) >= threshold)
        throw InstabilityError("pair (" + std::to_string(c.mode_j) + "," + std::to_string(c.mode_k) +
                               ") pumped at |ε| >= γ_tot/2");
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cm.m);
  // |det M| relative to the Hadamard bound of its columns
  double log_bound = 0.0;
  for (Eigen::Index c = 0; c < cm.m.cols(); ++c) log_bound += std::log(cm.m.col(c).norm());
  const double log_det = lu.matrixLU().diagonal().array().abs().log().sum();
  if (!std::isfinite(log_det) || log_det - log_bound < std::log(1e-12))
    throw SingularMatrix("coupling matrix is singular (parametric instability)");

  const Eigen::VectorXd k = doubled_sqrt(gamma_ext);
  const Eigen::VectorXd k_int = doubled_sqrt(gamma_int);
  const Eigen::MatrixXcd m_inv = lu.inverse();
  const std::complex<double> i(0.0, 1.0);

  ScatteringPair out;
  out.s = i * (k.asDiagonal() * m_inv * k.asDiagonal());
  out.s -= Eigen::MatrixXcd::Identity(2 * n, 2 * n);
  out.s_loss = i * (k.asDiagonal() * m_inv * k_int.asDiagonal());
  out.basis = Basis::ladder;
  return out;
}

bool is_stable(const CouplingMatrix& cm) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(cm.m, false);
  return (es.eigenvalues().array().imag() > 0.0).all();
}

Eigen::MatrixXcd quadrature_transform(int n_modes) {
  const std::complex<double> i(0.0, 1.0);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * n_modes, 2 * n_modes);
  for (int j = 0; j < n_modes; ++j) {
    u(2 * j, j) = 1.0;
    u(2 * j, n_modes + j) = 1.0;
    u(2 * j + 1, j) = -i;
    u(2 * j + 1, n_modes + j) = i;
  }
  return u;
}

Eigen::MatrixXd to_quadrature(const Eigen::MatrixXcd& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) throw DimensionMismatch("expected a 2N×2N matrix");
  const int n = static_cast<int>(s.rows() / 2);
  const Eigen::MatrixXcd u = quadrature_transform(n);
  // U⁻¹ = U†/2
  const Eigen::MatrixXcd t = u * s * u.adjoint() / 2.0;
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  const double residue = t.imag().cwiseAbs().maxCoeff();
  if (residue > 1e-9 * scale)
    throw NonPhysicalInput("quadrature transform left an imaginary residue of " + io::format_double(residue));
  return t.real();
}

ScatteringPair to_quadrature(const ScatteringPair& pair) {
  if (pair.basis == Basis::quadrature) return pair;
  ScatteringPair out;
  out.s = to_quadrature(pair.s).cast<std::complex<double>>();
  out.s_loss = to_quadrature(pair.s_loss).cast<std::complex<double>>();
  out.basis = Basis::quadrature;
  return out;
}

Eigen::MatrixXd pseudo_unitary_metric(int n_modes) {
  Eigen::VectorXd d(2 * n_modes);
  d.head(n_modes).setOnes();
  d.tail(n_modes).setConstant(-1.0);
  return d.asDiagonal();
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int j = 0; j < n_modes; ++j) {
    o(2 * j, 2 * j + 1) = 1.0;
    o(2 * j + 1, 2 * j) = -1.0;
  }
  return o;
}

void write_scattering_csv(std::ostream& os, const ScatteringPair& pair, int ref_out, int ref_in) {
  if (pair.basis != Basis::ladder) throw InvalidArgument("scattering export expects the ladder basis");
  const int n = static_cast<int>(pair.s.rows() / 2);
  if (ref_out < 0 || ref_out >= n || ref_in < 0 || ref_in >= n)
    throw InvalidArgument("reference element outside the mode range");
  auto amplitude = [&](int out_mode, int in_mode) {
    return std::hypot(std::abs(pair.s(out_mode, in_mode)), std::abs(pair.s(out_mode, n + in_mode)));
  };
  const double ref = amplitude(ref_out, ref_in);
  if (!(ref > 0.0)) throw InvalidArgument("reference element has zero amplitude");
  os << "out_mode,in_mode,magnitude_db,direct_re,direct_im,conjugate_re,conjugate_im\n";
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const double a = amplitude(k, j);
      const double db = a > 0.0 ? 20.0 * std::log10(a / ref) : -400.0;
      os << k << ',' << j << ',' << io::format_double(db) << ',' << io::format_double(pair.s(k, j).real()) << ','
         << io::format_double(pair.s(k, j).imag()) << ',' << io::format_double(pair.s(k, n + j).real()) << ','
         << io::format_double(pair.s(k, n + j).imag()) << '\n';
    }
  }
}

}  // namespace sawcomb
