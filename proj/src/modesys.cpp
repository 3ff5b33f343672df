#include "sawcomb/modesys.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "sawcomb/constants.hpp"
#include "sawcomb/errors.hpp"

namespace sawcomb {

namespace c = constants;

namespace {
constexpr double kDegenerateGap = 1e6;  // rad/s
}

ModeSpec ModeSpec::from_hz(int index, double freq_hz, double loss_ext_hz, double loss_int_hz) {
  ModeSpec m{index, c::to_angular(freq_hz), c::to_angular(loss_ext_hz), c::to_angular(loss_int_hz)};
  m.validate();
  return m;
}

void ModeSpec::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw InvalidArgument("mode " + std::to_string(index) + ": omega must be positive");
  if (!(gamma_ext >= 0.0) || !(gamma_int >= 0.0))
    throw InvalidArgument("mode " + std::to_string(index) + ": loss rates must be non-negative");
}

MirrorSpec MirrorSpec::from_hz(double freq_lc_hz, double g_vac_hz) {
  MirrorSpec m;
  m.omega_lc = c::to_angular(freq_lc_hz);
  m.g_vac = c::to_angular(g_vac_hz);
  m.validate();
  return m;
}

MirrorSpec MirrorSpec::from_circuit(double l_j, double c_total, double g_vac_hz) {
  if (!(l_j > 0.0) || !(c_total > 0.0)) throw InvalidArgument("mirror: L_J and C must be positive");
  MirrorSpec m;
  m.omega_lc = 1.0 / std::sqrt(l_j * c_total);
  m.g_vac = c::to_angular(g_vac_hz);
  m.l_j = l_j;
  m.c_total = c_total;
  m.validate();
  return m;
}

void MirrorSpec::validate() const {
  if (!(omega_lc > 0.0)) throw InvalidArgument("mirror: omega_lc must be positive");
  if (!(g_vac >= 0.0)) throw InvalidArgument("mirror: g_vac must be non-negative");
  if (l_j && c_total) {
    const double expected = 1.0 / std::sqrt(*l_j * *c_total);
    if (std::abs(omega_lc - expected) > 1e-9 * expected)
      throw InvalidArgument("mirror: omega_lc inconsistent with 1/sqrt(L_J C)");
  }
}

PumpTone PumpTone::from_hz(double freq_hz, double phi_ac, double theta) {
  PumpTone p{c::to_angular(freq_hz), phi_ac, theta, std::nullopt};
  p.validate();
  return p;
}

void PumpTone::validate() const {
  if (!(omega_p > 0.0)) throw InvalidArgument("pump: omega_p must be positive");
  // the second-order flux expansion of the drive term stops making sense well before Φ₀/2
  if (!(phi_ac >= 0.0 && phi_ac < 0.5)) throw InvalidArgument("pump: phi_ac must lie in [0, 0.5)");
  if (epsilon_override && !(*epsilon_override >= 0.0))
    throw InvalidArgument("pump: epsilon override must be non-negative");
}

void MaterialParams::validate() const {
  for (double v : {e14, eps, rho, v_saw, area, l_p, l_m, e_l, e_c})
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("material parameters must be strictly positive");
  if (l_p > l_m) throw InvalidArgument("penetration depth exceeds mirror length");
}

ModeSystem::ModeSystem(std::vector<ModeSpec> modes, MirrorSpec mirror)
    : modes_(std::move(modes)), mirror_(mirror) {
  mirror_.validate();
  std::set<int> seen;
  for (const auto& m : modes_) {
    m.validate();
    if (!seen.insert(m.index).second)
      throw InvalidArgument("duplicate mode index " + std::to_string(m.index));
  }
  std::stable_sort(modes_.begin(), modes_.end(),
                   [](const ModeSpec& a, const ModeSpec& b) { return a.omega < b.omega; });
}

std::size_t ModeSystem::position_of(int index) const {
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].index == index) return i;
  throw InvalidArgument("no mode with index " + std::to_string(index));
}

EffectiveCouplings effective_couplings(const MirrorSpec& mirror, std::span<const ModeSpec> modes) {
  EffectiveCouplings out;
  out.g_tilde.reserve(modes.size());
  out.g_bar.reserve(modes.size());
  const double wlc = mirror.omega_lc;
  for (const auto& m : modes) {
    if (std::abs(m.omega - wlc) < kDegenerateGap)
      throw DegenerateMode("mode " + std::to_string(m.index) + " is within 1e6 rad/s of the LC mode");
    const double denom = wlc * wlc - m.omega * m.omega;
    out.g_tilde.push_back(-2.0 * mirror.g_vac * m.omega / denom);
    out.g_bar.push_back(2.0 * mirror.g_vac * wlc / denom);
  }
  return out;
}

double charging_energy(double c_total) { return c::e_charge * c::e_charge / (2.0 * c_total); }

double inductive_energy(double l_j) {
  const double reduced = c::flux_quantum / c::two_pi;
  return reduced * reduced / l_j;
}

double estimate_vacuum_coupling(const MaterialParams& m) {
  m.validate();
  // zero-point voltage of the SAW mode
  const double phi0 = (m.e14 / m.eps) * std::sqrt(c::hbar / (2.0 * m.rho * m.v_saw * m.area));
  // charge fluctuation on the mirror fingers seen by the SAW field
  const double beta = m.l_p / m.l_m;
  const double q0 = 2.0 * c::e_charge * beta * std::pow(m.e_l / (32.0 * m.e_c), 0.25);
  return phi0 * q0 / c::hbar;
}

double pump_amplitude(const MirrorSpec& mirror, const PumpTone& tone) {
  tone.validate();
  const double x = c::pi * tone.phi_ac / 2.0;
  return c::hbar * mirror.omega_lc * x * x / 2.0;
}

std::complex<double> parametric_coupling(double d, double g_tilde_j, double g_tilde_k, double theta) {
  const double magnitude = d * g_tilde_j * g_tilde_k / (2.0 * c::hbar);
  return std::polar(1.0, -2.0 * theta) * magnitude;
}

double renormalized_frequency(const MirrorSpec& mirror, const ModeSpec& mode, double g_bar) {
  return mode.omega + mirror.g_vac * g_bar;
}

}  // namespace sawcomb
