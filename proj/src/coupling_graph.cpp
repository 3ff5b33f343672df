#include "sawcomb/coupling_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include "sawcomb/errors.hpp"
#include "sawcomb/io.hpp"

namespace sawcomb {

std::vector<FourWaveMatch> match_four_wave(std::span<const ModeSpec> modes,
                                           std::span<const PumpTone> pumps, double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidArgument("match tolerance must be positive");
  std::vector<FourWaveMatch> out;
  const int n = static_cast<int>(modes.size());
  for (int p = 0; p < static_cast<int>(pumps.size()); ++p) {
    const double two_wp = 2.0 * pumps[p].omega_p;
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        const double mismatch = two_wp - modes[j].omega - modes[k].omega;
        if (std::abs(mismatch) <= tolerance) out.push_back({p, j, k, mismatch});
      }
    }
  }
  return out;
}

double default_match_tolerance(std::span<const ModeSpec> modes) {
  if (modes.empty()) throw InvalidArgument("no modes");
  double narrowest = modes.front().gamma_tot();
  for (const auto& m : modes) narrowest = std::min(narrowest, m.gamma_tot());
  if (!(narrowest > 0.0)) throw InvalidArgument("default tolerance needs non-zero linewidths");
  return narrowest / 2.0;
}

std::vector<ModeSpec> select_probe_modes(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                                         double tolerance, bool include_pump_modes) {
  std::vector<ModeSpec> out;
  for (const auto& m : modes) {
    const bool on_pump = std::any_of(pumps.begin(), pumps.end(), [&](const PumpTone& p) {
      return std::abs(p.omega_p - m.omega) <= tolerance;
    });
    if (include_pump_modes || !on_pump) out.push_back(m);
  }
  return out;
}

std::complex<double> match_coupling(const FourWaveMatch& match, std::span<const PumpTone> pumps,
                                    const MirrorSpec& mirror, const EffectiveCouplings& eff) {
  const PumpTone& tone = pumps[match.pump_index];
  if (tone.epsilon_override) return std::polar(*tone.epsilon_override, -2.0 * tone.theta);
  const double d = pump_amplitude(mirror, tone);
  return parametric_coupling(d, eff.g_tilde[match.mode_j], eff.g_tilde[match.mode_k], tone.theta);
}

std::vector<double> pump_frequency_shifts(int n_modes, std::span<const PairCoupling> couplings) {
  std::vector<double> shift(n_modes, 0.0);
  for (const auto& c : couplings) {
    shift[c.mode_j] += 2.0 * std::abs(c.epsilon);
    if (c.mode_k != c.mode_j) shift[c.mode_k] += 2.0 * std::abs(c.epsilon);
  }
  return shift;
}

namespace {

std::vector<PairCoupling> accumulate_couplings(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                                               const MirrorSpec& mirror, std::span<const FourWaveMatch> matches) {
  const int n = static_cast<int>(modes.size());
  const auto eff = effective_couplings(mirror, modes);
  std::map<std::pair<int, int>, std::complex<double>> acc;
  for (const auto& match : matches) {
    if (match.pump_index < 0 || match.pump_index >= static_cast<int>(pumps.size()) || match.mode_j < 0 ||
        match.mode_k >= n || match.mode_j > match.mode_k)
      throw InvalidArgument("four-wave match refers to an unknown pump or mode");
    acc[{match.mode_j, match.mode_k}] += match_coupling(match, pumps, mirror, eff);
  }
  std::vector<PairCoupling> out;
  for (const auto& [key, eps] : acc) out.push_back({key.first, key.second, eps});
  return out;
}

}  // namespace

CouplingMatrix build_coupling_matrix(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                                     const MirrorSpec& mirror, std::span<const double> probe_omegas,
                                     std::span<const FourWaveMatch> matches) {
  const int n = static_cast<int>(modes.size());
  if (probe_omegas.size() != modes.size())
    throw DimensionMismatch("probe_omegas has " + std::to_string(probe_omegas.size()) + " entries for " +
                            std::to_string(n) + " modes");
  CouplingMatrix cm;
  cm.n_modes = n;
  cm.couplings = accumulate_couplings(modes, pumps, mirror, matches);
  const auto eff = effective_couplings(mirror, modes);
  const auto shift = pump_frequency_shifts(n, cm.couplings);

  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double w_ren = renormalized_frequency(mirror, modes[j], eff.g_bar[j]);
    const std::complex<double> delta(probe_omegas[j] - w_ren + shift[j], modes[j].gamma_tot() / 2.0);
    a(j, j) = delta;
    cm.probe_detunings.push_back(delta);
  }
  for (const auto& c : cm.couplings) {
    b(c.mode_j, c.mode_k) = -c.epsilon;
    b(c.mode_k, c.mode_j) = -c.epsilon;
  }
  cm.m.resize(2 * n, 2 * n);
  cm.m << a, b, -b.conjugate(), -a.conjugate();
  return cm;
}

std::vector<double> resonant_probe_omegas(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                                          const MirrorSpec& mirror, std::span<const FourWaveMatch> matches) {
  const int n = static_cast<int>(modes.size());
  const auto couplings = accumulate_couplings(modes, pumps, mirror, matches);
  const auto eff = effective_couplings(mirror, modes);
  const auto shift = pump_frequency_shifts(n, couplings);
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = renormalized_frequency(mirror, modes[j], eff.g_bar[j]) - shift[j];
  return out;
}

void write_coupling_csv(std::ostream& os, const CouplingMatrix& cm) {
  const auto dim = cm.m.rows();
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (c) os << ',';
    os << "re_" << c << ",im_" << c;
  }
  os << '\n';
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      if (c) os << ',';
      os << io::format_double(cm.m(r, c).real()) << ',' << io::format_double(cm.m(r, c).imag());
    }
    os << '\n';
  }
}

}  // namespace sawcomb
