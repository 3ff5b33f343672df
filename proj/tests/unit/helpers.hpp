#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sawcomb/constants.hpp"
#include "sawcomb/coupling_graph.hpp"
#include "sawcomb/gaussian_state.hpp"
#include "sawcomb/modesys.hpp"
#include "sawcomb/scattering.hpp"

namespace testutil {

using namespace sawcomb;
inline constexpr double kTwoPi = constants::two_pi;

inline nlohmann::json load_json(const std::string& name) {
  std::ifstream in(std::string(SAWCOMB_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return nlohmann::json::parse(ss.str());
}

inline Eigen::MatrixXd to_matrix(const nlohmann::json& j) {
  Eigen::MatrixXd m(j.size(), j[0].size());
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

inline MirrorSpec mirror() { return MirrorSpec::from_hz(2.1e9, 1.6e6); }

// Two modes, one pump halfway between them, pumped at |eps| (rad/s).
struct TwoMode {
  std::vector<ModeSpec> modes;
  std::vector<PumpTone> pumps;
  std::vector<FourWaveMatch> matches;
  CouplingMatrix cm;
  ScatteringPair sc;
};

inline TwoMode two_mode(double eps, double g_ext_hz, double g_int_hz, double theta = 0.0, double delta = 0.0) {
  TwoMode t;
  t.modes = {ModeSpec::from_hz(0, 3.8557e9, g_ext_hz, g_int_hz), ModeSpec::from_hz(1, 3.8603e9, g_ext_hz, g_int_hz)};
  PumpTone p = PumpTone::from_hz(3.8580e9, 0.0, theta);
  p.epsilon_override = eps;
  t.pumps = {p};
  t.matches = match_four_wave(t.modes, t.pumps, default_match_tolerance(t.modes));
  auto probes = resonant_probe_omegas(t.modes, t.pumps, mirror(), t.matches);
  probes[0] += delta;
  probes[1] += delta;
  t.cm = build_coupling_matrix(t.modes, t.pumps, mirror(), probes, t.matches);
  std::vector<double> ge, gi;
  for (const auto& m : t.modes) {
    ge.push_back(m.gamma_ext);
    gi.push_back(m.gamma_int);
  }
  t.sc = scattering_matrices(t.cm, ge, gi);
  return t;
}

// Evenly spaced modes with a random subset of pumps between them.
struct RandomNetwork {
  std::vector<ModeSpec> modes;
  std::vector<PumpTone> pumps;
  CouplingMatrix cm;
  std::vector<double> g_ext, g_int;
};

inline RandomNetwork random_network(std::mt19937_64& rng, int n, bool lossy, double eps_fraction = 0.45,
                                    bool real_eps = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomNetwork r;
  const double spacing = 2.3e6;
  double min_gamma = 1e300;
  for (int k = 0; k < n; ++k) {
    const double ge = 10e3 + 30e3 * u(rng);
    const double gi = lossy ? 5e3 + 20e3 * u(rng) : 0.0;
    r.modes.push_back(ModeSpec::from_hz(k, 3.85e9 + spacing * k, ge, gi));
    r.g_ext.push_back(r.modes.back().gamma_ext);
    r.g_int.push_back(r.modes.back().gamma_int);
    min_gamma = std::min(min_gamma, r.modes.back().gamma_tot());
  }
  // Keep the whole network inside its stability region: total coupling per
  // mode stays below eps_fraction of the narrowest half-linewidth.
  const int n_pumps = 1 + static_cast<int>(u(rng) * 3);
  const double eps = eps_fraction * 0.5 * min_gamma / (2.0 * n_pumps);
  for (int p = 0; p < n_pumps; ++p) {
    const double half_steps = std::floor(u(rng) * (2 * n - 1));
    const double theta = kTwoPi * u(rng);
    PumpTone t = PumpTone::from_hz(3.85e9 + spacing * 0.5 * half_steps, 0.0, real_eps ? 0.0 : theta);
    t.epsilon_override = eps * (0.2 + 0.8 * u(rng));
    r.pumps.push_back(t);
  }
  const auto matches = match_four_wave(r.modes, r.pumps, default_match_tolerance(r.modes));
  auto probes = resonant_probe_omegas(r.modes, r.pumps, mirror(), matches);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (auto& w : probes) w += kTwoPi * 5e3 * nd(rng);
  r.cm = build_coupling_matrix(r.modes, r.pumps, mirror(), probes, matches);
  return r;
}

// Random physical two-mode covariance: local squeezers and rotations around a
// thermal two-mode squeezed state.
inline CovarianceMatrix random_physical(std::mt19937_64& rng, int n_modes, double nbar_max = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < 2 * n_modes; k += 2) {
    const double th = 1.0 + 2.0 * nbar_max * u(rng);
    v(k, k) = v(k + 1, k + 1) = th;
  }
  // random symplectic: product of two-mode squeezers and local rotations/squeezers
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  for (int rep = 0; rep < 3; ++rep) {
    for (int j = 0; j < n_modes; ++j) {
      Eigen::Matrix2d rot, sq;
      const double a = kTwoPi * u(rng), r = 0.6 * (u(rng) - 0.5);
      rot << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
      sq << std::exp(r), 0.0, 0.0, std::exp(-r);
      Eigen::MatrixXd local = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
      local.block<2, 2>(2 * j, 2 * j) = sq * rot;
      s = local * s;
    }
    for (int j = 0; j + 1 < n_modes; ++j) {
      const double r = 0.8 * u(rng);
      Eigen::MatrixXd tms = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
      const double c = std::cosh(r), sh = std::sinh(r);
      tms.block<2, 2>(2 * j, 2 * j) = c * Eigen::Matrix2d::Identity();
      tms.block<2, 2>(2 * j + 2, 2 * j + 2) = c * Eigen::Matrix2d::Identity();
      Eigen::Matrix2d z;
      z << sh, 0.0, 0.0, -sh;
      tms.block<2, 2>(2 * j, 2 * j + 2) = z;
      tms.block<2, 2>(2 * j + 2, 2 * j) = z;
      s = tms * s;
    }
  }
  Eigen::MatrixXd out = s * v * s.transpose();
  return CovarianceMatrix((out + out.transpose()) / 2.0);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Minimax reconstruction of one mode by bisection. V is physical iff V00 > 0
// and det V >= 1; inside the box the determinant is largest with both
// diagonals pushed up and the off-diagonal pulled towards zero, so the
// feasibility of a level t is a closed form.
inline double one_mode_reconstruct_oracle(const Eigen::Matrix2d& v, const Eigen::Matrix2d& s) {
  auto feasible = [&](double t) {
    const double a = v(0, 0) + t * s(0, 0), c = v(1, 1) + t * s(1, 1);
    const double lo = v(0, 1) - t * s(0, 1), hi = v(0, 1) + t * s(0, 1);
    const double b = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
    return a > 0.0 && a * c - b * b >= 1.0;
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!feasible(hi)) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace testutil
