#include "sawcomb/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include <json.hpp>
#include <unsupported/Eigen/NonLinearOptimization>

#include "sawcomb/constants.hpp"
#include "sawcomb/coupling_graph.hpp"
#include "sawcomb/entanglement.hpp"
#include "sawcomb/errors.hpp"
#include "sawcomb/scattering.hpp"

namespace sawcomb {

namespace c = constants;

namespace {

using ResidualFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LmFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  ResidualFn fn;
  int n_inputs;
  int n_values;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    fn(x, f);
    return 0;
  }
  // central differences; the step is floored so parameters at zero still move
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    Eigen::VectorXd xp = x, fp(n_values), fm(n_values);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
      xp(j) = x(j) + h;
      fn(xp, fp);
      xp(j) = x(j) - h;
      fn(xp, fm);
      xp(j) = x(j);
      jac.col(j) = (fp - fm) / (2.0 * h);
    }
    return 0;
  }
};

struct LmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
};

LmResult least_squares(const ResidualFn& fn, Eigen::VectorXd x0, int n_values) {
  LmFunctor functor{fn, static_cast<int>(x0.size()), n_values};
  Eigen::LevenbergMarquardt<LmFunctor> lm(functor);
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.maxfev = 4000;
  const auto status = lm.minimize(x0);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation || !x0.allFinite())
    throw FitDiverged("least-squares solver stopped with status " + std::to_string(static_cast<int>(status)));
  LmResult r;
  r.x = x0;
  r.residual.resize(n_values);
  fn(x0, r.residual);
  r.jacobian.resize(n_values, x0.size());
  functor.df(x0, r.jacobian);
  return r;
}

// s²(JᵀJ)⁻¹ in the fitted coordinates, mapped back through x = scale ⊙ p.
Eigen::Matrix2d parameter_covariance(const LmResult& r, const Eigen::Vector2d& scale) {
  const auto m = r.residual.size();
  const double dof = static_cast<double>(m - 2);
  const double s2 = dof > 0 ? r.residual.squaredNorm() / dof : 0.0;
  const Eigen::Matrix2d jtj = r.jacobian.transpose() * r.jacobian;
  Eigen::Matrix2d cov = s2 * jtj.inverse();
  if (!cov.allFinite()) throw FitDiverged("singular Jacobian at the optimum");
  return scale.asDiagonal() * cov * scale.asDiagonal();
}

double half_coth(double freq_hz, double temperature) {
  if (temperature <= 0.0) return 0.5;
  const double x = c::h * freq_hz / (2.0 * c::k_b * temperature);
  return 0.5 / std::tanh(x);
}

}  // namespace

double planck_power(double temperature, double freq_hz, double gain, double added_photons) {
  return gain * c::h * freq_hz * (half_coth(freq_hz, temperature) + 0.5 * (2.0 * added_photons + 1.0));
}

PlanckFit planck_fit(std::span<const double> temps, std::span<const double> powers, double freq_hz) {
  if (temps.size() != powers.size()) throw DimensionMismatch("one power per temperature expected");
  if (!(freq_hz > 0.0)) throw InvalidArgument("frequency must be positive");
  std::set<double> distinct(temps.begin(), temps.end());
  if (distinct.size() < 3) throw InsufficientData("planck fit needs at least three distinct temperatures");
  for (std::size_t k = 0; k < temps.size(); ++k) {
    if (!(powers[k] > 0.0)) throw InvalidArgument("noise powers must be positive");
    if (!(temps[k] >= 0.0)) throw InvalidArgument("temperatures must be non-negative");
  }
  const auto m = static_cast<Eigen::Index>(temps.size());

  // P is affine in x = ½coth(hf/2kT): slope Ghf, intercept Ghf(n + ½).
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd p(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    a(k, 0) = half_coth(freq_hz, temps[k]);
    a(k, 1) = 1.0;
    p(k) = powers[k];
  }
  const Eigen::Vector2d lin = a.colPivHouseholderQr().solve(p);
  const double hf = c::h * freq_hz;
  const double g0 = lin(0) / hf;
  if (!(g0 > 0.0)) throw FitDiverged("non-positive initial gain estimate");
  const double n0 = lin(1) / lin(0) - 0.5;

  const double p_scale = p.cwiseAbs().mean();
  const ResidualFn fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& f) {
    for (Eigen::Index k = 0; k < m; ++k)
      f(k) = (planck_power(temps[k], freq_hz, x(0) * g0, x(1)) - p(k)) / p_scale;
  };
  const LmResult r = least_squares(fn, Eigen::Vector2d(1.0, n0), static_cast<int>(m));

  PlanckFit out;
  out.gain = r.x(0) * g0;
  out.added_photons = r.x(1);
  if (!(out.gain > 0.0) || !std::isfinite(out.added_photons)) throw FitDiverged("fit left the physical range");
  out.covariance = parameter_covariance(r, Eigen::Vector2d(g0, 1.0));
  double rel = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) rel += std::pow(r.residual(k) * p_scale / p(k), 2);
  out.rms_relative_residual = std::sqrt(rel / static_cast<double>(m));
  return out;
}

double c_lineshape(double delta, double gain, double epsilon, const LineshapeModel& model, double t_eff) {
  if (!(gain >= 1.0)) throw GainBelowUnity("gain must be at least one");
  if (epsilon < 0.0) throw InvalidArgument("epsilon magnitude must be non-negative");
  const std::vector<ModeSpec> modes{model.mode_a, model.mode_b};
  for (const auto& m : modes) m.validate();
  PumpTone pump;
  pump.omega_p = 0.5 * (model.mode_a.omega + model.mode_b.omega);
  pump.epsilon_override = epsilon;
  const std::vector<PumpTone> pumps{pump};
  const auto matches = match_four_wave(modes, pumps, default_match_tolerance(modes));
  std::vector<double> probes = resonant_probe_omegas(modes, pumps, model.mirror, matches);
  probes[0] -= delta;
  probes[1] += delta;
  const CouplingMatrix cm = build_coupling_matrix(modes, pumps, model.mirror, probes, matches);
  const std::vector<double> g_ext{model.mode_a.gamma_ext, model.mode_b.gamma_ext};
  const std::vector<double> g_int{model.mode_a.gamma_int, model.mode_b.gamma_int};
  const ScatteringPair sc = to_quadrature(scattering_matrices(cm, g_ext, g_int));
  const CovarianceMatrix th = thermal_covariance(modes, t_eff);
  return gain * correlation_quantity(output_covariance(sc, th, th));
}

CorrelationFit fit_gain_from_correlations(std::span<const double> deltas, std::span<const double> c_values,
                                          const LineshapeModel& model, double t_eff) {
  if (deltas.size() != c_values.size()) throw DimensionMismatch("one C value per detuning expected");
  if (deltas.size() < 3) throw InsufficientData("correlation fit needs at least three points");
  const auto m = static_cast<Eigen::Index>(deltas.size());
  const double eps_max = 0.5 * std::sqrt(model.mode_a.gamma_tot() * model.mode_b.gamma_tot());
  Eigen::VectorXd data(m);
  for (Eigen::Index k = 0; k < m; ++k) data(k) = c_values[k];
  const double c_scale = data.cwiseAbs().maxCoeff();
  if (!(c_scale > 0.0)) throw FitDiverged("correlation data are identically zero");

  auto shape = [&](double eps) {
    Eigen::VectorXd s(m);
    for (Eigen::Index k = 0; k < m; ++k) s(k) = c_lineshape(deltas[k], 1.0, eps, model, t_eff);
    return s;
  };

  // Coarse ε grid; C is linear in G, so the best G at each ε is closed form.
  double best_eps = 0.0, best_g = 0.0, best_cost = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 99; ++i) {
    const double eps = eps_max * i / 100.0;
    const Eigen::VectorXd s = shape(eps);
    const double g = std::max(1.0, s.dot(data) / s.squaredNorm());
    const double cost = (g * s - data).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best_eps = eps;
      best_g = g;
    }
  }

  const double g0 = best_g, e0 = best_eps;
  const ResidualFn fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& f) {
    const double eps = x(1) * e0;
    const double g = x(0) * g0;
    if (!(eps >= 0.0) || eps >= 0.999 * eps_max || !(g >= 1.0)) {
      f.setConstant(1e3);
      return;
    }
    for (Eigen::Index k = 0; k < m; ++k) f(k) = (c_lineshape(deltas[k], g, eps, model, t_eff) - data(k)) / c_scale;
  };
  const LmResult r = least_squares(fn, Eigen::Vector2d(1.0, 1.0), static_cast<int>(m));

  CorrelationFit out;
  out.gain = r.x(0) * g0;
  out.epsilon = r.x(1) * e0;
  if (r.residual.maxCoeff() >= 1e3) throw FitDiverged("correlation fit left the stable region");
  out.covariance = parameter_covariance(r, Eigen::Vector2d(g0, e0));
  out.rms_relative_residual = r.residual.norm() / std::sqrt(static_cast<double>(m));
  return out;
}

double added_noise_from_pump_off(const CovarianceMatrix& v_off, double gain, double t_eff,
                                 std::span<const double> omegas) {
  if (!(gain > 1.0)) throw GainBelowUnity("pump-off noise inversion needs G > 1");
  if (static_cast<int>(omegas.size()) != v_off.n_modes()) throw DimensionMismatch("one frequency per mode expected");
  double total = 0.0;
  const int dim = 2 * v_off.n_modes();
  for (int a = 0; a < dim; ++a) {
    const double nbar = bose_occupation(omegas[a / 2], t_eff);
    total += 0.5 * ((v_off(a, a) - gain * (2.0 * nbar + 1.0)) / (gain - 1.0) - 1.0);
  }
  const double n = total / dim;
  if (n < 0.0) throw NegativeNoise("inferred added noise " + std::to_string(n) + " is negative");
  return n;
}

TemperatureSweep ppt_temperature_sweep(const CovarianceMatrix& v_meas_on, const CovarianceMatrix& v_off,
                                       std::span<const double> deltas, std::span<const double> c_values,
                                       const LineshapeModel& model, std::span<const double> t_grid) {
  if (v_meas_on.n_modes() != 2 || v_off.n_modes() != 2) throw DimensionMismatch("sweep works on a mode pair");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw InvalidArgument("temperature grid must be increasing");
  const std::vector<double> omegas{model.mode_a.omega, model.mode_b.omega};
  const std::vector<int> second{1};
  TemperatureSweep out;
  for (double t : t_grid) {
    SweepPoint pt;
    pt.temperature = t;
    pt.gain = fit_gain_from_correlations(deltas, c_values, model, t).gain;
    pt.added_photons = added_noise_from_pump_off(v_off, pt.gain, t, omegas);
    const CovarianceMatrix v = deamplify(v_meas_on, AmplifierModel::uniform(2, pt.gain, pt.added_photons));
    pt.lambda_min = ppt_min_eigenvalue(v, second);
    out.points.push_back(pt);
  }
  for (std::size_t k = 1; k < out.points.size() && !out.zero_crossing; ++k) {
    const auto& p0 = out.points[k - 1];
    const auto& p1 = out.points[k];
    if (p0.lambda_min < 0.0 && p1.lambda_min >= 0.0) {
      const double f = -p0.lambda_min / (p1.lambda_min - p0.lambda_min);
      out.zero_crossing = p0.temperature + f * (p1.temperature - p0.temperature);
    }
  }
  return out;
}

double two_mode_ppt_threshold(const LineshapeModel& model, double epsilon) {
  using cd = std::complex<double>;
  const double ge = model.mode_a.gamma_ext, gi = model.mode_a.gamma_int;
  const double kappa = 0.5 * (ge + gi);
  const double d = kappa * kappa - epsilon * epsilon;
  if (!(d > 0.0)) throw InstabilityError("pair is pumped beyond threshold");
  const cd i(0.0, 1.0);
  const cd mu = ge * kappa / d - 1.0;
  const cd nu = -i * ge * epsilon / d;
  const cd mu_l = std::sqrt(ge * gi) * kappa / d;
  const cd nu_l = -i * std::sqrt(ge * gi) * epsilon / d;
  const double a = std::norm(mu) + std::norm(nu) + std::norm(mu_l) + std::norm(nu_l);
  const double cross = 2.0 * std::abs(mu * nu + mu_l * nu_l);
  const double y = a - cross;
  if (!(y < 1.0)) return 0.0;
  return c::hbar * model.mode_a.omega / (2.0 * c::k_b * std::atanh(y));
}

const CalibrationStore::Entry& CalibrationStore::at(double freq_hz) const {
  const auto it = entries_.find(freq_hz);
  if (it == entries_.end()) throw InvalidArgument("no calibration stored at " + std::to_string(freq_hz) + " Hz");
  return it->second;
}

AmplifierModel CalibrationStore::amplifier(std::span<const double> freqs_hz, double idler_temp_k) const {
  AmplifierModel amp;
  std::vector<Eigen::Matrix2d> cov;
  for (double f : freqs_hz) {
    const Entry& e = at(f);
    amp.gain.push_back(e.gain);
    amp.added_photons.push_back(e.added_photons);
    amp.idler_gain.push_back(e.gain);
    amp.idler_photons.push_back(bose_occupation(c::to_angular(f), idler_temp_k));
    cov.push_back(e.covariance);
  }
  amp.fit_covariance = std::move(cov);
  amp.validate();
  return amp;
}

std::string CalibrationStore::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [f, e] : entries_) {
    arr.push_back({{"freq_hz", f},
                   {"gain", e.gain},
                   {"added_photons", e.added_photons},
                   {"covariance", {{e.covariance(0, 0), e.covariance(0, 1)}, {e.covariance(1, 0), e.covariance(1, 1)}}}});
  }
  return nlohmann::json{{"entries", arr}}.dump(2);
}

CalibrationStore CalibrationStore::from_json(const std::string& text) {
  CalibrationStore store;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& row : j.at("entries")) {
      Entry e;
      e.gain = row.at("gain").get<double>();
      e.added_photons = row.at("added_photons").get<double>();
      const auto& cv = row.at("covariance");
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) e.covariance(a, b) = cv.at(a).at(b).get<double>();
      store.put(row.at("freq_hz").get<double>(), e);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("malformed calibration store: ") + ex.what());
  }
  return store;
}

}  // namespace sawcomb
