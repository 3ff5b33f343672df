#include "sawcomb/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <limits>
#include <thread>

#include "sawcomb/calibration.hpp"
#include "sawcomb/constants.hpp"
#include "sawcomb/entanglement.hpp"
#include "sawcomb/errors.hpp"
#include "sawcomb/io.hpp"
#include "sawcomb/reconstruct.hpp"

namespace sawcomb {

namespace c = constants;
using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ mix(index + 0x632be59bd9b4e019ULL));
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

NetworkResult evaluate_network(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                               const MirrorSpec& mirror, double match_tolerance, double input_temp_k,
                               bool allow_unstable, std::span<const double> probe_detunings) {
  NetworkResult r;
  r.modes.assign(modes.begin(), modes.end());
  r.matches = match_four_wave(modes, pumps, match_tolerance);
  std::vector<double> probes = resonant_probe_omegas(modes, pumps, mirror, r.matches);
  if (!probe_detunings.empty()) {
    if (probe_detunings.size() != probes.size()) throw DimensionMismatch("one probe detuning per mode");
    for (std::size_t k = 0; k < probes.size(); ++k) probes[k] += probe_detunings[k];
  }
  r.coupling = build_coupling_matrix(modes, pumps, mirror, probes, r.matches);
  std::vector<double> g_ext, g_int;
  for (const auto& m : modes) {
    g_ext.push_back(m.gamma_ext);
    g_int.push_back(m.gamma_int);
  }
  ScatteringOptions so;
  so.allow_unstable = allow_unstable;
  r.ladder = scattering_matrices(r.coupling, g_ext, g_int, so);
  r.quadrature = to_quadrature(r.ladder);
  const CovarianceMatrix th = thermal_covariance(modes, input_temp_k);
  r.v_out = output_covariance(r.quadrature, th, th);
  return r;
}

namespace {

double match_tolerance(const ScenarioConfig& cfg) {
  return cfg.match_tolerance ? *cfg.match_tolerance : default_match_tolerance(cfg.modes);
}

std::vector<ModeSpec> probe_set(const ScenarioConfig& cfg) {
  std::vector<ModeSpec> modes = select_probe_modes(cfg.modes, cfg.pumps, match_tolerance(cfg), cfg.include_pump_modes);
  if (!cfg.probe_modes.empty()) {
    std::vector<ModeSpec> kept;
    for (const auto& m : modes)
      if (std::find(cfg.probe_modes.begin(), cfg.probe_modes.end(), m.index) != cfg.probe_modes.end())
        kept.push_back(m);
    if (kept.size() != cfg.probe_modes.size())
      throw ConfigError(cfg.source_name + ": field 'probes.modes': a listed mode coincides with a pump tone");
    modes = std::move(kept);
  }
  if (modes.empty()) throw ConfigError(cfg.source_name + ": field 'probes.modes': no probe modes left");
  return modes;
}

std::vector<double> omegas_of(std::span<const ModeSpec> modes) {
  std::vector<double> w;
  for (const auto& m : modes) w.push_back(m.omega);
  return w;
}

AmplifierModel amplifier_for(const ScenarioConfig& cfg, std::span<const ModeSpec> modes) {
  const auto& a = cfg.amplifier;
  if (a.calibration_store) {
    std::filesystem::path p = *a.calibration_store;
    if (p.is_relative()) p = std::filesystem::path(cfg.source_name).parent_path() / p;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError(cfg.source_name + ": field 'amplifier.calibration_store': cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    std::vector<double> freqs;
    for (const auto& m : modes) freqs.push_back(c::to_hz(m.omega));
    return CalibrationStore::from_json(ss.str()).amplifier(freqs, a.idler_temp_k);
  }
  const int n = static_cast<int>(modes.size());
  AmplifierModel amp = AmplifierModel::uniform(n, a.gain, a.added_photons);
  Eigen::Matrix2d cov;
  const double sg = a.sigma_gain_rel * a.gain;
  cov << sg * sg, a.cov_gain_noise, a.cov_gain_noise, a.sigma_added_photons * a.sigma_added_photons;
  amp.fit_covariance = std::vector<Eigen::Matrix2d>(modes.size(), cov);
  for (int k = 0; k < n; ++k) {
    amp.idler_gain[k] = a.gain;
    amp.idler_photons[k] = bose_occupation(modes[k].omega, a.idler_temp_k);
  }
  amp.validate();
  return amp;
}

std::uint64_t seed_of(const ScenarioConfig& cfg) {
  if (!cfg.sampling.seed) throw ConfigError(cfg.source_name + ": field 'sampling.seed': required");
  return *cfg.sampling.seed;
}

void check_finite(const json& j, const std::string& path) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) throw NumericalError("non-finite metric at " + path);
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) check_finite(it.value(), path + "." + it.key());
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) check_finite(j[k], path + "[" + std::to_string(k) + "]");
  }
}

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  const std::filesystem::path& dir() const { return dir_; }

  void text(const std::string& name, const std::string& content) {
    io::write_text(dir_ / name, content);
    files_.push_back(name);
  }

  void matrix(const std::string& name, const Eigen::MatrixXd& m, const std::vector<std::string>& header = {}) {
    io::write_matrix_csv(dir_ / name, m, header);
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::vector<std::string> quadrature_header(std::span<const ModeSpec> modes) {
  std::vector<std::string> h;
  for (const auto& m : modes) {
    h.push_back("I" + std::to_string(m.index));
    h.push_back("Q" + std::to_string(m.index));
  }
  return h;
}

// ---- twomode ----

QuadratureSamples concat(const std::vector<QuadratureSamples>& blocks) {
  QuadratureSamples out = blocks.front();
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.n_samples();
  out.samples.resize(rows, blocks.front().samples.cols());
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.samples.middleRows(at, b.n_samples()) = b.samples;
    at += b.n_samples();
  }
  return out;
}

json run_twomode(const ScenarioConfig& cfg, Outputs& out, std::vector<std::string>& warnings) {
  const std::uint64_t seed = seed_of(cfg);
  const auto modes = probe_set(cfg);
  const double tol = match_tolerance(cfg);
  const NetworkResult on = evaluate_network(modes, cfg.pumps, cfg.mirror, tol, cfg.input_temp_k, false);
  const NetworkResult off = evaluate_network(modes, {}, cfg.mirror, tol, cfg.input_temp_k, false);
  const AmplifierModel amp = amplifier_for(cfg, modes);
  const CovarianceMatrix v_on = amplify(on.v_out, amp);
  const CovarianceMatrix v_off = amplify(off.v_out, amp);

  // Pump chopping: alternating on/off blocks, each with its own stream.
  const int blocks = cfg.twomode.chop_blocks;
  const Eigen::Index per_block = cfg.sampling.n_samples / (2 * blocks);
  std::vector<QuadratureSamples> on_blocks(blocks), off_blocks(blocks);
  parallel_for(static_cast<std::size_t>(2 * blocks), cfg.sampling.threads, [&](std::size_t b) {
    const std::uint64_t s = derive_seed(seed, b);
    if (b % 2 == 0) on_blocks[b / 2] = sample(v_on, per_block, s, PumpState::on);
    else off_blocks[b / 2] = sample(v_off, per_block, s, PumpState::off);
  });
  QuadratureSamples s_on = concat(on_blocks);
  const QuadratureSamples s_off = concat(off_blocks);

  struct Row {
    double detuning_hz;
    int idx_j, idx_k;
    SqueezingStats stats;
    double r_e_model;
  };
  std::vector<Row> rows;
  for (const auto& m : on.matches) {
    if (m.mode_j == m.mode_k) continue;
    const int j = m.mode_j, k = m.mode_k;
    QuadratureSamples aligned = s_on;
    align_pair_phase(aligned, j, k);
    Row row;
    row.idx_j = modes[j].index;
    row.idx_k = modes[k].index;
    row.detuning_hz = c::to_hz(0.5 * std::abs(modes[k].omega - modes[j].omega));
    row.stats = squeezing_stats(aligned, s_off, j, k);

    // Same ratio on the noiseless de-amplified model state.
    const std::vector<int> pair{j, k};
    const CovarianceMatrix vp = on.v_out.submatrix(pair);
    const double phi = std::atan2(vp(0, 3), vp(0, 2));
    const std::vector<double> angles{0.0, phi};
    const CovarianceMatrix vr = rotate_modes(vp, angles);
    const double plus = vr(0, 0) + vr(2, 2) + 2.0 * vr(0, 2), minus = vr(0, 0) + vr(2, 2) - 2.0 * vr(0, 2);
    row.r_e_model = std::sqrt(std::max(plus, minus) / std::min(plus, minus));

    const double bw = cfg.twomode.histogram_bin_width * row.stats.sigma_off;
    const Histogram2d h_on = histogram_iq(aligned, j, k, bw, cfg.twomode.histogram_bins);
    const Histogram2d h_off = histogram_iq(s_off, j, k, bw, cfg.twomode.histogram_bins);
    out.matrix("histograms_pair" + std::to_string(row.idx_j) + "_" + std::to_string(row.idx_k) + ".csv",
               h_on.counts - h_off.counts);
    rows.push_back(row);
  }
  if (rows.empty()) warnings.push_back("no pumped mode pairs among the probe modes");
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.detuning_hz < b.detuning_hz; });

  Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), 6);
  json pairs = json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    table.row(static_cast<Eigen::Index>(r)) << row.detuning_hz, row.idx_j, row.idx_k, row.stats.r_e, row.stats.r_p,
        row.r_e_model;
    pairs.push_back({{"modes", {row.idx_j, row.idx_k}},
                     {"detuning_hz", row.detuning_hz},
                     {"r_e", row.stats.r_e},
                     {"r_p", row.stats.r_p},
                     {"r_e_model", row.r_e_model}});
  }
  out.matrix("squeezing_vs_detuning.csv", table, {"detuning_hz", "mode_j", "mode_k", "r_e", "r_p", "r_e_model"});
  out.matrix("covariance_model.csv", on.v_out.matrix(), quadrature_header(modes));
  return {{"pairs", pairs}, {"samples_per_state", per_block * blocks}};
}

// ---- multimode ----

struct IntervalResult {
  CovarianceMatrix v_rec;
  Decorrelation dec;
  Eigen::MatrixXd sigma;
  double objective = 0.0;
  bool converged = true;
  std::vector<double> e, s;
  std::vector<std::string> warnings;
};

json run_multimode(const ScenarioConfig& cfg, Outputs& out, std::vector<std::string>& warnings) {
  const std::uint64_t seed = seed_of(cfg);
  const auto modes = probe_set(cfg);
  const int n = static_cast<int>(modes.size());
  if (n < 2) throw ConfigError(cfg.source_name + ": field 'probes.modes': need at least two modes");
  const NetworkResult net =
      evaluate_network(modes, cfg.pumps, cfg.mirror, match_tolerance(cfg), cfg.input_temp_k, cfg.multimode.allow_unstable);
  const AmplifierModel amp = amplifier_for(cfg, modes);
  const std::vector<double> omegas = omegas_of(modes);
  const auto bps = all_bipartitions(n);
  const std::size_t count = static_cast<std::size_t>(cfg.sampling.interval_count);

  std::vector<IntervalResult> res(count);
  parallel_for(count, cfg.sampling.threads, [&](std::size_t i) {
    IntervalResult& r = res[i];
    CovarianceMatrix v = net.v_out;
    if (cfg.sampling.drift) {
      std::mt19937_64 rng(derive_seed(seed, (1ULL << 32) + i));
      std::uniform_real_distribution<double> phase(0.0, c::two_pi);
      std::vector<double> angles(static_cast<std::size_t>(n));
      for (auto& a : angles) a = phase(rng);
      v = rotate_modes(v, angles);
    }
    const Eigen::MatrixXd raw = scale_to_raw_units(amplify(v, amp), omegas, cfg.z0_ohm, cfg.bandwidth_hz);
    const QuadratureSamples qs = sample(CovarianceMatrix(raw), cfg.sampling.n_samples, derive_seed(seed, i));
    const SampleMoments mom = sample_moments(qs);
    const CovarianceMatrix v_meas = scale_to_vacuum_units(mom.covariance.matrix(), omegas, cfg.z0_ohm, cfg.bandwidth_hz);
    const Eigen::MatrixXd sem = scale_to_vacuum_units(mom.standard_error, omegas, cfg.z0_ohm, cfg.bandwidth_hz).matrix();

    r.sigma = propagate_errors(v_meas, amp, sem, &r.warnings);
    const ReconstructResult rec = reconstruct_physical(deamplify(v_meas, amp), r.sigma);
    r.v_rec = rec.v;
    r.objective = rec.objective;
    r.converged = rec.converged;
    for (const auto& w : rec.warnings) r.warnings.push_back(w);
    r.dec = decorrelate(rec.v);
    if (!cfg.multimode.global_vectors) {
      const Eigen::MatrixXd st = transform_sigma(r.dec.transform, r.sigma);
      for (const auto& bp : bps) {
        const EntanglementReport rep = svl_test(r.dec.v, bp);
        r.e.push_back(rep.value_e);
        r.s.push_back(svl_sigma(st, rep.h_vec, rep.g_vec));
      }
    }
  });

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (const auto& r : res) mean += r.v_rec.matrix();
  mean /= static_cast<double>(count);
  const CovarianceMatrix v_mean(mean);

  if (cfg.multimode.global_vectors) {
    const Decorrelation dmean = decorrelate(v_mean);
    std::vector<EntanglementReport> global;
    for (const auto& bp : bps) global.push_back(svl_test(dmean.v, bp));
    parallel_for(count, cfg.sampling.threads, [&](std::size_t i) {
      IntervalResult& r = res[i];
      const Eigen::MatrixXd st = transform_sigma(r.dec.transform, r.sigma);
      for (const auto& g : global) {
        const EntanglementReport rep = svl_evaluate(r.dec.v, g.bipartition, g.h_vec, g.g_vec);
        r.e.push_back(rep.value_e);
        r.s.push_back(svl_sigma(st, g.h_vec, g.g_vec));
      }
    });
  }

  std::map<std::string, int> warning_counts;
  double worst_objective = 0.0, worst_residual = 0.0;
  int not_converged = 0, decorrelation_misses = 0;
  Eigen::MatrixXd per_interval(static_cast<Eigen::Index>(count * bps.size()), 4);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = res[i];
    for (const auto& w : r.warnings) ++warning_counts[w];
    worst_objective = std::max(worst_objective, r.objective);
    worst_residual = std::max(worst_residual, r.dec.residual_ratio);
    not_converged += r.converged ? 0 : 1;
    decorrelation_misses += r.dec.within_tolerance ? 0 : 1;
    for (std::size_t b = 0; b < bps.size(); ++b)
      per_interval.row(static_cast<Eigen::Index>(i * bps.size() + b)) << static_cast<double>(i),
          static_cast<double>(b), r.e[b], r.s[b];
  }
  for (const auto& [w, k] : warning_counts) warnings.push_back(w + " (" + std::to_string(k) + " intervals)");
  if (decorrelation_misses)
    warnings.push_back("I-Q decorrelation residual above 5% in " + std::to_string(decorrelation_misses) + " intervals");

  std::vector<EntanglementReport> table;
  for (std::size_t b = 0; b < bps.size(); ++b) {
    std::vector<double> e, s;
    for (const auto& r : res) {
      e.push_back(r.e[b]);
      s.push_back(r.s[b]);
    }
    EntanglementReport row;
    row.bipartition = bps[b];
    try {
      const WeightedSignificance w = significance(e, s);
      row.value_e = w.value_e;
      row.sigma = w.sigma;
      row.significance = w.significance;
    } catch (const ZeroVariance&) {
      // No uncertainty model: report the plain mean with zero sigma.
      double m = 0.0;
      for (double x : e) m += x;
      row.value_e = m / static_cast<double>(e.size());
      row.significance = row.value_e < 0.0 ? -std::numeric_limits<double>::max() : std::numeric_limits<double>::max();
      warnings.push_back("zero uncertainty for " + bps[b].label() + "; significance saturated");
    }
    table.push_back(row);
  }

  const std::string table_json = significance_table_json(table);
  out.text("significance_table.json", table_json + "\n");
  out.matrix("interval_results.csv", per_interval, {"interval", "bipartition", "value_e", "sigma"});
  out.matrix("covariance_model.csv", net.v_out.matrix(), quadrature_header(modes));
  out.matrix("covariance_mean_reconstructed.csv", v_mean.matrix(), quadrature_header(modes));

  json metrics;
  metrics["bipartitions"] = json::parse(table_json);
  metrics["intervals"] = count;
  metrics["max_reconstruction_objective"] = worst_objective;
  metrics["max_decorrelation_residual"] = worst_residual;
  metrics["reconstructions_not_converged"] = not_converged;
  metrics["vectors"] = cfg.multimode.global_vectors ? "global" : "per_interval";
  return metrics;
}

// ---- calibration ----

json fit_json(double a, double b, const Eigen::Matrix2d& cov, const char* na, const char* nb) {
  return {{na, a},
          {nb, b},
          {std::string("sigma_") + na, std::sqrt(std::max(0.0, cov(0, 0)))},
          {std::string("sigma_") + nb, std::sqrt(std::max(0.0, cov(1, 1)))}};
}

const ModeSpec& mode_by_index(const ScenarioConfig& cfg, int idx) {
  for (const auto& m : cfg.modes)
    if (m.index == idx) return m;
  throw ConfigError(cfg.source_name + ": mode index " + std::to_string(idx) + " does not exist");
}

json run_calibration(const ScenarioConfig& cfg, Outputs& out, std::vector<std::string>& warnings) {
  const std::uint64_t seed = seed_of(cfg);
  const auto& cc = cfg.calibration;
  const auto& a = cfg.amplifier;
  json metrics;

  std::vector<double> powers = cc.powers_w_per_hz;
  if (powers.empty()) {
    std::mt19937_64 rng(derive_seed(seed, 0));
    std::normal_distribution<double> nd(0.0, 1.0);
    for (double t : cc.temps_k)
      powers.push_back(planck_power(t, cc.freq_hz, a.gain, a.added_photons) * (1.0 + cc.planck_noise_rel * nd(rng)));
  }
  const PlanckFit pf = planck_fit(cc.temps_k, powers, cc.freq_hz);
  metrics["planck"] = fit_json(pf.gain, pf.added_photons, pf.covariance, "gain", "added_photons");
  metrics["planck"]["gain_db"] = 10.0 * std::log10(pf.gain);
  metrics["planck"]["rms_relative_residual"] = pf.rms_relative_residual;
  {
    Eigen::MatrixXd t(static_cast<Eigen::Index>(powers.size()), 3);
    for (std::size_t k = 0; k < powers.size(); ++k)
      t.row(static_cast<Eigen::Index>(k)) << cc.temps_k[k], powers[k],
          planck_power(cc.temps_k[k], cc.freq_hz, pf.gain, pf.added_photons);
    out.matrix("planck_fit.csv", t, {"temp_k", "power_w_per_hz", "model_w_per_hz"});
  }

  CalibrationStore store;
  store.put(cc.freq_hz, {pf.gain, pf.added_photons, pf.covariance});

  if (cc.pair_a >= 0) {
    const LineshapeModel model{mode_by_index(cfg, cc.pair_a), mode_by_index(cfg, cc.pair_b), cfg.mirror};
    std::vector<double> deltas;
    for (double d : cc.detunings_hz) deltas.push_back(c::to_angular(d));
    const double eps_true = c::to_angular(cc.c_epsilon_hz);

    std::vector<double> cvals = cc.c_values;
    if (cvals.empty()) {
      std::mt19937_64 rng(derive_seed(seed, 1));
      std::normal_distribution<double> nd(0.0, 1.0);
      for (double d : deltas)
        cvals.push_back(c_lineshape(d, a.gain, eps_true, model, cc.t_eff_k) * (1.0 + cc.c_noise_rel * nd(rng)));
    }
    const CorrelationFit cf = fit_gain_from_correlations(deltas, cvals, model, cc.t_eff_k);
    Eigen::Matrix2d cov_hz = cf.covariance;
    cov_hz.row(1) /= c::two_pi;
    cov_hz.col(1) /= c::two_pi;
    metrics["correlation"] = fit_json(cf.gain, c::to_hz(cf.epsilon), cov_hz, "gain", "epsilon_hz");
    metrics["correlation"]["gain_db"] = 10.0 * std::log10(cf.gain);
    metrics["correlation"]["rms_relative_residual"] = cf.rms_relative_residual;
    {
      Eigen::MatrixXd t(static_cast<Eigen::Index>(deltas.size()), 3);
      for (std::size_t k = 0; k < deltas.size(); ++k)
        t.row(static_cast<Eigen::Index>(k)) << cc.detunings_hz[k], cvals[k],
            c_lineshape(deltas[k], cf.gain, cf.epsilon, model, cc.t_eff_k);
      out.matrix("correlation_fit.csv", t, {"detuning_hz", "c", "model_c"});
    }

    if (eps_true > 0.0) {
      // Synthetic pump-on / pump-off covariances of the pair at the input temperature.
      const std::vector<ModeSpec> pair{model.mode_a, model.mode_b};
      PumpTone pump;
      pump.omega_p = 0.5 * (model.mode_a.omega + model.mode_b.omega);
      pump.epsilon_override = eps_true;
      const std::vector<PumpTone> pumps{pump};
      const double tol = default_match_tolerance(pair);
      const AmplifierModel truth = AmplifierModel::uniform(2, a.gain, a.added_photons);
      const CovarianceMatrix v_on =
          amplify(evaluate_network(pair, pumps, cfg.mirror, tol, cfg.input_temp_k, false).v_out, truth);
      const CovarianceMatrix v_off = amplify(thermal_covariance(pair, cfg.input_temp_k), truth);
      const std::vector<double> omegas = omegas_of(pair);

      try {
        const double n_pair = added_noise_from_pump_off(v_off, cf.gain, cc.t_eff_k, omegas);
        metrics["correlation"]["added_photons"] = n_pair;
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        cov(0, 0) = cf.covariance(0, 0);
        for (const auto& m : pair) store.put(c::to_hz(m.omega), {cf.gain, n_pair, cov});
      } catch (const NegativeNoise& e) {
        warnings.push_back(std::string("pump-off noise inference: ") + e.what());
      }

      const double t_star = two_mode_ppt_threshold(model, eps_true);
      metrics["analytic_threshold_k"] = t_star;
      if (!cc.sweep_temps_k.empty()) {
        const TemperatureSweep sw = ppt_temperature_sweep(v_on, v_off, deltas, cvals, model, cc.sweep_temps_k);
        Eigen::MatrixXd t(static_cast<Eigen::Index>(sw.points.size()), 4);
        for (std::size_t k = 0; k < sw.points.size(); ++k) {
          const auto& p = sw.points[k];
          t.row(static_cast<Eigen::Index>(k)) << p.temperature, p.gain, p.added_photons, p.lambda_min;
        }
        out.matrix("ppt_temperature_sweep.csv", t, {"temp_k", "gain", "added_photons", "lambda_min"});
        if (sw.zero_crossing) metrics["zero_crossing_k"] = *sw.zero_crossing;
        else warnings.push_back("temperature sweep did not bracket a PPT zero crossing");
      }
    }
  }

  out.text("calibration_store.json", store.to_json() + "\n");
  return metrics;
}

// ---- scattering ----

json run_scattering(const ScenarioConfig& cfg, Outputs& out, std::vector<std::string>& warnings) {
  const auto& sc = cfg.scattering;
  const auto modes = probe_set(cfg);
  auto position = [&](int idx) {
    for (std::size_t k = 0; k < modes.size(); ++k)
      if (modes[k].index == idx) return static_cast<int>(k);
    throw ConfigError(cfg.source_name + ": field 'scattering': mode " + std::to_string(idx) + " is not a probe mode");
  };
  const double tol = match_tolerance(cfg);
  const NetworkResult net = evaluate_network(modes, cfg.pumps, cfg.mirror, tol, cfg.input_temp_k, sc.allow_unstable);
  {
    std::ostringstream os;
    write_scattering_csv(os, net.ladder, position(sc.ref_out), position(sc.ref_in));
    out.text("scattering_matrix.csv", os.str());
  }
  json metrics;
  metrics["stable"] = is_stable(net.coupling);
  metrics["matched_pairs"] = net.matches.size();
  const int n = static_cast<int>(modes.size());
  const int ro = position(sc.ref_out), ri = position(sc.ref_in);
  metrics["reference_gain_db"] =
      10.0 * std::log10(std::norm(net.ladder.s(ro, ri)) + std::norm(net.ladder.s(ro, n + ri)));

  if (!sc.spacing_sweep_hz.empty()) {
    const int eo = position(sc.element_out), ei = position(sc.element_in);
    Eigen::MatrixXd t(static_cast<Eigen::Index>(sc.spacing_sweep_hz.size()), 6);
    int unstable = 0;
    for (std::size_t k = 0; k < sc.spacing_sweep_hz.size(); ++k) {
      const double spacing = sc.spacing_sweep_hz[k];
      std::vector<PumpTone> comb;
      for (int p = 0; p < sc.comb_count; ++p) {
        PumpTone tone = PumpTone::from_hz(sc.comb_start_hz + p * spacing, 0.0, sc.comb_phase_rad);
        tone.epsilon_override = c::to_angular(sc.comb_epsilon_hz);
        comb.push_back(tone);
      }
      // The modes stay fixed; only the comb moves, so resonant probes follow the original pumps.
      const auto matches = match_four_wave(modes, comb, tol);
      const std::vector<double> probes = resonant_probe_omegas(modes, cfg.pumps, cfg.mirror, net.matches);
      const CouplingMatrix cm = build_coupling_matrix(modes, comb, cfg.mirror, probes, matches);
      std::vector<double> ge, gi;
      for (const auto& m : modes) {
        ge.push_back(m.gamma_ext);
        gi.push_back(m.gamma_int);
      }
      if (!is_stable(cm)) ++unstable;
      ScatteringOptions so;
      so.allow_unstable = true;
      const ScatteringPair sp = scattering_matrices(cm, ge, gi, so);
      const std::complex<double> direct = sp.s(eo, ei), conj = sp.s(eo, n + ei);
      const double mag = std::sqrt(std::norm(direct) + std::norm(conj));
      t.row(static_cast<Eigen::Index>(k)) << spacing, direct.real(), direct.imag(), conj.real(), conj.imag(),
          20.0 * std::log10(std::max(mag, 1e-300));
    }
    if (unstable) warnings.push_back(std::to_string(unstable) + " sweep points are beyond the parametric threshold");
    out.matrix("scattering_sweep.csv", t, {"spacing_hz", "re_direct", "im_direct", "re_conjugate", "im_conjugate", "abs_db"});
    metrics["sweep_points"] = sc.spacing_sweep_hz.size();
  }
  return metrics;
}

std::filesystem::path resolve_output(const std::filesystem::path& dir) {
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv("SAWCOMB_OUTPUT_ROOT"); root && *root) return std::filesystem::path(root) / dir;
  return dir;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg) {
  Outputs out(resolve_output(cfg.output_dir));
  std::vector<std::string> warnings;
  json metrics;
  switch (cfg.pipeline) {
    case Pipeline::twomode: metrics = run_twomode(cfg, out, warnings); break;
    case Pipeline::multimode: metrics = run_multimode(cfg, out, warnings); break;
    case Pipeline::calibration: metrics = run_calibration(cfg, out, warnings); break;
    case Pipeline::scattering: metrics = run_scattering(cfg, out, warnings); break;
  }
  check_finite(metrics, "metrics");

  RunReport rep;
  rep.pipeline = pipeline_name(cfg.pipeline);
  rep.inputs_digest = io::sha256_hex(cfg.raw_text);
  rep.output_dir = out.dir();
  rep.files = out.files();
  rep.metrics_json = metrics.dump(2);
  rep.warnings = warnings;

  const json report = {{"pipeline", rep.pipeline},
                       {"inputs_digest", rep.inputs_digest},
                       {"files", rep.files},
                       {"metrics", metrics},
                       {"warnings", rep.warnings}};
  io::write_text(out.dir() / "report.json", report.dump(2) + "\n");
  rep.files.push_back("report.json");
  return rep;
}

}  // namespace sawcomb
