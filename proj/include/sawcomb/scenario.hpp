#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sawcomb/coupling_graph.hpp"
#include "sawcomb/gaussian_state.hpp"
#include "sawcomb/modesys.hpp"
#include "sawcomb/scattering.hpp"

namespace sawcomb {

enum class Pipeline { twomode, multimode, calibration, scattering };

Pipeline parse_pipeline(const std::string& name);
std::string pipeline_name(Pipeline p);

struct AmplifierConfig {
  double gain = 1.0;  // linear power gain
  double added_photons = 0.0;
  double idler_temp_k = 0.030;
  double sigma_gain_rel = 0.0;
  double sigma_added_photons = 0.0;
  double cov_gain_noise = 0.0;
  std::optional<std::filesystem::path> calibration_store;
};

struct SamplingConfig {
  std::int64_t n_samples = 100000;
  std::optional<std::uint64_t> seed;
  int interval_count = 75;
  double interval_length_s = 2.0;
  bool drift = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct TwoModeConfig {
  int chop_blocks = 4;
  int histogram_bins = 41;
  double histogram_bin_width = 0.25;  // in units of the pump-off standard deviation
};

struct MultiModeConfig {
  bool allow_unstable = false;
  bool global_vectors = false;
};

struct CalibrationConfig {
  double freq_hz = 0.0;
  std::vector<double> temps_k;
  std::vector<double> powers_w_per_hz;  // empty: synthesise from the amplifier section
  double planck_noise_rel = 0.0;
  int pair_a = -1, pair_b = -1;  // mode indices for the correlation fit
  std::vector<double> detunings_hz;
  std::vector<double> c_values;  // empty: synthesise
  double c_epsilon_hz = 0.0;     // pair coupling used for synthetic data and the sweep
  double c_noise_rel = 0.0;
  double t_eff_k = 0.030;
  std::vector<double> sweep_temps_k;
};

struct ScatteringConfig {
  int ref_out = 0, ref_in = 0;  // mode indices
  bool allow_unstable = false;
  int element_out = 0, element_in = 0;
  double comb_start_hz = 0.0;
  int comb_count = 0;
  double comb_epsilon_hz = 0.0;
  double comb_phase_rad = 0.0;
  std::vector<double> spacing_sweep_hz;
};

struct ScenarioConfig {
  std::string source_name;
  std::string raw_text;
  Pipeline pipeline = Pipeline::twomode;
  std::filesystem::path output_dir;

  std::vector<ModeSpec> modes;
  MirrorSpec mirror;
  std::optional<MaterialParams> materials;
  std::vector<PumpTone> pumps;
  std::optional<double> match_tolerance;  // rad/s
  bool include_pump_modes = false;
  std::vector<int> probe_modes;  // mode indices; empty: all non-pump modes

  double input_temp_k = 0.0;
  double bandwidth_hz = 1e3;
  double z0_ohm = 50.0;

  AmplifierConfig amplifier;
  SamplingConfig sampling;
  TwoModeConfig twomode;
  MultiModeConfig multimode;
  CalibrationConfig calibration;
  ScatteringConfig scattering;
};

/// Parses and validates a YAML scenario. Every problem is reported as
/// ConfigError with "source:line:column: field 'path': message".
ScenarioConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Ready-to-run configuration text for a pipeline.
std::string demo_config(Pipeline p);

struct RunReport {
  std::string pipeline;
  std::string inputs_digest;
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // relative to output_dir
  std::string metrics_json;
  std::vector<std::string> warnings;
};

/// Runs the configured pipeline and writes its outputs. Output directories
/// given as relative paths are placed under $SAWCOMB_OUTPUT_ROOT when set.
RunReport run_scenario(const ScenarioConfig& cfg);

/// Output state of a pumped mode set with thermal input on both ports.
struct NetworkResult {
  std::vector<ModeSpec> modes;
  std::vector<FourWaveMatch> matches;
  CouplingMatrix coupling;
  ScatteringPair ladder;
  ScatteringPair quadrature;
  CovarianceMatrix v_out;
};

/// probe_detunings (rad/s, optional) shift each probe away from resonance.
NetworkResult evaluate_network(std::span<const ModeSpec> modes, std::span<const PumpTone> pumps,
                               const MirrorSpec& mirror, double match_tolerance, double input_temp_k,
                               bool allow_unstable, std::span<const double> probe_detunings = {});

/// Independent 64-bit stream seed for item `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Runs fn(0..n-1) on a small thread pool. The first failure (lowest index)
/// is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace sawcomb
