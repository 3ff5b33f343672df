#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sawcomb/constants.hpp"
#include "sawcomb/errors.hpp"
#include "sawcomb/scenario.hpp"

namespace sawcomb {

namespace c = constants;

Pipeline parse_pipeline(const std::string& name) {
  if (name == "twomode") return Pipeline::twomode;
  if (name == "multimode") return Pipeline::multimode;
  if (name == "calibration") return Pipeline::calibration;
  if (name == "scattering") return Pipeline::scattering;
  throw ConfigError("unknown pipeline '" + name + "' (expected twomode, multimode, calibration or scattering)");
}

std::string pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::twomode: return "twomode";
    case Pipeline::multimode: return "multimode";
    case Pipeline::calibration: return "calibration";
    case Pipeline::scattering: return "scattering";
  }
  return "unknown";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& msg) const {
    std::string loc = source_;
    if (at.IsDefined()) {
      const YAML::Mark m = at.Mark();
      if (m.line >= 0) loc += ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
    }
    throw ConfigError(loc + ": field '" + field + "': " + msg);
  }

  void expect_map(const YAML::Node& n, const std::string& path) const {
    if (!n.IsMap()) fail(n, path, "expected a mapping");
  }

  void check_keys(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> allowed) const {
    expect_map(map, path);
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        fail(kv.first, join(path, key), "unknown field");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& path) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, join(path, key), "required field is missing");
    return n;
  }

  double number(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, field, "must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(n, field, "expected a number, got '" + n.Scalar() + "'");
    }
  }

  long long integer(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected an integer");
    try {
      return n.as<long long>();
    } catch (const YAML::BadConversion&) {
      fail(n, field, "expected an integer, got '" + n.Scalar() + "'");
    }
  }

  bool boolean(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected true or false");
    try {
      return n.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail(n, field, "expected true or false, got '" + n.Scalar() + "'");
    }
  }

  std::string string(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a string");
    return n.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence()) fail(n, field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::pair<int, int> index_pair(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence() || n.size() != 2) fail(n, field, "expected a list of two mode indices");
    return {static_cast<int>(integer(n[0], field + "[0]")), static_cast<int>(integer(n[1], field + "[1]"))};
  }

  double opt_number(const YAML::Node& map, const std::string& key, const std::string& path, double fallback) const {
    const YAML::Node n = map[key];
    return n ? number(n, join(path, key)) : fallback;
  }

  double positive(const YAML::Node& map, const std::string& key, const std::string& path) const {
    const YAML::Node n = require(map, key, path);
    const double v = number(n, join(path, key));
    if (!(v > 0.0)) fail(n, join(path, key), "must be positive");
    return v;
  }

  double non_negative(const YAML::Node& map, const std::string& key, const std::string& path, double fallback) const {
    const YAML::Node n = map[key];
    if (!n) return fallback;
    const double v = number(n, join(path, key));
    if (v < 0.0) fail(n, join(path, key), "must be non-negative");
    return v;
  }

 private:
  std::string source_;
};

// Runs a validator and turns its InvalidArgument into a located ConfigError.
template <class F>
void located(const Reader& r, const YAML::Node& at, const std::string& field, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.fail(at, field, e.what());
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source_name) {
  Reader r(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(source_name + ": empty configuration");
  r.check_keys(root, "",
               {"pipeline", "output_dir", "system", "pumps", "probes", "input", "measurement", "amplifier", "sampling",
                "twomode", "multimode", "calibration", "scattering"});

  ScenarioConfig cfg;
  cfg.source_name = source_name;
  cfg.raw_text = text;

  {
    const YAML::Node n = r.require(root, "pipeline", "");
    located(r, n, "pipeline", [&] { cfg.pipeline = parse_pipeline(r.string(n, "pipeline")); });
  }
  cfg.output_dir = r.string(r.require(root, "output_dir", ""), "output_dir");

  // system
  const YAML::Node sys = r.require(root, "system", "");
  r.check_keys(sys, "system", {"mirror", "modes", "materials", "match_tolerance_hz", "include_pump_modes"});
  if (const YAML::Node mat = sys["materials"]) {
    r.check_keys(mat, "system.materials",
                 {"e14_c_per_m2", "eps_f_per_m", "rho_kg_per_m3", "v_saw_m_per_s", "area_m2", "l_p_m", "l_m_m", "e_l_j",
                  "e_c_j"});
    MaterialParams m;
    const std::string p = "system.materials";
    m.e14 = r.positive(mat, "e14_c_per_m2", p);
    m.eps = r.positive(mat, "eps_f_per_m", p);
    m.rho = r.positive(mat, "rho_kg_per_m3", p);
    m.v_saw = r.positive(mat, "v_saw_m_per_s", p);
    m.area = r.positive(mat, "area_m2", p);
    m.l_p = r.positive(mat, "l_p_m", p);
    m.l_m = r.positive(mat, "l_m_m", p);
    m.e_l = r.positive(mat, "e_l_j", p);
    m.e_c = r.positive(mat, "e_c_j", p);
    located(r, mat, p, [&] { m.validate(); });
    cfg.materials = m;
  }
  {
    const YAML::Node mir = r.require(sys, "mirror", "system");
    const std::string p = "system.mirror";
    r.check_keys(mir, p, {"freq_hz", "g_vac_hz", "l_j_h", "c_total_f"});
    double g_vac_hz = 0.0;
    if (mir["g_vac_hz"]) {
      g_vac_hz = r.non_negative(mir, "g_vac_hz", p, 0.0);
    } else if (cfg.materials) {
      g_vac_hz = c::to_hz(estimate_vacuum_coupling(*cfg.materials));
    } else {
      r.fail(mir, p + ".g_vac_hz", "required unless system.materials is given");
    }
    located(r, mir, p, [&] {
      if (mir["l_j_h"] || mir["c_total_f"]) {
        const double lj = r.positive(mir, "l_j_h", p);
        const double ct = r.positive(mir, "c_total_f", p);
        cfg.mirror = MirrorSpec::from_circuit(lj, ct, g_vac_hz);
        if (mir["freq_hz"]) {
          MirrorSpec check = cfg.mirror;
          check.omega_lc = c::to_angular(r.number(mir["freq_hz"], p + ".freq_hz"));
          check.validate();
        }
      } else {
        cfg.mirror = MirrorSpec::from_hz(r.positive(mir, "freq_hz", p), g_vac_hz);
      }
    });
  }
  {
    const YAML::Node modes = r.require(sys, "modes", "system");
    if (!modes.IsSequence() || modes.size() == 0) r.fail(modes, "system.modes", "expected a non-empty list");
    std::set<int> seen;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::string p = "system.modes[" + std::to_string(i) + "]";
      const YAML::Node m = modes[i];
      r.check_keys(m, p, {"index", "freq_hz", "loss_ext_hz", "loss_int_hz"});
      const YAML::Node idx_node = r.require(m, "index", p);
      const int idx = static_cast<int>(r.integer(idx_node, p + ".index"));
      if (!seen.insert(idx).second) r.fail(idx_node, p + ".index", "duplicate mode index " + std::to_string(idx));
      located(r, m, p, [&] {
        cfg.modes.push_back(ModeSpec::from_hz(idx, r.positive(m, "freq_hz", p), r.non_negative(m, "loss_ext_hz", p, 0.0),
                                              r.non_negative(m, "loss_int_hz", p, 0.0)));
      });
    }
    std::sort(cfg.modes.begin(), cfg.modes.end(), [](const ModeSpec& a, const ModeSpec& b) { return a.omega < b.omega; });
  }
  if (const YAML::Node tol = sys["match_tolerance_hz"]) {
    const double v = r.number(tol, "system.match_tolerance_hz");
    if (!(v > 0.0)) r.fail(tol, "system.match_tolerance_hz", "must be positive");
    cfg.match_tolerance = c::to_angular(v);
  }
  if (const YAML::Node n = sys["include_pump_modes"]) cfg.include_pump_modes = r.boolean(n, "system.include_pump_modes");

  auto mode_exists = [&](int idx) {
    return std::any_of(cfg.modes.begin(), cfg.modes.end(), [&](const ModeSpec& m) { return m.index == idx; });
  };
  auto check_mode = [&](const YAML::Node& at, const std::string& field, int idx) {
    if (!mode_exists(idx)) r.fail(at, field, "mode index " + std::to_string(idx) + " does not exist");
  };

  // pumps
  if (const YAML::Node pumps = root["pumps"]) {
    if (!pumps.IsSequence()) r.fail(pumps, "pumps", "expected a list");
    for (std::size_t i = 0; i < pumps.size(); ++i) {
      const std::string p = "pumps[" + std::to_string(i) + "]";
      const YAML::Node n = pumps[i];
      r.check_keys(n, p, {"freq_hz", "flux_phi0", "phase_rad", "epsilon_hz"});
      located(r, n, p, [&] {
        PumpTone t = PumpTone::from_hz(r.positive(n, "freq_hz", p), r.non_negative(n, "flux_phi0", p, 0.0),
                                       r.opt_number(n, "phase_rad", p, 0.0));
        if (n["epsilon_hz"]) t.epsilon_override = c::to_angular(r.non_negative(n, "epsilon_hz", p, 0.0));
        t.validate();
        cfg.pumps.push_back(t);
      });
    }
  }

  if (const YAML::Node probes = root["probes"]) {
    r.check_keys(probes, "probes", {"modes"});
    const YAML::Node list = r.require(probes, "modes", "probes");
    if (!list.IsSequence()) r.fail(list, "probes.modes", "expected a list of mode indices");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string f = "probes.modes[" + std::to_string(i) + "]";
      const int idx = static_cast<int>(r.integer(list[i], f));
      check_mode(list[i], f, idx);
      if (std::find(cfg.probe_modes.begin(), cfg.probe_modes.end(), idx) != cfg.probe_modes.end())
        r.fail(list[i], f, "mode listed twice");
      cfg.probe_modes.push_back(idx);
    }
  }

  if (const YAML::Node in = root["input"]) {
    r.check_keys(in, "input", {"temp_k"});
    cfg.input_temp_k = r.non_negative(in, "temp_k", "input", 0.0);
  }
  if (const YAML::Node meas = root["measurement"]) {
    r.check_keys(meas, "measurement", {"bandwidth_hz", "z0_ohm"});
    cfg.bandwidth_hz = r.positive(meas, "bandwidth_hz", "measurement");
    if (meas["z0_ohm"]) cfg.z0_ohm = r.positive(meas, "z0_ohm", "measurement");
  } else if (cfg.pipeline == Pipeline::multimode) {
    r.fail(root, "measurement.bandwidth_hz", "the multimode pipeline needs the measurement bandwidth");
  }

  if (const YAML::Node amp = root["amplifier"]) {
    const std::string p = "amplifier";
    r.check_keys(amp, p,
                 {"gain_db", "added_photons", "idler_temp_k", "sigma_gain_rel", "sigma_added_photons", "cov_gain_noise",
                  "calibration_store"});
    auto& a = cfg.amplifier;
    if (const YAML::Node g = amp["gain_db"]) {
      const double db = r.number(g, p + ".gain_db");
      if (db < 0.0) r.fail(g, p + ".gain_db", "gain below unity");
      a.gain = std::pow(10.0, db / 10.0);
    }
    a.added_photons = r.non_negative(amp, "added_photons", p, 0.0);
    a.idler_temp_k = r.non_negative(amp, "idler_temp_k", p, a.idler_temp_k);
    a.sigma_gain_rel = r.non_negative(amp, "sigma_gain_rel", p, 0.0);
    a.sigma_added_photons = r.non_negative(amp, "sigma_added_photons", p, 0.0);
    a.cov_gain_noise = r.opt_number(amp, "cov_gain_noise", p, 0.0);
    if (const YAML::Node s = amp["calibration_store"]) a.calibration_store = r.string(s, p + ".calibration_store");
  }

  if (const YAML::Node s = root["sampling"]) {
    const std::string p = "sampling";
    r.check_keys(s, p, {"n_samples", "seed", "interval_count", "interval_length_s", "drift", "threads"});
    auto& sm = cfg.sampling;
    if (const YAML::Node n = s["n_samples"]) {
      sm.n_samples = r.integer(n, p + ".n_samples");
      if (sm.n_samples < 2) r.fail(n, p + ".n_samples", "need at least two samples");
    }
    if (const YAML::Node n = s["seed"]) {
      const long long v = r.integer(n, p + ".seed");
      if (v < 0) r.fail(n, p + ".seed", "must be non-negative");
      sm.seed = static_cast<std::uint64_t>(v);
    }
    if (const YAML::Node n = s["interval_count"]) {
      sm.interval_count = static_cast<int>(r.integer(n, p + ".interval_count"));
      if (sm.interval_count < 1) r.fail(n, p + ".interval_count", "must be at least one");
    }
    if (s["interval_length_s"]) sm.interval_length_s = r.positive(s, "interval_length_s", p);
    if (const YAML::Node n = s["drift"]) sm.drift = r.boolean(n, p + ".drift");
    if (const YAML::Node n = s["threads"]) {
      const long long v = r.integer(n, p + ".threads");
      if (v < 0 || v > 256) r.fail(n, p + ".threads", "must be between 0 and 256");
      sm.threads = static_cast<unsigned>(v);
    }
  }
  const bool samples = cfg.pipeline == Pipeline::twomode || cfg.pipeline == Pipeline::multimode ||
                       cfg.pipeline == Pipeline::calibration;
  if (samples && !cfg.sampling.seed) r.fail(root, "sampling.seed", "a seed is required for sampling pipelines");

  if (const YAML::Node t = root["twomode"]) {
    const std::string p = "twomode";
    r.check_keys(t, p, {"chop_blocks", "histogram_bins", "histogram_bin_width"});
    if (const YAML::Node n = t["chop_blocks"]) {
      cfg.twomode.chop_blocks = static_cast<int>(r.integer(n, p + ".chop_blocks"));
      if (cfg.twomode.chop_blocks < 1) r.fail(n, p + ".chop_blocks", "must be at least one");
    }
    if (const YAML::Node n = t["histogram_bins"]) {
      cfg.twomode.histogram_bins = static_cast<int>(r.integer(n, p + ".histogram_bins"));
      if (cfg.twomode.histogram_bins < 1) r.fail(n, p + ".histogram_bins", "must be at least one");
    }
    if (t["histogram_bin_width"]) cfg.twomode.histogram_bin_width = r.positive(t, "histogram_bin_width", p);
  }
  if (cfg.pipeline == Pipeline::twomode &&
      cfg.sampling.n_samples < 2 * static_cast<std::int64_t>(cfg.twomode.chop_blocks) * 2)
    r.fail(root, "sampling.n_samples", "too few samples for the requested chop blocks");

  if (const YAML::Node m = root["multimode"]) {
    const std::string p = "multimode";
    r.check_keys(m, p, {"allow_unstable", "vectors"});
    if (const YAML::Node n = m["allow_unstable"]) cfg.multimode.allow_unstable = r.boolean(n, p + ".allow_unstable");
    if (const YAML::Node n = m["vectors"]) {
      const std::string v = r.string(n, p + ".vectors");
      if (v == "global") cfg.multimode.global_vectors = true;
      else if (v != "per_interval") r.fail(n, p + ".vectors", "expected per_interval or global");
    }
  }

  if (const YAML::Node cal = root["calibration"]) {
    const std::string p = "calibration";
    r.check_keys(cal, p,
                 {"freq_hz", "temps_k", "powers_w_per_hz", "planck_noise_rel", "pair", "detunings_hz", "c_values",
                  "epsilon_hz", "c_noise_rel", "t_eff_k", "sweep_temps_k"});
    auto& cc = cfg.calibration;
    cc.freq_hz = r.positive(cal, "freq_hz", p);
    cc.temps_k = r.numbers(r.require(cal, "temps_k", p), p + ".temps_k");
    if (const YAML::Node n = cal["powers_w_per_hz"]) {
      cc.powers_w_per_hz = r.numbers(n, p + ".powers_w_per_hz");
      if (cc.powers_w_per_hz.size() != cc.temps_k.size()) r.fail(n, p + ".powers_w_per_hz", "one power per temperature");
    }
    cc.planck_noise_rel = r.non_negative(cal, "planck_noise_rel", p, 0.0);
    cc.t_eff_k = r.non_negative(cal, "t_eff_k", p, cc.t_eff_k);
    if (const YAML::Node pair = cal["pair"]) {
      const auto [a, b] = r.index_pair(pair, p + ".pair");
      check_mode(pair[0], p + ".pair[0]", a);
      check_mode(pair[1], p + ".pair[1]", b);
      if (a == b) r.fail(pair, p + ".pair", "the pair needs two different modes");
      cc.pair_a = a;
      cc.pair_b = b;
      cc.detunings_hz = r.numbers(r.require(cal, "detunings_hz", p), p + ".detunings_hz");
      cc.c_epsilon_hz = r.non_negative(cal, "epsilon_hz", p, 0.0);
      if (const YAML::Node n = cal["c_values"]) {
        cc.c_values = r.numbers(n, p + ".c_values");
        if (cc.c_values.size() != cc.detunings_hz.size()) r.fail(n, p + ".c_values", "one value per detuning");
      } else if (!(cc.c_epsilon_hz > 0.0)) {
        r.fail(cal, p + ".epsilon_hz", "needed to synthesise correlation data");
      }
      cc.c_noise_rel = r.non_negative(cal, "c_noise_rel", p, 0.0);
      if (const YAML::Node n = cal["sweep_temps_k"]) {
        cc.sweep_temps_k = r.numbers(n, p + ".sweep_temps_k");
        if (!(cc.c_epsilon_hz > 0.0)) r.fail(n, p + ".sweep_temps_k", "the sweep needs calibration.epsilon_hz");
      }
    }
  } else if (cfg.pipeline == Pipeline::calibration) {
    r.fail(root, "calibration", "the calibration pipeline needs a calibration section");
  }

  if (const YAML::Node sc = root["scattering"]) {
    const std::string p = "scattering";
    r.check_keys(sc, p, {"reference", "element", "allow_unstable", "comb", "spacing_sweep_hz"});
    auto& s = cfg.scattering;
    const YAML::Node ref = r.require(sc, "reference", p);
    std::tie(s.ref_out, s.ref_in) = r.index_pair(ref, p + ".reference");
    check_mode(ref[0], p + ".reference[0]", s.ref_out);
    check_mode(ref[1], p + ".reference[1]", s.ref_in);
    if (const YAML::Node n = sc["allow_unstable"]) s.allow_unstable = r.boolean(n, p + ".allow_unstable");
    if (sc["element"] || sc["spacing_sweep_hz"]) {
      const YAML::Node el = r.require(sc, "element", p);
      std::tie(s.element_out, s.element_in) = r.index_pair(el, p + ".element");
      check_mode(el[0], p + ".element[0]", s.element_out);
      check_mode(el[1], p + ".element[1]", s.element_in);
    }
    if (const YAML::Node sweep = sc["spacing_sweep_hz"]) {
      s.spacing_sweep_hz = r.numbers(sweep, p + ".spacing_sweep_hz");
      const YAML::Node comb = r.require(sc, "comb", p);
      r.check_keys(comb, p + ".comb", {"start_hz", "count", "epsilon_hz", "phase_rad"});
      s.comb_start_hz = r.positive(comb, "start_hz", p + ".comb");
      const YAML::Node cnt = r.require(comb, "count", p + ".comb");
      s.comb_count = static_cast<int>(r.integer(cnt, p + ".comb.count"));
      if (s.comb_count < 1) r.fail(cnt, p + ".comb.count", "must be at least one");
      s.comb_epsilon_hz = r.non_negative(comb, "epsilon_hz", p + ".comb", 0.0);
      s.comb_phase_rad = r.opt_number(comb, "phase_rad", p + ".comb", 0.0);
    }
  } else if (cfg.pipeline == Pipeline::scattering) {
    r.fail(root, "scattering", "the scattering pipeline needs a scattering section");
  }

  if (cfg.pipeline == Pipeline::twomode || cfg.pipeline == Pipeline::multimode) {
    if (cfg.pumps.empty()) r.fail(root, "pumps", "this pipeline needs at least one pump");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

namespace {

constexpr const char* kSystemRing = R"(system:
  mirror:
    freq_hz: 2.1e9
    g_vac_hz: 1.6e6
  # Equally spaced modes; the comb tones sit halfway between neighbours.
  modes:
    - {index: 1, freq_hz: 3.8546e9, loss_ext_hz: 20.0e3, loss_int_hz: 20.0e3}
    - {index: 2, freq_hz: 3.8569e9, loss_ext_hz: 20.0e3, loss_int_hz: 20.0e3}
    - {index: 3, freq_hz: 3.8592e9, loss_ext_hz: 20.0e3, loss_int_hz: 20.0e3}
    - {index: 4, freq_hz: 3.8615e9, loss_ext_hz: 20.0e3, loss_int_hz: 20.0e3}
)";

}  // namespace

std::string demo_config(Pipeline p) {
  std::ostringstream os;
  switch (p) {
    case Pipeline::multimode:
      os << "# Four modes, four-tone pump comb, synthetic interval data.\n"
            "pipeline: multimode\n"
            "output_dir: out/demo-multimode\n"
         << kSystemRing
         << "pumps:\n"
            "  - {freq_hz: 3.85575e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 8.0e3}\n"
            "  - {freq_hz: 3.85805e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 8.0e3}\n"
            "  - {freq_hz: 3.86035e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 8.0e3}\n"
            "  - {freq_hz: 3.86265e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 8.0e3}\n"
            "input:\n"
            "  temp_k: 0.0\n"
            "measurement:\n"
            "  bandwidth_hz: 1.0e3\n"
            "  z0_ohm: 50.0\n"
            "amplifier:\n"
            "  gain_db: 80.0\n"
            "  added_photons: 0.08\n"
            "  idler_temp_k: 0.03\n"
            "  sigma_gain_rel: 0.01\n"
            "  sigma_added_photons: 0.005\n"
            "sampling:\n"
            "  n_samples: 100000\n"
            "  seed: 20240611\n"
            "  interval_count: 75\n"
            "  interval_length_s: 2.0\n"
            "  drift: false\n"
            "multimode:\n"
            "  vectors: per_interval\n";
      break;
    case Pipeline::twomode:
      os << "# Single pump on mode 3; pairs symmetric about it are squeezed.\n"
            "pipeline: twomode\n"
            "output_dir: out/demo-twomode\n"
            "system:\n"
            "  mirror:\n"
            "    freq_hz: 2.1e9\n"
            "    g_vac_hz: 1.6e6\n"
            "  modes:\n";
      for (int k = 0; k < 7; ++k) {
        const double loss = 20e3 + 4e3 * std::abs(k - 3);
        os << "    - {index: " << k << ", freq_hz: " << 3.8511e9 + 2.3e6 * k << ", loss_ext_hz: " << loss
           << ", loss_int_hz: 10.0e3}\n";
      }
      os << "pumps:\n"
            "  - {freq_hz: 3.8580e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 10.0e3}\n"
            "input:\n"
            "  temp_k: 0.02\n"
            "amplifier:\n"
            "  gain_db: 80.0\n"
            "  added_photons: 0.08\n"
            "sampling:\n"
            "  n_samples: 400000\n"
            "  seed: 7\n"
            "twomode:\n"
            "  chop_blocks: 4\n"
            "  histogram_bins: 41\n"
            "  histogram_bin_width: 0.25\n";
      break;
    case Pipeline::calibration:
      os << "# Planck spectroscopy plus correlation-lineshape fit and PPT temperature sweep.\n"
            "pipeline: calibration\n"
            "output_dir: out/demo-calibration\n"
            "system:\n"
            "  mirror:\n"
            "    freq_hz: 2.1e9\n"
            "    g_vac_hz: 1.6e6\n"
            "  modes:\n"
            "    - {index: 0, freq_hz: 3.8557e9, loss_ext_hz: 20.0e3, loss_int_hz: 10.0e3}\n"
            "    - {index: 1, freq_hz: 3.8603e9, loss_ext_hz: 20.0e3, loss_int_hz: 10.0e3}\n"
            "input:\n"
            "  temp_k: 0.03\n"
            "amplifier:\n"
            "  gain_db: 80.0\n"
            "  added_photons: 0.08\n"
            "sampling:\n"
            "  seed: 11\n"
            "calibration:\n"
            "  freq_hz: 3.858e9\n"
            "  temps_k: [";
      for (int k = 0; k < 20; ++k) os << (k ? ", " : "") << 0.01 * std::pow(50.0, k / 19.0);
      os << "]\n"
            "  planck_noise_rel: 0.01\n"
            "  pair: [0, 1]\n"
            "  detunings_hz: [";
      for (int k = -20; k <= 20; ++k) os << (k != -20 ? ", " : "") << 2e3 * k;
      os << "]\n"
            "  epsilon_hz: 6.0e3\n"
            "  c_noise_rel: 0.0\n"
            "  t_eff_k: 0.03\n"
            "  sweep_temps_k: [";
      for (int k = 0; k <= 30; ++k) os << (k ? ", " : "") << 0.02 + 0.01 * k;
      os << "]\n";
      break;
    case Pipeline::scattering:
      os << "# Scattering table for the four-tone comb and a pump-spacing sweep of one element.\n"
            "pipeline: scattering\n"
            "output_dir: out/demo-scattering\n"
         << kSystemRing
         << "pumps:\n"
            "  - {freq_hz: 3.85575e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 8.0e3}\n"
            "  - {freq_hz: 3.85805e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 8.0e3}\n"
            "  - {freq_hz: 3.86035e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 8.0e3}\n"
            "  - {freq_hz: 3.86265e9, flux_phi0: 0.0, phase_rad: 0.0, epsilon_hz: 8.0e3}\n"
            "scattering:\n"
            "  reference: [1, 1]\n"
            "  element: [2, 1]\n"
            "  comb: {start_hz: 3.85575e9, count: 4, epsilon_hz: 8.0e3, phase_rad: 0.0}\n"
            "  spacing_sweep_hz: [";
      for (int k = 0; k <= 20; ++k) os << (k ? ", " : "") << 2.3e6 - 10e3 + 1e3 * k;
      os << "]\n";
      break;
  }
  return os.str();
}

}  // namespace sawcomb
