#include "paritygate/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace paritygate {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// Object reader that remembers which keys were consumed so leftovers can be
// reported as unknown fields.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    if (!node_.contains(key)) throw ConfigError(field(key), "required field is missing");
    used_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0)) throw ConfigError(field(key), "must be > 0");
    return x;
  }
  double non_negative(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x >= 0)) throw ConfigError(field(key), "must be >= 0");
    return x;
  }

  long long integer(const std::string& key, long long fallback, long long min_value) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    const long long x = v.get<long long>();
    if (x < min_value) throw ConfigError(field(key), "must be >= " + std::to_string(min_value));
    return x;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::size_t count) {
    const json& v = raw(key);
    if (!v.is_array() || v.size() != count)
      throw ConfigError(field(key), "expected an array of " + std::to_string(count) + " numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(field(key), "expected numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) throw ConfigError(field(key), "expected an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  Section child(const std::string& key) { return Section(raw(key), field(key)); }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

// Frequency fields are plain MHz values; times_2pi converts them to rad/us.
struct Units {
  double scale = kTwoPi;
  double frequency(Section& s, const std::string& key, double fallback_rad) {
    return s.has(key) ? s.number(key) * scale : fallback_rad;
  }
  double positive_frequency(Section& s, const std::string& key, double fallback_rad) {
    const double x = frequency(s, key, fallback_rad);
    if (!(x > 0)) throw ConfigError(s.field(key), "must be > 0");
    return x;
  }
};

void parse_gate(Section& root, RunConfig& c) {
  if (!root.has("gate")) throw ConfigError("gate", "required field is missing");
  const json& g = root.raw("gate");
  if (g.is_string()) {
    c.gate_name = g.get<std::string>();
    try {
      c.gate = named_gate(c.gate_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("gate", e.what());
    }
  } else {
    Section s(g, "gate");
    const std::string parity = s.string("parity", "");
    RotationSpec r;
    r.gamma = s.number("gamma_deg") * kPi / 180.0;
    r.theta = s.number("theta_deg") * kPi / 180.0;
    r.phi = s.number("phi_deg") * kPi / 180.0;
    s.finish();
    try {
      c.gate = parity_gate(parse_parity(parity), r);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("gate.parity", e.what());
    }
    c.gate_name = "custom";
  }
  c.system.parity = c.gate.parity;
  c.pulse.rotation = c.gate.rotation;
}

void parse_system(Section s, Units& u, RunConfig& c) {
  SystemConfig& y = c.system;
  y.omega_c = u.positive_frequency(s, "omega_c_mhz", y.omega_c);
  y.detuning = u.positive_frequency(s, "detuning_mhz", y.detuning);
  y.c3 = s.has("c3_ghz_um3") ? s.number("c3_ghz_um3") * 1e3 * u.scale : y.c3;
  y.c6_d = s.has("c6_d_ghz_um6") ? s.number("c6_d_ghz_um6") * 1e3 * u.scale : y.c6_d;
  y.c6_p = s.has("c6_p_ghz_um6") ? s.number("c6_p_ghz_um6") * 1e3 * u.scale : y.c6_p;
  y.spacing = s.positive("spacing_um", y.spacing);
  y.polar_angle = s.number("polar_angle_deg", 90.0) * kPi / 180.0;
  y.duration = s.positive("duration_us", y.duration);
  y.stark_compensation = s.boolean("stark_compensation", y.stark_compensation);
  y.include_vdw = s.boolean("include_vdw", y.include_vdw);
  s.finish();
}

void parse_pulse(Section s, Units& u, RunConfig& c) {
  c.pulse.omega_f = u.frequency(s, "omega_f_mhz", c.pulse.omega_f);
  if (!(c.pulse.omega_f >= 0)) throw ConfigError(s.field("omega_f_mhz"), "must be >= 0");
  c.pulse.alpha = s.positive("alpha", c.pulse.alpha);
  s.finish();
}

void parse_noise(Section s, RunConfig& c) {
  NoiseSpec& n = c.noise;
  n.position = n.phase = n.amplitude = false;
  for (const auto& ch : s.strings("channels")) {
    if (ch == "position") n.position = true;
    else if (ch == "phase") n.phase = true;
    else if (ch == "amplitude") n.amplitude = true;
    else throw ConfigError(s.field("channels"), "unknown channel '" + ch + "' (position, phase, amplitude)");
  }
  if (s.has("position_sigma_nm")) {
    const auto v = s.numbers("position_sigma_nm", 3);
    for (int k = 0; k < 3; ++k) {
      if (!(v[k] >= 0)) throw ConfigError(s.field("position_sigma_nm"), "must be >= 0");
      n.position_sigma_nm[k] = v[k];
    }
  }
  n.control_phase_sigma = s.non_negative("control_phase_sigma_pi", n.control_phase_sigma / kPi) * kPi;
  n.target_phase_sigma = s.non_negative("target_phase_sigma_pi", n.target_phase_sigma / kPi) * kPi;
  n.control_amplitude_sigma = s.non_negative("control_amplitude_sigma", n.control_amplitude_sigma);
  n.target_amplitude_sigma = s.non_negative("target_amplitude_sigma", n.target_amplitude_sigma);
  try {
    n.sharing = parse_beam_sharing(s.string("beam_sharing", "auto"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.field("beam_sharing"), e.what());
  }
  n.shots = static_cast<int>(s.integer("shots", n.shots, 1));
  n.seed = s.seed("seed", n.seed);
  s.finish();
}

void parse_decay(Section s, RunConfig& c) {
  c.decay_enabled = s.boolean("enabled", true);
  DecayModel& d = c.decay;
  d.gamma_d = 1.0 / s.positive("lifetime_d_us", 1.0 / d.gamma_d);
  d.gamma_p = 1.0 / s.positive("lifetime_p_us", 1.0 / d.gamma_p);
  d.branch_m = s.non_negative("branch_m", d.branch_m);
  d.branch_g0 = s.non_negative("branch_g0", d.branch_g0);
  d.branch_g1 = s.non_negative("branch_g1", d.branch_g1);
  s.finish();
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.field("branch_m"), e.what());
  }
}

void parse_integrator(Section s, RunConfig& c) {
  c.integrator.max_step = s.positive("max_step_us", c.integrator.max_step);
  c.integrator.samples = static_cast<int>(s.integer("samples", c.integrator.samples, 2));
  s.finish();
}

void parse_optimize(Section s, Units& u, RunConfig& c) {
  OptimizeSettings& o = c.optimize;
  const std::string objective = s.string("objective", "deterministic");
  if (objective == "deterministic") o.objective = CostKind::Deterministic;
  else if (objective == "ensemble") o.objective = CostKind::Ensemble;
  else throw ConfigError(s.field("objective"), "expected 'deterministic' or 'ensemble'");

  const std::array<const char*, 3> names{"omega_c_mhz", "omega_f_mhz", "alpha"};
  const std::array<double, 3> scale{u.scale, u.scale, 1.0};
  if (s.has("start")) {
    Section st = s.child("start");
    for (int k = 0; k < 3; ++k) o.start[k] = st.has(names[k]) ? st.number(names[k]) * scale[k] : o.start[k];
    st.finish();
  }
  if (s.has("bounds")) {
    Section b = s.child("bounds");
    for (int k = 0; k < 3; ++k) {
      if (!b.has(names[k])) continue;
      const auto v = b.numbers(names[k], 2);
      if (!(v[0] < v[1])) throw ConfigError(b.field(names[k]), "lower bound must be below upper bound");
      o.bounds[k] = {v[0] * scale[k], v[1] * scale[k]};
    }
    b.finish();
  }
  for (int k = 0; k < 3; ++k)
    if (!o.bounds[k].contains(o.start[k]))
      throw ConfigError(s.field(std::string("start.") + names[k]), "start point outside the bounds");
  o.simplex.max_evaluations = static_cast<int>(s.integer("max_evaluations", o.simplex.max_evaluations, 4));
  o.simplex.tolerance = s.positive("tolerance", o.simplex.tolerance);
  o.simplex.restarts = static_cast<int>(s.integer("restarts", o.simplex.restarts, 0));
  o.simplex.initial_step = s.positive("initial_step", o.simplex.initial_step);
  o.simplex.seed = s.seed("seed", o.simplex.seed);
  s.finish();
}

void parse_codes(Section s, RunConfig& c) {
  CodesSettings& k = c.codes;
  k.code = s.string("code", k.code);
  if (k.code != "repetition" && k.code != "xzzx")
    throw ConfigError(s.field("code"), "expected 'repetition' or 'xzzx'");
  k.layout = s.string("layout", k.layout);
  if (s.has("errors")) k.errors = s.strings("errors");
  if (s.has("amplitudes")) {
    const auto v = s.numbers("amplitudes", 4);
    k.a = {v[0], v[1]};
    k.b = {v[2], v[3]};
    if (std::abs(std::norm(k.a) + std::norm(k.b) - 1.0) > 1e-10)
      throw ConfigError(s.field("amplitudes"), "|A|^2 + |B|^2 must equal 1");
  }
  k.logical = s.string("logical", k.logical);
  s.finish();
  if (k.code == "xzzx" && k.layout.empty()) throw ConfigError(s.field("layout"), "xzzx needs a layout file");
}

void parse_effective(Section s, RunConfig& c) {
  c.effective.random_triples = static_cast<int>(s.integer("random_triples", c.effective.random_triples, 1));
  c.effective.seed = s.seed("seed", c.effective.seed);
  c.effective.threshold = s.positive("threshold", c.effective.threshold);
  s.finish();
}

}  // namespace

ParityGate named_gate(const std::string& name) {
  if (name == "PE-X") return pe_x();
  if (name == "PO-sqrtX") return po_sqrt_x();
  if (name == "PO-X") return parity_gate(Parity::Odd, {kPi, kPi / 2, kPi});
  if (name == "PE-sqrtX") return parity_gate(Parity::Even, {kPi / 2, kPi / 2, kPi});
  throw std::invalid_argument("unknown gate '" + name + "' (PE-X, PO-sqrtX, PO-X, PE-sqrtX)");
}

RunConfig parse_config(const std::string& json_text, const std::string& source_path) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  Section root(j, "");
  RunConfig c;
  c.source_path = source_path;
  c.source_text = json_text;
  c.noise.position = c.noise.phase = c.noise.amplitude = false;

  const long long version = root.integer("schema_version", -1, 0);
  if (version == -1) throw ConfigError("schema_version", "required field is missing");
  if (version != kConfigSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(version) + " (expected 1)");
  if (!root.has("times_2pi")) throw ConfigError("times_2pi", "required field is missing");
  Units units;
  units.scale = root.boolean("times_2pi", true) ? kTwoPi : 1.0;
  c.criterion = root.string("criterion", "");
  c.description = root.string("description", "");

  parse_gate(root, c);
  if (root.has("system")) parse_system(root.child("system"), units, c);
  c.pulse.duration = c.system.duration;
  if (root.has("pulse")) parse_pulse(root.child("pulse"), units, c);
  if (root.has("noise")) parse_noise(root.child("noise"), c);
  if (root.has("decay")) parse_decay(root.child("decay"), c);
  if (root.has("integrator")) parse_integrator(root.child("integrator"), c);
  if (root.has("optimize")) parse_optimize(root.child("optimize"), units, c);
  if (root.has("codes")) parse_codes(root.child("codes"), c);
  if (root.has("effective")) parse_effective(root.child("effective"), c);
  root.finish();

  try {
    c.system.validate();
    c.pulse.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("system", e.what());
  }
  if (!c.codes.layout.empty() && !source_path.empty()) {
    const std::filesystem::path layout(c.codes.layout);
    if (layout.is_relative())
      c.codes.layout = (std::filesystem::path(source_path).parent_path() / layout).lexically_normal().string();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

OptimizationProblem RunConfig::optimization_problem() const {
  OptimizationProblem p;
  p.config = system;
  p.pulse = pulse;
  p.gate = gate;
  p.kind = optimize.objective;
  p.noise = noise;
  p.ensemble = ensemble_options();
  p.bounds = optimize.bounds;
  p.start = optimize.start;
  p.max_step = integrator.max_step;
  return p;
}

EnsembleOptions RunConfig::ensemble_options(int threads) const {
  EnsembleOptions o;
  o.threads = threads;
  o.decay = decay_enabled ? decay : DecayModel::none();
  o.samples = integrator.samples;
  o.max_step = integrator.max_step;
  return o;
}

}  // namespace paritygate
