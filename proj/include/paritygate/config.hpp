#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "paritygate/dynamics.hpp"
#include "paritygate/gates.hpp"
#include "paritygate/model.hpp"
#include "paritygate/noise.hpp"
#include "paritygate/optimize.hpp"

namespace paritygate {

inline constexpr int kConfigSchemaVersion = 1;

// Schema violation; what() starts with the dotted field path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct IntegratorSettings {
  double max_step = kDefaultMaxStep;  // us
  int samples = 301;
};

struct OptimizeSettings {
  CostKind objective = CostKind::Deterministic;
  std::array<Bounds, 3> bounds = OptimizationProblem{}.bounds;
  std::array<double, 3> start = OptimizationProblem{}.start;
  SimplexOptions simplex;
};

struct CodesSettings {
  std::string code = "repetition";  // or "xzzx"
  std::string layout;               // path, resolved against the config file
  std::vector<std::string> errors{"I"};
  Complex a{1.0 / std::numbers::sqrt2, 0.0};  // repetition logical amplitudes
  Complex b{1.0 / std::numbers::sqrt2, 0.0};
  std::string logical;              // optional logical operator applied first (xzzx)
};

struct EffectiveSettings {
  int random_triples = 50;
  std::uint64_t seed = 7;
  double threshold = 10.0;
};

struct RunConfig {
  std::string criterion;
  std::string description;
  std::string gate_name;
  SystemConfig system;
  TargetPulse pulse;
  ParityGate gate = pe_x();
  NoiseSpec noise;  // channel flags all false unless listed
  bool decay_enabled = false;
  DecayModel decay;
  IntegratorSettings integrator;
  OptimizeSettings optimize;
  CodesSettings codes;
  EffectiveSettings effective;

  std::string source_path;  // empty for in-memory configs
  std::string source_text;

  // Noise channels off: all flags false.
  bool noise_enabled() const { return noise.any_enabled(); }
  OptimizationProblem optimization_problem() const;
  EnsembleOptions ensemble_options(int threads = 1) const;
};

RunConfig parse_config(const std::string& json_text, const std::string& source_path = "");
RunConfig load_config(const std::string& path);

// Named gates: "PE-X" = U_E(pi, pi/2, pi), "PO-sqrtX" = U_O(pi/2, pi/2, pi),
// "PO-X" = U_O(pi, pi/2, pi).
ParityGate named_gate(const std::string& name);

}  // namespace paritygate
