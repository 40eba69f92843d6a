#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "paritygate/dynamics.hpp"
#include "paritygate/gates.hpp"
#include "paritygate/model.hpp"

namespace paritygate {

// How the C1 and C2 beam draws relate. Auto: shared for even parity,
// independent for odd.
enum class BeamSharing { Auto, Shared, Independent };

std::string_view beam_sharing_name(BeamSharing s);
BeamSharing parse_beam_sharing(std::string_view name);

struct NoiseSpec {
  std::array<double, 3> position_sigma_nm{22.0, 25.0, 60.0};
  double control_phase_sigma = 0.01 * std::numbers::pi;  // rad
  double target_phase_sigma = 0.01 * std::numbers::pi;
  double control_amplitude_sigma = 0.008;
  double target_amplitude_sigma = 0.008;
  bool position = true;
  bool phase = true;
  bool amplitude = true;
  BeamSharing sharing = BeamSharing::Auto;
  int shots = 100;
  std::uint64_t seed = 20240917;

  void validate() const;
  bool any_enabled() const { return position || phase || amplitude; }
  // Copy with every standard deviation multiplied by `factor`.
  NoiseSpec scaled(double factor) const;
};

// sigma * sqrt(-2 ln zeta1) * cos(2 pi zeta2); zeta1 in (0, 1].
double sample_displacement(double sigma, double zeta1, double zeta2);

// Counter-based stream: (seed, shot, attempt) is mixed with SplitMix64 into
// the seed of a mt19937_64, so a shot's draws never depend on other shots.
// Uniforms use the top 53 bits of the engine output, which keeps the
// sequence identical across standard libraries.
class ShotRng {
 public:
  ShotRng(std::uint64_t seed, std::uint64_t shot, std::uint64_t attempt = 0);
  double uniform();            // [0, 1)
  double uniform_open_low();   // (0, 1]
  double normal(double sigma); // Box-Muller, cosine branch

 private:
  std::mt19937_64 engine_;
};

// Quasi-static draw for one shot. Every channel is drawn in a fixed order
// (9 position deviates, 6 phases, 6 amplitudes) and disabled channels are
// zeroed afterwards, so enabling one channel never perturbs another.
// Beam sharing follows config.parity; a draw with coincident atoms is
// rejected and redrawn from the next attempt stream.
NoiseDraw draw_noise(const NoiseSpec& spec, const SystemConfig& config, std::uint64_t shot);

// Short hex digest of a draw's bit pattern.
std::string draw_digest(const NoiseDraw& draw);

struct EnsembleOptions {
  int threads = 1;                   // 0: hardware concurrency
  DecayModel decay = DecayModel::none();  // nonzero rates switch to Lindblad
  bool record_curves = false;        // keep fidelity(t) per shot
  int samples = 301;                 // recorded points per trajectory
  double max_step = kDefaultMaxStep;
  // Called after each finished shot (any thread, serialized).
  std::function<void(int done, int total)> progress;
};

struct ShotResult {
  std::uint64_t shot = 0;
  NoiseDraw draw;
  double fidelity = 0.0;
  bool aborted = false;
  std::string error;
  int steps = 0;
  double max_drift = 0.0;  // norm or trace drift
  std::vector<double> times;
  std::vector<double> curve;
};

struct EnsembleResult {
  std::vector<ShotResult> shots;  // in shot order
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (N - 1)
  double min = 0.0;
  double max = 0.0;
  int completed = 0;
  int aborted = 0;
  std::uint64_t seed = 0;
};

class EnsembleAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A shot whose norm drifts beyond this is rerun with half the step, at most
// kMaxStepRefinements times, before it counts as aborted.
inline constexpr double kShotNormTolerance = 1e-8;
inline constexpr int kMaxStepRefinements = 2;

// Fidelity at tau for one shot with the fixed input state; fills
// times/curve when `curve` is requested.
ShotResult run_shot(const SystemConfig& config, const TargetPulse& pulse, const ParityGate& gate,
                    const NoiseDraw& draw, const EnsembleOptions& options);

// Runs spec.shots independent shots. Aborted shots are excluded from the
// statistics; more than 1% aborted throws EnsembleAborted.
EnsembleResult ensemble_average(const SystemConfig& config, const TargetPulse& pulse,
                                const NoiseSpec& spec, const ParityGate& gate,
                                const EnsembleOptions& options = {});

// Worker count from the environment (PARITYGATE_THREADS) or the hardware.
int default_thread_count();

}  // namespace paritygate
