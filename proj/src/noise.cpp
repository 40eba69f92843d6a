#include "paritygate/noise.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "paritygate/digest.hpp"

namespace paritygate {

std::string_view beam_sharing_name(BeamSharing s) {
  switch (s) {
    case BeamSharing::Auto: return "auto";
    case BeamSharing::Shared: return "shared";
    case BeamSharing::Independent: return "independent";
  }
  return "auto";
}

BeamSharing parse_beam_sharing(std::string_view name) {
  if (name == "auto") return BeamSharing::Auto;
  if (name == "shared") return BeamSharing::Shared;
  if (name == "independent") return BeamSharing::Independent;
  throw std::invalid_argument("unknown beam sharing '" + std::string(name) + "'");
}

void NoiseSpec::validate() const {
  for (double s : position_sigma_nm)
    if (!(s >= 0) || !std::isfinite(s)) throw std::invalid_argument("position sigma must be >= 0");
  for (double s : {control_phase_sigma, target_phase_sigma, control_amplitude_sigma,
                   target_amplitude_sigma})
    if (!(s >= 0) || !std::isfinite(s)) throw std::invalid_argument("noise sigma must be >= 0");
  if (shots < 1) throw std::invalid_argument("shot count must be >= 1");
}

NoiseSpec NoiseSpec::scaled(double factor) const {
  NoiseSpec out = *this;
  for (double& s : out.position_sigma_nm) s *= factor;
  out.control_phase_sigma *= factor;
  out.target_phase_sigma *= factor;
  out.control_amplitude_sigma *= factor;
  out.target_amplitude_sigma *= factor;
  return out;
}

double sample_displacement(double sigma, double zeta1, double zeta2) {
  if (!(zeta1 > 0.0 && zeta1 <= 1.0)) throw std::domain_error("zeta1 must lie in (0, 1]");
  return sigma * std::sqrt(-2.0 * std::log(zeta1)) * std::cos(2.0 * std::numbers::pi * zeta2);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t shot, std::uint64_t attempt) {
  std::uint64_t x = seed;
  std::uint64_t h = splitmix64(x);
  x = h ^ shot;
  h = splitmix64(x);
  x = h ^ attempt;
  return splitmix64(x);
}

}  // namespace

ShotRng::ShotRng(std::uint64_t seed, std::uint64_t shot, std::uint64_t attempt)
    : engine_(mix_seed(seed, shot, attempt)) {}

double ShotRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double ShotRng::uniform_open_low() { return 1.0 - uniform(); }

double ShotRng::normal(double sigma) {
  const double z1 = uniform_open_low();
  const double z2 = uniform();
  return sample_displacement(sigma, z1, z2);
}

NoiseDraw draw_noise(const NoiseSpec& spec, const SystemConfig& config, std::uint64_t shot) {
  spec.validate();
  const Parity parity = config.parity;
  const bool shared = spec.sharing == BeamSharing::Shared ||
                      (spec.sharing == BeamSharing::Auto && parity == Parity::Even);
  // A draw that puts two atoms on top of each other is redrawn from the
  // next attempt stream; at trap-scale sigmas this never happens.
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    ShotRng rng(spec.seed, shot, attempt);
    NoiseDraw d;
    for (int a = 0; a < kAtoms; ++a)
      for (int k = 0; k < 3; ++k) d.displacement[a][k] = rng.normal(spec.position_sigma_nm[k]) * 1e-3;
    for (int b = 0; b < kBeams; ++b)
      d.phase_offset[b] = rng.normal(b < kTargetOmega0 ? spec.control_phase_sigma : spec.target_phase_sigma);
    for (int b = 0; b < kBeams; ++b)
      d.amplitude_error[b] =
          rng.normal(b < kTargetOmega0 ? spec.control_amplitude_sigma : spec.target_amplitude_sigma);
    if (shared) {
      d.phase_offset[kC2Ground0] = d.phase_offset[kC1Ground0];
      d.phase_offset[kC2Ground1] = d.phase_offset[kC1Ground1];
      d.amplitude_error[kC2Ground0] = d.amplitude_error[kC1Ground0];
      d.amplitude_error[kC2Ground1] = d.amplitude_error[kC1Ground1];
    }
    if (!spec.position) d.displacement = {};
    if (!spec.phase) d.phase_offset = {};
    if (!spec.amplitude) d.amplitude_error = {};

    bool separated = true;
    try {
      geometry_from_displacements(config, d.displacement[0], d.displacement[1], d.displacement[2]);
    } catch (const std::invalid_argument&) {
      separated = false;
    }
    if (separated) return d;
  }
  throw std::runtime_error("could not draw a non-degenerate geometry");
}

std::string draw_digest(const NoiseDraw& draw) {
  std::string bytes;
  const auto put = [&bytes](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
  };
  for (const auto& v : draw.displacement)
    for (double x : v) put(x);
  for (double x : draw.phase_offset) put(x);
  for (double x : draw.amplitude_error) put(x);
  return sha1_hex(bytes).substr(0, 16);
}

namespace {

// One attempt on a given grid; throws TraceDriftError on excess norm drift.
void integrate_shot(const Hamiltonian& h, const StateVector& target, const TimeGrid& grid,
                    const EnsembleOptions& options, ShotResult& r) {
  r.steps = grid.steps;
  r.times.clear();
  r.curve.clear();
  if (options.decay.is_zero()) {
    StateObserver observe;
    if (options.record_curves)
      observe = [&](double t, const StateVector& psi) {
        r.times.push_back(t);
        r.curve.push_back(std::norm(target.dot(psi)));
      };
    const auto res = evolve_schrodinger(h, reference_initial_state(), grid, observe);
    r.fidelity = std::norm(target.dot(res.final_state));
    r.max_drift = res.max_norm_drift;
    if (r.max_drift > kShotNormTolerance) {
      std::ostringstream os;
      os << "norm drifted by " << r.max_drift;
      throw TraceDriftError(os.str());
    }
  } else {
    const StateVector psi0 = reference_initial_state();
    DensityObserver observe;
    if (options.record_curves)
      observe = [&](double t, const Operator& rho) {
        r.times.push_back(t);
        r.curve.push_back(fidelity_mixed(rho, target));
      };
    const auto res = evolve_lindblad(h, psi0 * psi0.adjoint(), options.decay, grid, observe);
    r.fidelity = fidelity_mixed(res.final_state, target);
    r.max_drift = res.max_trace_drift;
  }
}

}  // namespace

ShotResult run_shot(const SystemConfig& config, const TargetPulse& pulse, const ParityGate& gate,
                    const NoiseDraw& draw, const EnsembleOptions& options) {
  ShotResult r;
  r.draw = draw;
  const Hamiltonian h = make_hamiltonian(config, pulse, draw);
  const StateVector target = target_state(gate, reference_input());
  try {
    TimeGrid grid = make_time_grid(h, 0.0, pulse.duration, options.samples, options.max_step);
    for (int refinement = 0;; ++refinement) {
      try {
        integrate_shot(h, target, grid, options, r);
        break;
      } catch (const TraceDriftError&) {
        if (refinement == kMaxStepRefinements) throw;
        // Same recorded samples, half the step.
        grid.steps *= 2;
        grid.stride *= 2;
      }
    }
  } catch (const IntegrationError& e) {
    r.aborted = true;
    r.error = e.what();
  } catch (const StabilityError& e) {
    r.aborted = true;
    r.error = e.what();
  }
  return r;
}

int default_thread_count() {
  if (const char* env = std::getenv("PARITYGATE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EnsembleResult ensemble_average(const SystemConfig& config, const TargetPulse& pulse,
                                const NoiseSpec& spec, const ParityGate& gate,
                                const EnsembleOptions& options) {
  spec.validate();
  config.validate();
  pulse.validate();
  const int total = spec.shots;
  EnsembleResult result;
  result.seed = spec.seed;
  result.shots.resize(total);

  const int threads = std::clamp(options.threads > 0 ? options.threads : default_thread_count(), 1, total);
  std::atomic<int> next{0};
  std::mutex progress_mutex;
  int done = 0;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int i = next++; i < total; i = next++) {
      try {
        const auto shot = static_cast<std::uint64_t>(i);
        result.shots[i] = run_shot(config, pulse, gate, draw_noise(spec, config, shot), options);
        result.shots[i].shot = shot;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
        return;
      }
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(++done, total);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Reduction in shot order keeps the result independent of scheduling.
  double sum = 0.0;
  result.min = 1.0;
  result.max = 0.0;
  for (const auto& s : result.shots) {
    if (s.aborted) {
      ++result.aborted;
      continue;
    }
    ++result.completed;
    sum += s.fidelity;
    result.min = std::min(result.min, s.fidelity);
    result.max = std::max(result.max, s.fidelity);
  }
  if (result.aborted * 100 > total || result.completed == 0) {
    std::ostringstream os;
    os << result.aborted << " of " << total << " shots aborted (limit 1%)";
    for (const auto& s : result.shots)
      if (s.aborted) {
        os << "; first: shot " << s.shot << ": " << s.error;
        break;
      }
    throw EnsembleAborted(os.str());
  }
  result.mean = sum / result.completed;
  double ss = 0.0;
  for (const auto& s : result.shots)
    if (!s.aborted) ss += (s.fidelity - result.mean) * (s.fidelity - result.mean);
  result.stddev = result.completed > 1 ? std::sqrt(ss / (result.completed - 1)) : 0.0;
  return result;
}

}  // namespace paritygate
