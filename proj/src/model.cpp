#include "paritygate/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paritygate {

using namespace std::complex_literals;

void SystemConfig::validate() const {
  if (!(omega_c > 0)) throw std::invalid_argument("omega_c must be positive");
  if (!(detuning > 0)) throw std::invalid_argument("detuning must be positive");
  if (!(spacing > 0)) throw std::invalid_argument("spacing must be positive");
  if (!(duration > 0)) throw std::invalid_argument("duration must be positive");
  if (!std::isfinite(c3) || !std::isfinite(c6_d) || !std::isfinite(c6_p))
    throw std::invalid_argument("interaction constants must be finite");
}

void TargetPulse::validate() const {
  if (!(omega_f >= 0)) throw std::invalid_argument("omega_f must be non-negative");
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  if (!(duration > 0)) throw std::invalid_argument("pulse duration must be positive");
}

bool NoiseDraw::is_zero() const {
  for (const auto& v : displacement)
    for (double x : v)
      if (x != 0.0) return false;
  for (int b = 0; b < kBeams; ++b)
    if (phase_offset[b] != 0.0 || amplitude_error[b] != 0.0) return false;
  return true;
}

double dipole_coupling(double c3, double polar_angle, double distance) {
  if (!(distance > 0)) throw std::invalid_argument("interatomic distance must be positive");
  const double c = std::cos(polar_angle);
  return c3 * (1.0 - 3.0 * c * c) / (distance * distance * distance);
}

double vdw_coupling(double c6, double distance) {
  if (!(distance > 0)) throw std::invalid_argument("interatomic distance must be positive");
  return -c6 / std::pow(distance, 6);
}

double resonant_spacing(const SystemConfig& config) {
  const double c = std::cos(config.polar_angle);
  const double strength = config.c3 * (1.0 - 3.0 * c * c);
  if (!(strength / config.detuning > 0))
    throw std::invalid_argument("exchange sign cannot match the detuning");
  return std::cbrt(strength / config.detuning);
}

double pulse_envelope(double t, const TargetPulse& pulse) {
  const double tau = pulse.duration;
  if (t < 0.0 || t > tau) throw std::out_of_range("time outside the pulse window");
  const double T = pulse.segment();
  const double width2 = 2.0 * (pulse.alpha * T) * (pulse.alpha * T);
  // (exp(-x) - exp(-x0)) / (1 - exp(-x0)) written with expm1 so that very
  // wide pulses (alpha >> 1) keep full precision.
  const auto segment = [&](double center, double edge) {
    const double x = (t - center) * (t - center) / width2;
    const double x0 = (edge - center) * (edge - center) / width2;
    return pulse.omega_f * (-std::exp(-x) * std::expm1(x - x0)) / (-std::expm1(-x0));
  };
  if (t <= 4.0 * T) return std::max(0.0, segment(2.0 * T, 0.0));
  return std::max(0.0, segment(6.0 * T, tau / 2.0));
}

double phase_schedule(double t, double gamma, double duration) {
  return t < duration / 2.0 ? 0.0 : std::numbers::pi - gamma;
}

std::array<Complex, 2> target_amplitudes(double t, const TargetPulse& pulse) {
  const double omega = pulse_envelope(t, pulse);
  const auto& r = pulse.rotation;
  const double phase1 = phase_schedule(t, r.gamma, pulse.duration);
  const double phase0 = phase1 - r.phi;
  return {omega * std::sin(r.theta / 2) * std::exp(1i * phase0),
          omega * std::cos(r.theta / 2) * std::exp(1i * phase1)};
}

double envelope_area(const TargetPulse& pulse, int intervals) {
  const double h = pulse.duration / intervals;
  double sum = 0.5 * (pulse_envelope(0.0, pulse) + pulse_envelope(pulse.duration, pulse));
  for (int k = 1; k < intervals; ++k) sum += pulse_envelope(k * h, pulse);
  return sum * h;
}

GeometrySample geometry_from_displacements(const SystemConfig& config, const Vec3& d1,
                                           const Vec3& d2, const Vec3& d3) {
  const double d = config.spacing;
  const std::array<Vec3, kAtoms> centers{{{-d, 0, 0}, {d, 0, 0}, {0, 0, 0}}};
  GeometrySample s;
  s.displacement = {d1, d2, d3};
  std::array<Vec3, kAtoms> pos{};
  for (int a = 0; a < kAtoms; ++a)
    for (int k = 0; k < 3; ++k) pos[a][k] = centers[a][k] + s.displacement[a][k];
  for (int p = 0; p < 3; ++p) {
    const auto [i, j] = kPairAtoms[p];
    const double dx = pos[j][0] - pos[i][0], dy = pos[j][1] - pos[i][1],
                 dz = pos[j][2] - pos[i][2];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (!(r > 0)) throw std::invalid_argument("coincident atoms in geometry sample");
    s.distance[p] = r;
    s.dipole[p] = dipole_coupling(config.c3, config.polar_angle, r);
    s.vdw_d[p] = vdw_coupling(config.c6_d, r);
    s.vdw_p[p] = vdw_coupling(config.c6_p, r);
  }
  return s;
}

GeometrySample nominal_geometry(const SystemConfig& config) {
  return geometry_from_displacements(config, {}, {}, {});
}

std::array<double, 2> target_stark_shifts(const SystemConfig& config,
                                          const GeometrySample& sample) {
  const double oc2 = config.omega_c * config.omega_c;
  const double delta = config.detuning;
  const auto shift_d = [&](double v) {
    if (delta - v == 0.0) throw std::invalid_argument("detuning resonant with vdW shift");
    return oc2 / (delta - v);
  };
  const auto shift_p = [&](double v) {
    if (delta + v == 0.0) throw std::invalid_argument("detuning resonant with vdW shift");
    return oc2 / (delta + v);
  };
  const double base = 2.0 * oc2 / delta;
  // |D> of the target sits below the ground manifold like the blue-detuned
  // control levels, |P> above it; the counter-terms carry opposite signs.
  const double d_shift = shift_d(sample.vdw_d[kPair13]) + shift_d(sample.vdw_d[kPair23]) - base;
  const double p_shift = shift_p(sample.vdw_p[kPair13]) + shift_p(sample.vdw_p[kPair23]) - base;
  return {-d_shift, p_shift};
}

Operator stark_compensation(const SystemConfig& config, const GeometrySample& sample) {
  const double s = config.omega_c * config.omega_c / config.detuning;
  Eigen::Matrix<double, kLevels, 1> blue_ground0 = Eigen::Matrix<double, kLevels, 1>::Zero();
  blue_ground0(level_index(Level::g0)) = -s;  // |0> pushed up by a blue-detuned drive
  blue_ground0(level_index(Level::g1)) = s;   // |1> pushed down by a red-detuned drive
  Operator comp = embed(blue_ground0.cast<Complex>().asDiagonal().toDenseMatrix(), kControl1);
  const Eigen::Matrix<double, kLevels, 1> c2 =
      config.parity == Parity::Even ? blue_ground0 : Eigen::Matrix<double, kLevels, 1>(-blue_ground0);
  comp += embed(c2.cast<Complex>().asDiagonal().toDenseMatrix(), kControl2);
  const auto target = target_stark_shifts(config, sample);
  Operator t3 = Operator::Zero(kLevels, kLevels);
  t3(level_index(Level::D), level_index(Level::D)) = target[0];
  t3(level_index(Level::P), level_index(Level::P)) = target[1];
  comp += embed(t3, kTarget);
  return comp;
}

Operator rydberg_number() {
  Operator n = Operator::Zero(kDim, kDim);
  for (int a = 0; a < kAtoms; ++a)
    n += embed(projector(Level::D) + projector(Level::P), a);
  return n;
}

Operator static_hamiltonian(const SystemConfig& config, const NoiseDraw& draw) {
  config.validate();
  const GeometrySample geo = geometry_from_displacements(
      config, draw.displacement[0], draw.displacement[1], draw.displacement[2]);
  const Operator dp = transition(Level::D, Level::P);
  const Operator pd = transition(Level::P, Level::D);
  const Operator dd = projector(Level::D);
  const Operator pp = projector(Level::P);
  Operator h = Operator::Zero(kDim, kDim);
  for (int p = 0; p < 3; ++p) {
    const auto [i, j] = kPairAtoms[p];
    h += geo.dipole[p] * (two_site(dp, pd, i, j) + two_site(pd, dp, i, j));
    if (config.include_vdw)
      h += geo.vdw_d[p] * two_site(dd, dd, i, j) + geo.vdw_p[p] * two_site(pp, pp, i, j);
  }
  if (config.stark_compensation) {
    SystemConfig calibration = config;
    if (!config.include_vdw) calibration.c6_d = calibration.c6_p = 0.0;
    h += stark_compensation(config, nominal_geometry(calibration));
  }
  return h;
}

Hamiltonian make_hamiltonian(const SystemConfig& config, const TargetPulse& pulse,
                             const NoiseDraw& draw) {
  pulse.validate();
  Hamiltonian h(static_hamiltonian(config, draw));
  const double delta = config.detuning;
  const auto beam = [&](int b) {
    return (1.0 + draw.amplitude_error[b]) * std::exp(1i * draw.phase_offset[b]);
  };
  // Blue-detuned drives carry e^{-i Delta t}, red-detuned e^{+i Delta t}.
  const auto add_control = [&](int atom, Level ground, Level rydberg, int b) {
    const Complex amp = config.omega_c * beam(b);
    const double sign = rydberg == Level::D ? -1.0 : 1.0;
    h.add_drive(embed(transition(rydberg, ground), atom),
                [amp, sign, delta](double t) { return amp * std::exp(1i * (sign * delta * t)); });
  };
  add_control(kControl1, Level::g0, Level::D, kC1Ground0);
  add_control(kControl1, Level::g1, Level::P, kC1Ground1);
  if (config.parity == Parity::Even) {
    add_control(kControl2, Level::g0, Level::D, kC2Ground0);
    add_control(kControl2, Level::g1, Level::P, kC2Ground1);
  } else {
    add_control(kControl2, Level::g0, Level::P, kC2Ground0);
    add_control(kControl2, Level::g1, Level::D, kC2Ground1);
  }
  const Operator to_rydberg0 = embed(transition(Level::D, Level::g0) + transition(Level::P, Level::g0), kTarget);
  const Operator to_rydberg1 = embed(transition(Level::D, Level::g1) + transition(Level::P, Level::g1), kTarget);
  const Complex b0 = beam(kTargetOmega0), b1 = beam(kTargetOmega1);
  const double tau = pulse.duration;
  h.add_drive(to_rydberg0, [pulse, b0, tau](double t) {
    return b0 * target_amplitudes(std::clamp(t, 0.0, tau), pulse)[0];
  });
  h.add_drive(to_rydberg1, [pulse, b1, tau](double t) {
    return b1 * target_amplitudes(std::clamp(t, 0.0, tau), pulse)[1];
  });
  return h;
}

Operator build_hamiltonian(double t, const SystemConfig& config, const TargetPulse& pulse,
                           const NoiseDraw& draw) {
  if (t < 0.0 || t > pulse.duration) throw std::out_of_range("time outside the pulse window");
  return make_hamiltonian(config, pulse, draw).matrix(t);
}

}  // namespace paritygate
