#pragma once

#include <array>
#include <numbers>

#include "paritygate/gates.hpp"
#include "paritygate/hamiltonian.hpp"
#include "paritygate/hilbert.hpp"

namespace paritygate {

// Unit system: hbar = 1, angular frequencies in rad/us (so 2pi x 1 MHz is
// 2*pi), time in us, length in um. C3 in rad/us um^3, C6 in rad/us um^6.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double mhz(double f) { return kTwoPi * f; }       // 2pi x f MHz
constexpr double ghz_um(double f) { return kTwoPi * 1e3 * f; }  // 2pi x f GHz um^n
constexpr double to_mhz(double w) { return w / kTwoPi; }

struct SystemConfig {
  double omega_c = mhz(3.533);       // control Rabi frequency
  double detuning = mhz(86.0);       // Delta
  double c3 = ghz_um(13.0525);       // dipole-dipole C3
  double c6_d = ghz_um(1542.60);     // vdW C6 of |D>
  double c6_p = ghz_um(5486.82);     // vdW C6 of |P>
  double spacing = 5.334;            // d, target to each control
  double polar_angle = std::numbers::pi / 2;
  double duration = 3.0;             // tau
  Parity parity = Parity::Even;
  bool stark_compensation = true;
  bool include_vdw = true;

  // Throws std::invalid_argument on non-physical values.
  void validate() const;
};

struct TargetPulse {
  double omega_f = mhz(0.5069);  // envelope peak
  double alpha = 0.529;          // Gaussian width in units of T = tau/8
  double duration = 3.0;
  RotationSpec rotation;

  double segment() const { return duration / 8.0; }
  void validate() const;
};

// Position of atom pairs inside per-pair arrays.
enum Pair : int { kPair12 = 0, kPair13 = 1, kPair23 = 2 };
inline constexpr std::array<std::array<int, 2>, 3> kPairAtoms{{{0, 1}, {0, 2}, {1, 2}}};

using Vec3 = std::array<double, 3>;

struct GeometrySample {
  std::array<Vec3, kAtoms> displacement{};  // um
  std::array<double, 3> distance{};         // d12, d13, d23 (um)
  std::array<double, 3> dipole{};           // J12, J13, J23
  std::array<double, 3> vdw_d{};            // V^D_ij
  std::array<double, 3> vdw_p{};            // V^P_ij
};

// Laser beams, one per addressed ground level. For the control atoms the
// beam on g0 drives |0>-|D> (even) and C2's beams swap targets in odd mode.
enum Beam : int {
  kC1Ground0 = 0,
  kC1Ground1 = 1,
  kC2Ground0 = 2,
  kC2Ground1 = 3,
  kTargetOmega0 = 4,
  kTargetOmega1 = 5,
};
inline constexpr int kBeams = 6;

struct NoiseDraw {
  std::array<Vec3, kAtoms> displacement{};   // um
  std::array<double, kBeams> phase_offset{};  // rad
  std::array<double, kBeams> amplitude_error{};  // epsilon, beam scaled by (1 + eps)

  bool is_zero() const;
};

// J_ij = C3 (1 - 3 cos^2 Theta) / d^3.
double dipole_coupling(double c3, double polar_angle, double distance);
// V_ij = -C6 / d^6.
double vdw_coupling(double c6, double distance);
// Spacing that puts the nominal exchange J exactly on resonance with Delta.
double resonant_spacing(const SystemConfig& config);

// Two-segment Gaussian envelope Omega(t) on [0, tau].
double pulse_envelope(double t, const TargetPulse& pulse);
// phi_1(t): 0 on [0, tau/2), pi - gamma on [tau/2, tau].
double phase_schedule(double t, double gamma, double duration);
// Omega_0(t), Omega_1(t) with |Omega_0|/|Omega_1| = tan(theta/2) and
// phi = phi_1 - phi_0.
std::array<Complex, 2> target_amplitudes(double t, const TargetPulse& pulse);
// Trapezoidal-rule area of Omega(t) over [0, tau].
double envelope_area(const TargetPulse& pulse, int intervals = 20000);

GeometrySample geometry_from_displacements(const SystemConfig& config, const Vec3& d1,
                                           const Vec3& d2, const Vec3& d3);
GeometrySample nominal_geometry(const SystemConfig& config);

// Diagonal counter-terms for the second-order light shifts, evaluated at
// nominal geometry. `sample` only supplies the vdW strengths seen by the
// target's compensation beams, so pass nominal_geometry(config) for the
// calibrated setup.
Operator stark_compensation(const SystemConfig& config, const GeometrySample& sample);
// Diagonal entries of the target-atom compensation on |D> and |P>.
std::array<double, 2> target_stark_shifts(const SystemConfig& config,
                                          const GeometrySample& sample);

// Static part: exchange, vdW (if enabled) and Stark compensation (if
// enabled) for the given draw.
Operator static_hamiltonian(const SystemConfig& config, const NoiseDraw& draw);

// Full time-dependent Hamiltonian for one shot.
Hamiltonian make_hamiltonian(const SystemConfig& config, const TargetPulse& pulse,
                             const NoiseDraw& draw = {});
// Dense H(t) for one shot.
Operator build_hamiltonian(double t, const SystemConfig& config, const TargetPulse& pulse,
                           const NoiseDraw& draw = {});

// Total Rydberg excitation number (count of atoms in |D> or |P>).
Operator rydberg_number();

}  // namespace paritygate
