#pragma once

#include <array>
#include <string_view>

#include "paritygate/hilbert.hpp"

namespace paritygate {

enum class Parity { Even, Odd };

std::string_view parity_name(Parity p);
Parity parse_parity(std::string_view name);

// Rotation U(gamma, theta, phi) = |d><d| + e^{i gamma} |b><b| on the target.
struct RotationSpec {
  double gamma = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  // n = (-sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)).
  std::array<double, 3> axis() const;
};

// Bright |b> = sin(theta/2) e^{i phi}|0> + cos(theta/2)|1>, dark |d> orthogonal.
struct DressedPair {
  Eigen::Vector2cd bright;
  Eigen::Vector2cd dark;
};
DressedPair dressed_pair(const RotationSpec& spec);

// exp(i gamma/2) exp(-i gamma/2 n.sigma), evaluated in closed form.
Eigen::Matrix2cd single_qubit_unitary(const RotationSpec& spec);
// |d><d| + e^{i gamma}|b><b|, the dressed-basis route to the same matrix.
Eigen::Matrix2cd dressed_unitary(const RotationSpec& spec);

// Three-qubit parity-controlled gate on |c1 c2 t>, index 4*c1 + 2*c2 + t.
struct ParityGate {
  Parity parity = Parity::Even;
  RotationSpec rotation;
  Eigen::Matrix<Complex, 8, 8> unitary;

  // True when the rotation acts for control bits (c1, c2).
  bool acts_on(int c1, int c2) const;
};
ParityGate parity_gate(Parity parity, const RotationSpec& spec);

// The two gates used throughout: PE-X = U_E(pi, pi/2, pi) and
// PO-sqrtX = U_O(pi/2, pi/2, pi).
ParityGate pe_x();
ParityGate po_sqrt_x();

// Qubit index (4*c1 + 2*c2 + t) -> 125-dim product index with g0/g1 levels.
int physical_index(int qubit_index);
// Embeds an 8-dim qubit state into the 125-dim register (zeros elsewhere).
StateVector embed_qubit_state(const Eigen::Matrix<Complex, 8, 1>& qubits);

// (|00> + |01> + |10> + |11>)/2 (x) |0>, the fixed input state.
Eigen::Matrix<Complex, 8, 1> reference_input();
StateVector reference_initial_state();

// Embedded U|psi0> for a qubit-subspace input.
StateVector target_state(const ParityGate& gate,
                         const Eigen::Matrix<Complex, 8, 1>& input);

// |<target|psi_t>|^2 where target = U psi0 embedded in the 125-dim space.
double fidelity_pure(const StateVector& psi_t,
                     const Eigen::Matrix<Complex, 8, 1>& psi0,
                     const ParityGate& gate);
// <target|rho|target>.
double fidelity_mixed(const Operator& rho, const StateVector& target);

// |tr(A^dagger B)| / n; equals 1 iff A and B agree up to a global phase
// (for unitary A, B).
double phase_insensitive_overlap(const Eigen::MatrixXcd& a,
                                 const Eigen::MatrixXcd& b);

}  // namespace paritygate
