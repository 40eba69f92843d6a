#include "paritygate/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace paritygate {

using namespace std::complex_literals;

std::string_view parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

Parity parse_parity(std::string_view name) {
  if (name == "even" || name == "Even" || name == "E") return Parity::Even;
  if (name == "odd" || name == "Odd" || name == "O") return Parity::Odd;
  throw std::invalid_argument("unknown parity '" + std::string(name) + "'");
}

std::array<double, 3> RotationSpec::axis() const {
  return {-std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

DressedPair dressed_pair(const RotationSpec& spec) {
  const double s = std::sin(spec.theta / 2), c = std::cos(spec.theta / 2);
  DressedPair pair;
  pair.bright << s * std::exp(1i * spec.phi), c;
  pair.dark << c, -s * std::exp(-1i * spec.phi);
  return pair;
}

Eigen::Matrix2cd single_qubit_unitary(const RotationSpec& spec) {
  const auto n = spec.axis();
  Eigen::Matrix2cd n_sigma;
  n_sigma << n[2], n[0] - 1i * n[1], n[0] + 1i * n[1], -n[2];
  const Eigen::Matrix2cd rot = std::cos(spec.gamma / 2) * Eigen::Matrix2cd::Identity() -
                               1i * std::sin(spec.gamma / 2) * n_sigma;
  return std::exp(0.5i * spec.gamma) * rot;
}

Eigen::Matrix2cd dressed_unitary(const RotationSpec& spec) {
  const auto pair = dressed_pair(spec);
  return pair.dark * pair.dark.adjoint() +
         std::exp(1i * spec.gamma) * pair.bright * pair.bright.adjoint();
}

bool ParityGate::acts_on(int c1, int c2) const {
  const bool even = (c1 == c2);
  return parity == Parity::Even ? even : !even;
}

ParityGate parity_gate(Parity parity, const RotationSpec& spec) {
  ParityGate gate;
  gate.parity = parity;
  gate.rotation = spec;
  gate.unitary.setZero();
  const Eigen::Matrix2cd u = single_qubit_unitary(spec);
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2) {
      const int base = 4 * c1 + 2 * c2;
      if (gate.acts_on(c1, c2))
        gate.unitary.block<2, 2>(base, base) = u;
      else
        gate.unitary.block<2, 2>(base, base).setIdentity();
    }
  return gate;
}

ParityGate pe_x() {
  return parity_gate(Parity::Even, {std::numbers::pi, std::numbers::pi / 2, std::numbers::pi});
}

ParityGate po_sqrt_x() {
  return parity_gate(Parity::Odd,
                     {std::numbers::pi / 2, std::numbers::pi / 2, std::numbers::pi});
}

int physical_index(int qubit_index) {
  if (qubit_index < 0 || qubit_index >= 8) throw std::out_of_range("qubit index");
  const auto lv = [](int bit) { return bit ? Level::g1 : Level::g0; };
  return basis_index(lv((qubit_index >> 2) & 1), lv((qubit_index >> 1) & 1),
                     lv(qubit_index & 1));
}

StateVector embed_qubit_state(const Eigen::Matrix<Complex, 8, 1>& qubits) {
  StateVector psi = StateVector::Zero(kDim);
  for (int q = 0; q < 8; ++q) psi(physical_index(q)) = qubits(q);
  return psi;
}

Eigen::Matrix<Complex, 8, 1> reference_input() {
  Eigen::Matrix<Complex, 8, 1> v = Eigen::Matrix<Complex, 8, 1>::Zero();
  for (int c = 0; c < 4; ++c) v(2 * c) = 0.5;
  return v;
}

StateVector reference_initial_state() { return embed_qubit_state(reference_input()); }

StateVector target_state(const ParityGate& gate, const Eigen::Matrix<Complex, 8, 1>& input) {
  return embed_qubit_state(gate.unitary * input);
}

double fidelity_pure(const StateVector& psi_t, const Eigen::Matrix<Complex, 8, 1>& psi0,
                     const ParityGate& gate) {
  if (psi_t.size() != kDim) throw std::invalid_argument("state must have dimension 125");
  return std::norm(target_state(gate, psi0).dot(psi_t));
}

double fidelity_mixed(const Operator& rho, const StateVector& target) {
  if (rho.rows() != target.size() || rho.cols() != target.size())
    throw std::invalid_argument("density matrix and target dimensions differ");
  return std::clamp((target.adjoint() * rho * target)(0, 0).real(), 0.0, 1.0);
}

double phase_insensitive_overlap(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix shapes differ");
  return std::abs((a.adjoint() * b).trace()) / static_cast<double>(a.rows());
}

}  // namespace paritygate
