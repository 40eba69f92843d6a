#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace paritygate {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Single-atom levels. The numeric value is the index inside the
// five-dimensional atomic space and is part of the CSV column contract.
enum class Level : int { g0 = 0, g1 = 1, m = 2, D = 3, P = 4 };

inline constexpr int kLevels = 5;
inline constexpr int kAtoms = 3;
inline constexpr int kDim = 125;  // kLevels^kAtoms

// Atom roles inside the register; the product basis is C1 (x) C2 (x) T3,
// C1-major.
inline constexpr int kControl1 = 0;
inline constexpr int kControl2 = 1;
inline constexpr int kTarget = 2;

using BasisLabel = std::array<Level, kAtoms>;

constexpr int level_index(Level l) { return static_cast<int>(l); }

constexpr int basis_index(Level a, Level b, Level c) {
  return level_index(a) * kLevels * kLevels + level_index(b) * kLevels +
         level_index(c);
}
constexpr int basis_index(const BasisLabel& label) {
  return basis_index(label[0], label[1], label[2]);
}
BasisLabel basis_label(int index);

// Level of `atom` inside product-basis state `index`.
constexpr int level_of(int index, int atom) {
  constexpr std::array<int, kAtoms> stride{kLevels * kLevels, kLevels, 1};
  return (index / stride[atom]) % kLevels;
}
// Same product state with `atom` moved to `level`.
constexpr int with_level(int index, int atom, int level) {
  constexpr std::array<int, kAtoms> stride{kLevels * kLevels, kLevels, 1};
  return index + (level - level_of(index, atom)) * stride[atom];
}

std::string_view level_name(Level l);
// "g0,g0,D" style label used in CSV headers.
std::string basis_name(int index);

// |to><from| on one five-level atom.
Operator transition(Level to, Level from);
Operator projector(Level l);

// I (x) ... (x) op (x) ... (x) I on the 125-dimensional register.
Operator embed(const Operator& single_atom, int atom);

// op_a on atom i and op_b on atom j (i != j), identity elsewhere.
Operator two_site(const Operator& op_a, const Operator& op_b, int i, int j);

StateVector basis_state(const BasisLabel& label);

// |<label|psi>|^2 or <label|rho|label>.
double expectation(const StateVector& psi, const BasisLabel& label);
double expectation(const Operator& rho, const BasisLabel& label);

// Largest singular value.
double spectral_norm(const Operator& op);

// Throws std::invalid_argument with `what` if the state is not a
// normalized 125-vector (tolerance on |norm^2 - 1|).
void check_state(const StateVector& psi, double tolerance = 1e-8);
// Hermitian, unit trace, eigenvalues above -tolerance_eig.
void check_density(const Operator& rho, double tolerance_trace = 1e-8,
                   double tolerance_eig = 1e-8);

}  // namespace paritygate
