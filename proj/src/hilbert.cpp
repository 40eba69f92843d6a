#include "paritygate/hilbert.hpp"

#include <cmath>
#include <stdexcept>

namespace paritygate {

namespace {

void require_single_atom(const Operator& op) {
  if (op.rows() != kLevels || op.cols() != kLevels)
    throw std::invalid_argument("single-atom operator must be 5x5");
}

void require_atom(int atom) {
  if (atom < 0 || atom >= kAtoms)
    throw std::invalid_argument("atom index must be 0, 1 or 2");
}

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

BasisLabel basis_label(int index) {
  if (index < 0 || index >= kDim)
    throw std::out_of_range("basis index out of range");
  return {static_cast<Level>(level_of(index, 0)),
          static_cast<Level>(level_of(index, 1)),
          static_cast<Level>(level_of(index, 2))};
}

std::string_view level_name(Level l) {
  switch (l) {
    case Level::g0: return "g0";
    case Level::g1: return "g1";
    case Level::m: return "m";
    case Level::D: return "D";
    case Level::P: return "P";
  }
  return "?";
}

std::string basis_name(int index) {
  const auto label = basis_label(index);
  std::string out;
  for (int a = 0; a < kAtoms; ++a) {
    if (a) out += ',';
    out += level_name(label[a]);
  }
  return out;
}

Operator transition(Level to, Level from) {
  Operator op = Operator::Zero(kLevels, kLevels);
  op(level_index(to), level_index(from)) = 1.0;
  return op;
}

Operator projector(Level l) { return transition(l, l); }

Operator embed(const Operator& single_atom, int atom) {
  require_single_atom(single_atom);
  require_atom(atom);
  const Operator id = Operator::Identity(kLevels, kLevels);
  std::array<const Operator*, kAtoms> factors{&id, &id, &id};
  factors[atom] = &single_atom;
  return kron(kron(*factors[0], *factors[1]), *factors[2]);
}

Operator two_site(const Operator& op_a, const Operator& op_b, int i, int j) {
  require_single_atom(op_a);
  require_single_atom(op_b);
  require_atom(i);
  require_atom(j);
  if (i == j) throw std::invalid_argument("two_site requires distinct atoms");
  const Operator id = Operator::Identity(kLevels, kLevels);
  std::array<const Operator*, kAtoms> factors{&id, &id, &id};
  factors[i] = &op_a;
  factors[j] = &op_b;
  return kron(kron(*factors[0], *factors[1]), *factors[2]);
}

StateVector basis_state(const BasisLabel& label) {
  StateVector psi = StateVector::Zero(kDim);
  psi(basis_index(label)) = 1.0;
  return psi;
}

double expectation(const StateVector& psi, const BasisLabel& label) {
  if (psi.size() != kDim) throw std::invalid_argument("state must have dimension 125");
  return std::norm(psi(basis_index(label)));
}

double expectation(const Operator& rho, const BasisLabel& label) {
  if (rho.rows() != kDim || rho.cols() != kDim)
    throw std::invalid_argument("density matrix must be 125x125");
  const int k = basis_index(label);
  return rho(k, k).real();
}

double spectral_norm(const Operator& op) {
  if (op.size() == 0) return 0.0;
  Eigen::JacobiSVD<Operator> svd(op);
  return svd.singularValues()(0);
}

void check_state(const StateVector& psi, double tolerance) {
  if (psi.size() != kDim) throw std::invalid_argument("state must have dimension 125");
  if (std::abs(psi.squaredNorm() - 1.0) > tolerance)
    throw std::invalid_argument("state is not normalized");
}

void check_density(const Operator& rho, double tolerance_trace, double tolerance_eig) {
  if (rho.rows() != kDim || rho.cols() != kDim)
    throw std::invalid_argument("density matrix must be 125x125");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > tolerance_trace)
    throw std::invalid_argument("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Operator> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tolerance_eig)
    throw std::invalid_argument("density matrix has negative eigenvalues");
}

}  // namespace paritygate
