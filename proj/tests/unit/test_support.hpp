#pragma once

#include <random>

#include "paritygate/hilbert.hpp"

namespace testing_support {

inline paritygate::Operator random_operator(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  paritygate::Operator m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = {g(rng), g(rng)};
  return m;
}

inline paritygate::Operator random_hermitian(std::mt19937_64& rng, int n) {
  const paritygate::Operator a = random_operator(rng, n);
  return 0.5 * (a + a.adjoint());
}

// Kronecker product, used as an oracle independent of embed().
inline paritygate::Operator kron(const paritygate::Operator& a, const paritygate::Operator& b) {
  paritygate::Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace testing_support

#include "paritygate/model.hpp"

namespace testing_support {

// Default no-noise pulse with the PE-X rotation set.
inline paritygate::TargetPulse pe_x_pulse() {
  paritygate::TargetPulse p;
  p.rotation = paritygate::pe_x().rotation;
  return p;
}

}  // namespace testing_support
