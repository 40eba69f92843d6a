#pragma once

#include <functional>
#include <vector>

#include "paritygate/hilbert.hpp"

namespace paritygate {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Time-dependent Hermitian operator
//   H(t) = H_static + sum_k [ f_k(t) A_k + conj(f_k(t)) A_k^dagger ].
// Terms are given as dense matrices; their nonzero entries are compiled
// once into a flat list so that H(t) x and H(t) rho cost O(nnz).
class Hamiltonian {
 public:
  using Coefficient = std::function<Complex(double)>;

  explicit Hamiltonian(const Operator& static_part);

  // Adds f(t) A + conj(f(t)) A^dagger. A must not overlap its own adjoint
  // on the diagonal (pure raising/lowering operators).
  void add_drive(const Operator& raising, Coefficient f);
  // Adds an extra static Hermitian contribution.
  void add_static(const Operator& h);

  int dim() const { return dim_; }
  std::size_t nonzeros() const { return entries_.size(); }

  Operator matrix(double t) const;
  // y = H(t) x.
  void apply(double t, const StateVector& x, StateVector& y) const;
  // out = (H(t) + extra_diagonal) rho, row-major layout.
  void apply_left(double t, const RowMatrix& rho, const Eigen::VectorXcd& extra_diagonal,
                  RowMatrix& out) const;

  // Compiled nonzeros: H(t)(row, col) = sum over entries of coef(slot) * weight,
  // with coef(0) = 1, coef(2k+1) = f_k(t), coef(2k+2) = conj(f_k(t)).
  struct Entry {
    int row;
    int col;
    int slot;
    Complex weight;
  };
  const std::vector<Entry>& entries() const { return entries_; }
  // Value of every entry at time t, in entries() order.
  void entry_values(double t, std::vector<Complex>& values) const;

  // max_t ||H(t)|| over `samples` equispaced times in [t0, t1] plus `extra`
  // times; exact spectral norm at each sample.
  double max_norm(double t0, double t1, int samples,
                  const std::vector<double>& extra = {}) const;

 private:
  void add_entries(const Operator& op, int slot);

  int dim_;
  std::vector<Coefficient> drives_;
  std::vector<Entry> entries_;
  bool sorted_ = true;
};

}  // namespace paritygate
