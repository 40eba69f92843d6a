#include "paritygate/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace paritygate {

Hamiltonian::Hamiltonian(const Operator& static_part) : dim_(static_cast<int>(static_part.rows())) {
  if (static_part.rows() != static_part.cols())
    throw std::invalid_argument("Hamiltonian must be square");
  if ((static_part - static_part.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("static Hamiltonian must be Hermitian");
  add_entries(static_part, 0);
}

void Hamiltonian::add_static(const Operator& h) {
  if (h.rows() != dim_ || h.cols() != dim_)
    throw std::invalid_argument("static term dimension mismatch");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("static term must be Hermitian");
  add_entries(h, 0);
}

void Hamiltonian::add_drive(const Operator& raising, Coefficient f) {
  if (raising.rows() != dim_ || raising.cols() != dim_)
    throw std::invalid_argument("drive term dimension mismatch");
  if (raising.diagonal().cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("drive term must be off-diagonal");
  drives_.push_back(std::move(f));
  const int slot = 2 * static_cast<int>(drives_.size()) - 1;
  add_entries(raising, slot);
  add_entries(raising.adjoint(), slot + 1);
}

void Hamiltonian::add_entries(const Operator& op, int slot) {
  // Merge duplicates of (row, col, slot) so repeated additions stay compact.
  std::map<std::tuple<int, int, int>, Complex> merged;
  for (const auto& e : entries_) merged[{e.row, e.col, e.slot}] += e.weight;
  for (int c = 0; c < dim_; ++c)
    for (int r = 0; r < dim_; ++r)
      if (op(r, c) != Complex(0.0)) merged[{r, c, slot}] += op(r, c);
  entries_.clear();
  for (const auto& [key, w] : merged)
    if (w != Complex(0.0))
      entries_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w});
}

void Hamiltonian::entry_values(double t, std::vector<Complex>& values) const {
  std::vector<Complex> coef(2 * drives_.size() + 1);
  coef[0] = 1.0;
  for (std::size_t k = 0; k < drives_.size(); ++k) {
    const Complex f = drives_[k](t);
    coef[2 * k + 1] = f;
    coef[2 * k + 2] = std::conj(f);
  }
  values.resize(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i)
    values[i] = coef[entries_[i].slot] * entries_[i].weight;
}

Operator Hamiltonian::matrix(double t) const {
  std::vector<Complex> values;
  entry_values(t, values);
  Operator h = Operator::Zero(dim_, dim_);
  for (std::size_t i = 0; i < entries_.size(); ++i)
    h(entries_[i].row, entries_[i].col) += values[i];
  return h;
}

void Hamiltonian::apply(double t, const StateVector& x, StateVector& y) const {
  thread_local std::vector<Complex> values;
  entry_values(t, values);
  y.setZero(dim_);
  for (std::size_t i = 0; i < entries_.size(); ++i)
    y(entries_[i].row) += values[i] * x(entries_[i].col);
}

void Hamiltonian::apply_left(double t, const RowMatrix& rho, const Eigen::VectorXcd& extra_diagonal,
                             RowMatrix& out) const {
  thread_local std::vector<Complex> values;
  entry_values(t, values);
  out.resize(dim_, dim_);
  for (int r = 0; r < dim_; ++r) out.row(r) = extra_diagonal(r) * rho.row(r);
  for (std::size_t i = 0; i < entries_.size(); ++i)
    out.row(entries_[i].row) += values[i] * rho.row(entries_[i].col);
}

double Hamiltonian::max_norm(double t0, double t1, int samples,
                             const std::vector<double>& extra) const {
  std::vector<double> times = extra;
  for (int k = 0; k < samples; ++k)
    times.push_back(samples == 1 ? t0 : t0 + (t1 - t0) * k / (samples - 1));
  double best = 0.0;
  for (double t : times) {
    Eigen::SelfAdjointEigenSolver<Operator> es(matrix(t), Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return best;
}

}  // namespace paritygate
