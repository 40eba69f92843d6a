#include "paritygate/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace paritygate {

using namespace std::complex_literals;

Operator JumpOperator::matrix() const {
  return std::sqrt(rate) * embed(transition(to, from), atom);
}

DecayModel DecayModel::none() {
  DecayModel d;
  d.gamma_d = d.gamma_p = 0.0;
  return d;
}

void DecayModel::validate() const {
  if (gamma_d < 0 || gamma_p < 0) throw std::invalid_argument("decay rates must be non-negative");
  if (branch_m < 0 || branch_g0 < 0 || branch_g1 < 0)
    throw std::invalid_argument("branching ratios must be non-negative");
  if (std::abs(branch_m + branch_g0 + branch_g1 - 1.0) > 1e-12)
    throw std::invalid_argument("branching ratios must sum to 1");
}

std::vector<JumpOperator> DecayModel::jump_operators() const {
  validate();
  std::vector<JumpOperator> out;
  const std::array<std::pair<Level, double>, 2> sources{{{Level::D, gamma_d}, {Level::P, gamma_p}}};
  const std::array<std::pair<Level, double>, 3> sinks{
      {{Level::m, branch_m}, {Level::g0, branch_g0}, {Level::g1, branch_g1}}};
  for (int atom = 0; atom < kAtoms; ++atom)
    for (const auto& [from, gamma] : sources)
      for (const auto& [to, branch] : sinks) out.push_back({atom, to, from, branch * gamma});
  return out;
}

double TimeGrid::time(int step) const {
  if (step >= steps) return t1;
  return t0 + (t1 - t0) * static_cast<double>(step) / steps;
}

StabilityError::StabilityError(double dt, double required_dt)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "time step " << dt << " us violates the stability contract; required dt <= "
           << required_dt << " us";
        return os.str();
      }()),
      dt_(dt),
      required_dt_(required_dt) {}

double max_hamiltonian_norm(const Hamiltonian& h, double t0, double t1) {
  // Quarter points catch the peaks of the two-segment envelope.
  const double span = t1 - t0;
  return h.max_norm(t0, t1, 17, {t0 + span / 4, t0 + 3 * span / 4});
}

namespace {

int stride_for(int steps, int samples) {
  if (samples <= 1) return steps;
  return std::max(1, steps / (samples - 1));
}

}  // namespace

TimeGrid make_time_grid(const Hamiltonian& h, double t0, double t1, int samples, double max_step) {
  if (!(t1 > t0)) throw std::invalid_argument("time grid needs t1 > t0");
  const double norm = max_hamiltonian_norm(h, t0, t1);
  double dt = max_step;
  if (norm > 0) dt = std::min(dt, kStabilityLimit / norm);
  TimeGrid grid;
  grid.t0 = t0;
  grid.t1 = t1;
  grid.steps = static_cast<int>(std::ceil((t1 - t0) / dt * (1.0 + 1e-12)));
  grid.stride = stride_for(grid.steps, samples);
  return grid;
}

TimeGrid fixed_time_grid(const Hamiltonian& h, double t0, double t1, double dt, int samples) {
  if (!(t1 > t0) || !(dt > 0)) throw std::invalid_argument("invalid time grid");
  TimeGrid grid;
  grid.t0 = t0;
  grid.t1 = t1;
  grid.steps = std::max(1, static_cast<int>(std::lround((t1 - t0) / dt)));
  grid.stride = stride_for(grid.steps, samples);
  check_stability(h, grid);
  return grid;
}

void check_stability(const Hamiltonian& h, const TimeGrid& grid) {
  const double norm = max_hamiltonian_norm(h, grid.t0, grid.t1);
  if (grid.dt() * norm > kStabilityLimit * (1.0 + 1e-9))
    throw StabilityError(grid.dt(), kStabilityLimit / norm);
}

namespace {

bool record_step(const TimeGrid& grid, int step) {
  return step == 0 || step == grid.steps || step % grid.stride == 0;
}

}  // namespace

SchrodingerResult evolve_schrodinger(const Hamiltonian& h, const StateVector& psi0,
                                     const TimeGrid& grid, const StateObserver& observe) {
  if (psi0.size() != h.dim()) throw std::invalid_argument("state dimension mismatch");
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-10)
    throw std::invalid_argument("initial state must be normalized");
  if (grid.steps <= 0) throw std::invalid_argument("time grid has no steps");

  SchrodingerResult result;
  result.steps = grid.steps;
  result.dt = grid.dt();
  const double dt = grid.dt();
  const int n = h.dim();
  StateVector psi = psi0, k1(n), k2(n), k3(n), k4(n), tmp(n);

  const auto record = [&](double t) {
    result.times.push_back(t);
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(psi.squaredNorm() - 1.0));
    if (observe) observe(t, psi);
  };
  record(grid.t0);
  for (int step = 0; step < grid.steps; ++step) {
    const double t = grid.time(step);
    const double tm = t + 0.5 * dt;
    const double te = grid.time(step + 1);
    h.apply(t, psi, k1);
    k1 *= -1i;
    tmp = psi + (0.5 * dt) * k1;
    h.apply(tm, tmp, k2);
    k2 *= -1i;
    tmp = psi + (0.5 * dt) * k2;
    h.apply(tm, tmp, k3);
    k3 *= -1i;
    tmp = psi + dt * k3;
    h.apply(te, tmp, k4);
    k4 *= -1i;
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (record_step(grid, step + 1)) record(te);
  }
  result.final_state = psi;
  return result;
}

namespace {

// Right-hand side of the master equation with the anticommutator folded into
// a non-Hermitian effective Hamiltonian H - i Gamma/2.
class LindbladRhs {
 public:
  LindbladRhs(const Hamiltonian& h, const DecayModel& decay) : h_(h) {
    gamma_half_ = Eigen::VectorXcd::Zero(kDim);
    for (const auto& jump : decay.jump_operators()) {
      if (jump.rate == 0.0) continue;
      Term term{jump.rate, {}, {}};
      for (int a = 0; a < kDim; ++a) {
        if (level_of(a, jump.atom) == level_index(jump.from))
          gamma_half_(a) += Complex(0.0, -0.5 * jump.rate);
        if (level_of(a, jump.atom) == level_index(jump.to)) {
          term.sink.push_back(a);
          term.source.push_back(with_level(a, jump.atom, level_index(jump.from)));
        }
      }
      terms_.push_back(std::move(term));
    }
  }

  void operator()(double t, const RowMatrix& rho, RowMatrix& out) {
    h_.apply_left(t, rho, gamma_half_, m_);
    out = -1i * m_ + 1i * m_.adjoint();
    for (const auto& term : terms_) {
      const std::size_t n = term.sink.size();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          out(term.sink[i], term.sink[j]) += term.rate * rho(term.source[i], term.source[j]);
    }
  }

 private:
  struct Term {
    double rate;
    std::vector<int> sink;
    std::vector<int> source;
  };
  const Hamiltonian& h_;
  Eigen::VectorXcd gamma_half_;
  std::vector<Term> terms_;
  RowMatrix m_;
};

// The Hamiltonian never touches |m>, and jumps only move population into
// |m>, so a density matrix without coherences between different "atoms in
// |m>" patterns keeps that block structure exactly. The blocked right-hand
// side works on the 8 diagonal blocks (64 + 3*16 + 3*4 + 1 states).
class BlockedLindbladRhs {
 public:
  static constexpr int kSectors = 1 << kAtoms;

  BlockedLindbladRhs(const Hamiltonian& h, const DecayModel& decay) {
    for (int a = 0; a < kDim; ++a) {
      const int s = sector_of(a);
      local_[a] = static_cast<int>(members_[s].size());
      members_[s].push_back(a);
    }
    for (int s = 0; s < kSectors; ++s) gamma_half_[s] = Eigen::VectorXcd::Zero(size(s));
    for (const auto& jump : decay.jump_operators()) {
      if (jump.rate == 0.0) continue;
      for (int s = 0; s < kSectors; ++s) {
        if (s & (1 << jump.atom)) continue;  // atom already in |m>: L acts as zero
        Term term{jump.rate, s, 0, {}, {}};
        for (int a : members_[s]) {
          if (level_of(a, jump.atom) != level_index(jump.from)) continue;
          gamma_half_[s](local_[a]) += Complex(0.0, -0.5 * jump.rate);
          const int b = with_level(a, jump.atom, level_index(jump.to));
          term.sink_sector = sector_of(b);
          term.sink.push_back(local_[b]);
          term.source.push_back(local_[a]);
        }
        if (!term.sink.empty()) terms_.push_back(std::move(term));
      }
    }
    h_ = &h;
    const auto& entries = h.entries();
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const int s = sector_of(entries[k].row);
      if (s != sector_of(entries[k].col))
        throw std::logic_error("Hamiltonian couples different |m> sectors");
      entries_[s].push_back({local_[entries[k].row], local_[entries[k].col], k});
    }
  }

  static int sector_of(int a) {
    int s = 0;
    for (int atom = 0; atom < kAtoms; ++atom)
      if (level_of(a, atom) == level_index(Level::m)) s |= 1 << atom;
    return s;
  }
  int size(int s) const { return static_cast<int>(members_[s].size()); }
  const std::vector<int>& members(int s) const { return members_[s]; }

  using Blocks = std::array<RowMatrix, kSectors>;

  Blocks split(const Operator& rho) const {
    Blocks out;
    for (int s = 0; s < kSectors; ++s) {
      out[s].resize(size(s), size(s));
      for (int i = 0; i < size(s); ++i)
        for (int j = 0; j < size(s); ++j) out[s](i, j) = rho(members_[s][i], members_[s][j]);
    }
    return out;
  }

  void merge(const Blocks& blocks, Operator& rho) const {
    rho.setZero(kDim, kDim);
    for (int s = 0; s < kSectors; ++s)
      for (int i = 0; i < size(s); ++i)
        for (int j = 0; j < size(s); ++j) rho(members_[s][i], members_[s][j]) = blocks[s](i, j);
  }

  // Entry values for the current stage time; consecutive stages share t.
  void prepare(double t) {
    if (t == prepared_time_) return;
    prepared_time_ = t;
    h_->entry_values(t, values_);
  }

  void operator()(double t, const Blocks& rho, Blocks& out) {
    prepare(t);
    for (int s = 0; s < kSectors; ++s) {
      RowMatrix& m = m_[s];
      m.resize(size(s), size(s));
      for (int r = 0; r < size(s); ++r) m.row(r) = gamma_half_[s](r) * rho[s].row(r);
      for (const auto& e : entries_[s]) m.row(e.row) += values_[e.index] * rho[s].row(e.col);
      out[s] = -1i * m + 1i * m.adjoint();
    }
    for (const auto& term : terms_) {
      const RowMatrix& src = rho[term.source_sector];
      RowMatrix& dst = out[term.sink_sector];
      const std::size_t n = term.sink.size();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          dst(term.sink[i], term.sink[j]) += term.rate * src(term.source[i], term.source[j]);
    }
  }

 private:
  struct Term {
    double rate;
    int source_sector;
    int sink_sector;
    std::vector<int> sink;
    std::vector<int> source;
  };
  struct Entry {
    int row;
    int col;
    std::size_t index;
  };
  const Hamiltonian* h_ = nullptr;
  std::array<std::vector<int>, kSectors> members_;
  std::array<int, kDim> local_{};
  std::array<Eigen::VectorXcd, kSectors> gamma_half_;
  std::array<std::vector<Entry>, kSectors> entries_;
  std::vector<Term> terms_;
  std::vector<Complex> values_;
  Blocks m_;
  double prepared_time_ = -1.0;
};

bool is_sector_block_diagonal(const Operator& rho) {
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      if (rho(a, b) != Complex(0.0) &&
          BlockedLindbladRhs::sector_of(a) != BlockedLindbladRhs::sector_of(b))
        return false;
  return true;
}

}  // namespace

namespace {

using Blocks = BlockedLindbladRhs::Blocks;

void axpy(RowMatrix& out, const RowMatrix& x, double c, const RowMatrix& k) { out = x + c * k; }
void axpy(Blocks& out, const Blocks& x, double c, const Blocks& k) {
  for (std::size_t s = 0; s < x.size(); ++s) out[s] = x[s] + c * k[s];
}
void rk4_update(RowMatrix& x, double c, const RowMatrix& k1, const RowMatrix& k2,
                const RowMatrix& k3, const RowMatrix& k4) {
  x += c * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}
void rk4_update(Blocks& x, double c, const Blocks& k1, const Blocks& k2, const Blocks& k3,
                const Blocks& k4) {
  for (std::size_t s = 0; s < x.size(); ++s) x[s] += c * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]);
}
// Returns the anti-Hermitian residue before symmetrizing in place.
double hermitize(RowMatrix& x, RowMatrix& scratch) {
  const double err = (x - x.adjoint()).cwiseAbs().maxCoeff();
  scratch = 0.5 * (x + x.adjoint());
  x.swap(scratch);
  return err;
}
double hermitize(Blocks& x, Blocks& scratch) {
  double err = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s) err = std::max(err, hermitize(x[s], scratch[s]));
  return err;
}
Complex trace_of(const RowMatrix& x) { return x.trace(); }
Complex trace_of(const Blocks& x) {
  Complex tr = 0.0;
  for (const auto& b : x) tr += b.trace();
  return tr;
}

template <class State, class Rhs, class ToDense>
LindbladResult run_rk4(Rhs& rhs, State rho, const TimeGrid& grid, ToDense to_dense,
                       const DensityObserver& observe, const LindbladOptions& options) {
  LindbladResult result;
  result.steps = grid.steps;
  result.dt = grid.dt();
  const double dt = grid.dt();
  State k1 = rho, k2 = rho, k3 = rho, k4 = rho, tmp = rho;
  Operator dense;

  const int recorded = grid.steps / grid.stride + 2;
  const int check_every = std::max(1, recorded / std::max(1, options.positivity_checks));
  int record_count = 0;
  const auto record = [&](double t, bool last) {
    result.times.push_back(t);
    const double drift = std::abs(trace_of(rho) - Complex(1.0));
    result.max_trace_drift = std::max(result.max_trace_drift, drift);
    if (drift > options.trace_tolerance) {
      std::ostringstream os;
      os << "trace drifted by " << drift << " at t = " << t << " us";
      throw TraceDriftError(os.str());
    }
    const bool check = last || record_count % check_every == 0;
    ++record_count;
    if (!observe && !check) return;
    to_dense(rho, dense);
    if (observe) observe(t, dense);
    if (check) {
      Eigen::SelfAdjointEigenSolver<Operator> es(dense, Eigen::EigenvaluesOnly);
      result.min_eigenvalue = std::min(result.min_eigenvalue, es.eigenvalues().minCoeff());
      if (result.min_eigenvalue < -options.positivity_tolerance) {
        std::ostringstream os;
        os << "density matrix eigenvalue " << result.min_eigenvalue << " at t = " << t << " us";
        throw PositivityError(os.str());
      }
    }
  };
  record(grid.t0, false);
  for (int step = 0; step < grid.steps; ++step) {
    const double t = grid.time(step);
    const double tm = t + 0.5 * dt;
    const double te = grid.time(step + 1);
    rhs(t, rho, k1);
    axpy(tmp, rho, 0.5 * dt, k1);
    rhs(tm, tmp, k2);
    axpy(tmp, rho, 0.5 * dt, k2);
    rhs(tm, tmp, k3);
    axpy(tmp, rho, dt, k3);
    rhs(te, tmp, k4);
    rk4_update(rho, dt / 6.0, k1, k2, k3, k4);
    result.max_hermiticity_error = std::max(result.max_hermiticity_error, hermitize(rho, tmp));
    if (record_step(grid, step + 1)) record(te, step + 1 == grid.steps);
  }
  to_dense(rho, dense);
  result.final_state = dense;
  return result;
}

}  // namespace

LindbladResult evolve_lindblad(const Hamiltonian& h, const Operator& rho0, const DecayModel& decay,
                               const TimeGrid& grid, const DensityObserver& observe,
                               const LindbladOptions& options) {
  if (h.dim() != kDim) throw std::invalid_argument("Lindblad evolution needs the 125-dim register");
  check_density(rho0, 1e-10, 1e-10);
  if (grid.steps <= 0) throw std::invalid_argument("time grid has no steps");
  decay.validate();

  if (options.sector_blocking && is_sector_block_diagonal(rho0)) {
    BlockedLindbladRhs rhs(h, decay);
    const auto to_dense = [&rhs](const Blocks& b, Operator& out) { rhs.merge(b, out); };
    return run_rk4(rhs, rhs.split(rho0), grid, to_dense, observe, options);
  }
  LindbladRhs rhs(h, decay);
  const auto to_dense = [](const RowMatrix& r, Operator& out) { out = r; };
  return run_rk4(rhs, RowMatrix(rho0), grid, to_dense, observe, options);
}

}  // namespace paritygate
