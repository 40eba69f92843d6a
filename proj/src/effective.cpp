#include "paritygate/effective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paritygate {

using namespace std::complex_literals;

std::string_view exchange_block_name(ExchangeBlock b) {
  switch (b) {
    case ExchangeBlock::k1A: return "1A";
    case ExchangeBlock::k1B: return "1B";
    case ExchangeBlock::k2A: return "2A";
    case ExchangeBlock::k2B: return "2B";
    case ExchangeBlock::k2C: return "2C";
  }
  return "?";
}

ExchangeBlock parse_exchange_block(std::string_view name) {
  for (auto b : kExchangeBlocks)
    if (exchange_block_name(b) == name) return b;
  throw std::invalid_argument("unknown exchange block '" + std::string(name) + "'");
}

namespace {

using L = Level;

// Eigenpairs of [[0, j12, j], [j12, 0, j], [j, j, 0]].
void three_level_exchange(double j, double j12, SpectralBlock& out) {
  const double root = std::sqrt(8.0 * j * j + j12 * j12);
  const double e2 = 0.5 * (j12 - root);
  const double e3 = 0.5 * (j12 + root);
  out.eigenvalues = Eigen::Vector3d(-j12, e2, e3);
  out.eigenvectors.resize(3, 3);
  out.eigenvectors.col(0) = Eigen::Vector3d(-1.0, 1.0, 0.0) / std::sqrt(2.0);
  for (int k = 1; k < 3; ++k) {
    const double e = out.eigenvalues(k);
    const double n = std::sqrt(2.0 * e * e + 4.0 * j * j);
    out.eigenvectors.col(k) = Eigen::Vector3d(e, e, 2.0 * j) / n;
  }
}

void two_level_exchange(double coupling, SpectralBlock& out) {
  out.eigenvalues = Eigen::Vector2d(-coupling, coupling);
  out.eigenvectors.resize(2, 2);
  out.eigenvectors << -1.0, 1.0, 1.0, 1.0;
  out.eigenvectors /= std::sqrt(2.0);
}

}  // namespace

SpectralBlock dd_block_spectrum(double j, double j12, ExchangeBlock block, Level idle) {
  if (!(j > 0)) throw std::invalid_argument("exchange strength J must be positive");
  if (idle == L::D || idle == L::P) throw std::invalid_argument("spectator must be a ground level");
  SpectralBlock out;
  out.id = std::string(exchange_block_name(block));
  switch (block) {
    case ExchangeBlock::k1A:
      out.basis = {basis_index(L::D, L::P, L::D), basis_index(L::P, L::D, L::D),
                   basis_index(L::D, L::D, L::P)};
      three_level_exchange(j, j12, out);
      break;
    case ExchangeBlock::k1B:
      out.basis = {basis_index(L::D, L::P, L::P), basis_index(L::P, L::D, L::P),
                   basis_index(L::P, L::P, L::D)};
      three_level_exchange(j, j12, out);
      break;
    case ExchangeBlock::k2A:
      out.basis = {basis_index(L::D, idle, L::P), basis_index(L::P, idle, L::D)};
      two_level_exchange(j, out);
      break;
    case ExchangeBlock::k2B:
      out.basis = {basis_index(idle, L::D, L::P), basis_index(idle, L::P, L::D)};
      two_level_exchange(j, out);
      break;
    case ExchangeBlock::k2C:
      out.basis = {basis_index(L::D, L::P, idle), basis_index(L::P, L::D, idle)};
      two_level_exchange(j12, out);
      break;
  }
  return out;
}

Eigen::MatrixXcd restrict_to(const Operator& op, const std::vector<int>& basis) {
  const int n = static_cast<int>(basis.size());
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = op(basis[r], basis[c]);
  return m;
}

double eigen_residual(const Operator& op, const SpectralBlock& block) {
  const Eigen::MatrixXcd m = restrict_to(op, block.basis);
  double worst = 0.0;
  for (int k = 0; k < block.eigenvalues.size(); ++k) {
    const Eigen::VectorXcd v = block.eigenvectors.col(k).cast<Complex>();
    worst = std::max(worst, (m * v - block.eigenvalues(k) * v).norm());
  }
  return worst;
}

Operator exchange_operator(double j, double j12) {
  const Operator dp = transition(L::D, L::P);
  const Operator pd = transition(L::P, L::D);
  const std::array<double, 3> coupling{j12, j, j};  // pairs 12, 13, 23
  Operator h = Operator::Zero(kDim, kDim);
  for (int p = 0; p < 3; ++p) {
    const auto [a, b] = kPairAtoms[p];
    h += coupling[p] * (two_site(dp, pd, a, b) + two_site(pd, dp, a, b));
  }
  return h;
}

namespace {

DressingBlock dressing(double coupling, double omega_c) {
  if (!(omega_c > 0)) throw std::invalid_argument("Omega_c must be positive");
  DressingBlock b;
  b.coupling << 0, coupling, 0, coupling, 0, coupling, 0, coupling, 0;
  const double split = std::sqrt(2.0) * coupling;
  b.eigenvalues << 0.0, -split, split;
  const double r2 = std::sqrt(2.0);
  b.eigenvectors.col(0) = Eigen::Vector3d(-1.0, 0.0, 1.0) / r2;
  b.eigenvectors.col(1) = Eigen::Vector3d(1.0, -r2, 1.0) / 2.0;
  b.eigenvectors.col(2) = Eigen::Vector3d(1.0, r2, 1.0) / 2.0;
  return b;
}

}  // namespace

DressingBlock omega_c_block_spectrum(double omega_c) { return dressing(omega_c, omega_c); }

DressingBlock omega_c_dressed_block(double omega_c) {
  return dressing(omega_c / std::sqrt(2.0), omega_c);
}

std::array<int, 2> active_patterns(Parity parity) {
  return parity == Parity::Even ? std::array<int, 2>{0, 3} : std::array<int, 2>{1, 2};
}

namespace {

// |R_k><pattern_k, ground| for both active patterns.
Operator effective_raising(Parity parity, int ground) {
  Operator a = Operator::Zero(kEffectiveDim, kEffectiveDim);
  const auto patterns = active_patterns(parity);
  for (int k = 0; k < 2; ++k) a(8 + k, 2 * patterns[k] + ground) = 1.0;
  return a;
}

Operator hermitian_exp(const Operator& h, double scale) {
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const Eigen::VectorXcd phases =
      (es.eigenvalues() * (-scale)).unaryExpr([](double x) { return std::exp(Complex(0.0, x)); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

Operator effective_hamiltonian(double t, const TargetPulse& pulse, Parity parity) {
  const auto amp = target_amplitudes(t, pulse);
  const Operator r0 = effective_raising(parity, 0);
  const Operator r1 = effective_raising(parity, 1);
  const Operator up = amp[0] * r0 + amp[1] * r1;
  return up + up.adjoint();
}

Hamiltonian make_effective_hamiltonian(const TargetPulse& pulse, Parity parity) {
  pulse.validate();
  Hamiltonian h(Operator::Zero(kEffectiveDim, kEffectiveDim));
  const double tau = pulse.duration;
  for (int g = 0; g < 2; ++g)
    h.add_drive(effective_raising(parity, g), [pulse, tau, g](double t) {
      return target_amplitudes(std::clamp(t, 0.0, tau), pulse)[g];
    });
  return h;
}

double envelope_area_exact(const TargetPulse& pulse) {
  const double T = pulse.segment();
  const double alpha = pulse.alpha;
  const double a = std::exp(-2.0 / (alpha * alpha));
  const double one_minus_a = -std::expm1(-2.0 / (alpha * alpha));
  const double gaussian = alpha * T * std::sqrt(2.0 * std::numbers::pi) * std::erf(std::sqrt(2.0) / alpha);
  return 2.0 * pulse.omega_f * (gaussian - 4.0 * T * a) / one_minus_a;
}

Operator effective_propagator(const TargetPulse& pulse, Parity parity) {
  pulse.validate();
  const double half_area = 0.5 * envelope_area_exact(pulse);
  if (half_area == 0.0) return Operator::Identity(kEffectiveDim, kEffectiveDim);
  const double tau = pulse.duration;
  // Envelope peaks are at tau/4 and 3tau/4; dividing by them leaves the
  // constant operator of each half.
  const Operator first = effective_hamiltonian(0.25 * tau, pulse, parity) / pulse_envelope(0.25 * tau, pulse);
  const Operator second = effective_hamiltonian(0.75 * tau, pulse, parity) / pulse_envelope(0.75 * tau, pulse);
  return hermitian_exp(second, half_area) * hermitian_exp(first, half_area);
}

DynamicsComparison compare_dynamics(const SystemConfig& config, const TargetPulse& pulse,
                                    const Eigen::Matrix<Complex, 8, 1>& input,
                                    const ParityGate& gate, int samples) {
  if (std::abs(input.squaredNorm() - 1.0) > 1e-12)
    throw std::invalid_argument("input state must be normalized");
  const Hamiltonian full = make_hamiltonian(config, pulse);
  const Hamiltonian reduced = make_effective_hamiltonian(pulse, config.parity);
  const TimeGrid grid = make_time_grid(full, 0.0, pulse.duration, samples);

  const StateVector target_full = target_state(gate, input);
  StateVector target_reduced = StateVector::Zero(kEffectiveDim);
  target_reduced.head<8>() = gate.unitary * input;
  StateVector psi_reduced = StateVector::Zero(kEffectiveDim);
  psi_reduced.head<8>() = input;

  DynamicsComparison out;
  evolve_schrodinger(full, embed_qubit_state(input), grid, [&](double t, const StateVector& psi) {
    out.times.push_back(t);
    out.fidelity_original.push_back(std::norm(target_full.dot(psi)));
  });
  evolve_schrodinger(reduced, psi_reduced, grid, [&](double, const StateVector& psi) {
    out.fidelity_effective.push_back(std::norm(target_reduced.dot(psi)));
  });
  for (std::size_t k = 0; k < out.times.size(); ++k)
    out.max_gap = std::max(out.max_gap, std::abs(out.fidelity_original[k] - out.fidelity_effective[k]));
  out.endpoint_gap = std::abs(out.fidelity_original.back() - out.fidelity_effective.back());
  return out;
}

ConditionCheck check_conditions(const SystemConfig& config, const TargetPulse& pulse,
                                double threshold) {
  ConditionCheck c;
  c.threshold = threshold;
  const double omega = pulse.omega_f;
  const double j = dipole_coupling(config.c3, config.polar_angle, config.spacing);
  c.detuning_over_omega_c = config.detuning / config.omega_c;
  c.omega_c_over_omega = omega > 0 ? config.omega_c / omega : INFINITY;
  c.detuning_over_omega = omega > 0 ? config.detuning / omega : INFINITY;
  c.exchange_over_detuning = j / config.detuning;
  c.strong_dressing = c.detuning_over_omega_c >= threshold && c.omega_c_over_omega >= threshold;
  c.weak_drive = c.detuning_over_omega_c >= threshold && c.detuning_over_omega >= threshold;
  return c;
}

}  // namespace paritygate
