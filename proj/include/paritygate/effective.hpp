#pragma once

#include <string>
#include <vector>

#include "paritygate/dynamics.hpp"
#include "paritygate/gates.hpp"
#include "paritygate/model.hpp"

namespace paritygate {

// Exchange blocks of the dipole-dipole Hamiltonian:
//   1A {DPD, PDD, DDP}, 1B {DPP, PDP, PPD},
//   2A {D L P, P L D}, 2B {L D P, L P D}, 2C {D P L, P D L} with L a ground level.
enum class ExchangeBlock { k1A, k1B, k2A, k2B, k2C };

std::string_view exchange_block_name(ExchangeBlock b);
ExchangeBlock parse_exchange_block(std::string_view name);
inline constexpr std::array<ExchangeBlock, 5> kExchangeBlocks{
    ExchangeBlock::k1A, ExchangeBlock::k1B, ExchangeBlock::k2A, ExchangeBlock::k2B,
    ExchangeBlock::k2C};

struct SpectralBlock {
  std::string id;
  std::vector<int> basis;            // 125-dim product indices
  Eigen::VectorXd eigenvalues;       // closed form
  Eigen::MatrixXd eigenvectors;      // closed form, one column per eigenvalue
};

// Closed-form eigenpairs with J = J13 = J23 and J12. `idle` is the ground
// level held by the spectator atom in the two-excitation blocks.
SpectralBlock dd_block_spectrum(double j, double j12, ExchangeBlock block, Level idle = Level::g0);

// Block of `op` on the block's basis.
Eigen::MatrixXcd restrict_to(const Operator& op, const std::vector<int>& basis);
// max_k || M v_k - lambda_k v_k || for the block of `op`.
double eigen_residual(const Operator& op, const SpectralBlock& block);

// Pure exchange Hamiltonian sum_{i != j} J_ij |D_i P_j><P_i D_j| with J13 = J23 = j.
Operator exchange_operator(double j, double j12);

struct DressingBlock {
  Eigen::Matrix3d coupling;      // basis (|D0P>, |00P>, |0DP>)
  Eigen::Vector3d eigenvalues;   // lambda_0, lambda_1, lambda_2
  Eigen::Matrix3d eigenvectors;  // columns |lambda_0>, |lambda_1>, |lambda_2>
};

// lambda_0 = 0, lambda_{1,2} = -+ sqrt2 Omega_c on the bare control coupling
// of |00P> to |D0P> and |0DP> (strength Omega_c each).
DressingBlock omega_c_block_spectrum(double omega_c);
// Same vectors on the exchange-dressed states, couplings Omega_c / sqrt2:
// the eigenvalues are 0, -+ Omega_c.
DressingBlock omega_c_dressed_block(double omega_c);

// Reduced model: 8 computational states (index 4 c1 + 2 c2 + t) followed by
// one Rydberg state of the target for each active control pattern (|D> if
// c1 = 0, |P> if c1 = 1).
inline constexpr int kEffectiveDim = 10;

// Control patterns (2 c1 + c2) on which the gate acts.
std::array<int, 2> active_patterns(Parity parity);

Operator effective_hamiltonian(double t, const TargetPulse& pulse, Parity parity);
Hamiltonian make_effective_hamiltonian(const TargetPulse& pulse, Parity parity);
// Exact propagator: H(t) is Omega(t) times a fixed operator on each half.
Operator effective_propagator(const TargetPulse& pulse, Parity parity);

// Closed-form area of the envelope over [0, tau].
double envelope_area_exact(const TargetPulse& pulse);

struct DynamicsComparison {
  std::vector<double> times;
  std::vector<double> fidelity_original;
  std::vector<double> fidelity_effective;
  double max_gap = 0.0;
  double endpoint_gap = 0.0;
};

// Runs the 125-dim and the reduced model on the same time grid.
DynamicsComparison compare_dynamics(const SystemConfig& config, const TargetPulse& pulse,
                                    const Eigen::Matrix<Complex, 8, 1>& input,
                                    const ParityGate& gate, int samples = 301);

struct ConditionCheck {
  double detuning_over_omega_c = 0.0;
  double omega_c_over_omega = 0.0;   // Omega_c / max Omega(t)
  double detuning_over_omega = 0.0;
  double exchange_over_detuning = 0.0;
  // Delta >> Omega_c >> Omega (the hierarchy the gate relies on).
  bool strong_dressing = false;
  // Delta >> {Omega, Omega_c} only.
  bool weak_drive = false;
  double threshold = 10.0;  // ">>" read as a ratio of at least this
};
ConditionCheck check_conditions(const SystemConfig& config, const TargetPulse& pulse,
                                double threshold = 10.0);

}  // namespace paritygate
