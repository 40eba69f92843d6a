#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "paritygate/hamiltonian.hpp"
#include "paritygate/hilbert.hpp"

namespace paritygate {

// L = sqrt(rate) |to><from| acting on `atom`.
struct JumpOperator {
  int atom = 0;
  Level to = Level::g0;
  Level from = Level::D;
  double rate = 0.0;

  Operator matrix() const;
};

// Spontaneous emission of |D> and |P> into {|m>, |0>, |1>}.
struct DecayModel {
  double gamma_d = 1.0 / 508.0;   // 1/us
  double gamma_p = 1.0 / 1140.0;  // 1/us
  double branch_m = 0.75;
  double branch_g0 = 0.125;
  double branch_g1 = 0.125;

  static DecayModel none();
  void validate() const;
  bool is_zero() const { return gamma_d == 0.0 && gamma_p == 0.0; }
  // Three atoms x {m, 0, 1} x {D, P}: 18 operators, zero-rate ones included.
  std::vector<JumpOperator> jump_operators() const;
};

// dt * max_t ||H(t)|| must not exceed this.
inline constexpr double kStabilityLimit = 0.05;
// Default upper bound on the step, 0.2 ns.
inline constexpr double kDefaultMaxStep = 2e-4;

struct TimeGrid {
  double t0 = 0.0;
  double t1 = 0.0;
  int steps = 0;
  int stride = 1;  // record every `stride` steps (t0 and t1 always recorded)

  double dt() const { return (t1 - t0) / steps; }
  double time(int step) const;
};

class StabilityError : public std::runtime_error {
 public:
  StabilityError(double dt, double required_dt);
  double dt() const { return dt_; }
  double required_dt() const { return required_dt_; }

 private:
  double dt_;
  double required_dt_;
};

// Numerical failure during a run.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceDriftError : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

class PositivityError : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

// max_t ||H(t)|| on [t0, t1] (sampled, exact norm per sample).
double max_hamiltonian_norm(const Hamiltonian& h, double t0, double t1);

// Grid with dt = min(max_step, kStabilityLimit / max||H||) rounded down to
// an integer number of steps; roughly `samples` recorded points.
TimeGrid make_time_grid(const Hamiltonian& h, double t0, double t1, int samples = 301,
                        double max_step = kDefaultMaxStep);
// Grid with an explicit step; validated against the stability contract.
TimeGrid fixed_time_grid(const Hamiltonian& h, double t0, double t1, double dt, int samples = 301);
// Throws StabilityError when dt * max||H|| exceeds the limit.
void check_stability(const Hamiltonian& h, const TimeGrid& grid);

using StateObserver = std::function<void(double t, const StateVector& psi)>;
using DensityObserver = std::function<void(double t, const Operator& rho)>;

struct SchrodingerResult {
  StateVector final_state;
  std::vector<double> times;   // recorded sample times
  double max_norm_drift = 0.0;  // max | ||psi||^2 - 1 | over recorded samples
  int steps = 0;
  double dt = 0.0;
};

// Classical fixed-step RK4 for i d/dt psi = H(t) psi. No renormalization.
SchrodingerResult evolve_schrodinger(const Hamiltonian& h, const StateVector& psi0,
                                     const TimeGrid& grid, const StateObserver& observe = {});

struct LindbladResult {
  Operator final_state;
  std::vector<double> times;
  double max_trace_drift = 0.0;
  double max_hermiticity_error = 0.0;  // before symmetrization
  double min_eigenvalue = 0.0;          // over positivity checkpoints
  int steps = 0;
  double dt = 0.0;
};

struct LindbladOptions {
  double trace_tolerance = 1e-8;
  double positivity_tolerance = 1e-6;
  int positivity_checks = 16;  // eigenvalue checks spread over the run
  // Evolve the |m>-occupancy blocks separately when rho0 has no coherence
  // between them (exact; the dense kernel is used otherwise).
  bool sector_blocking = true;
};

// RK4 on d rho/dt = -i[H, rho] + sum_k L rho L^dag - {L^dag L, rho}/2.
// Hermiticity is restored by symmetrization after each step.
LindbladResult evolve_lindblad(const Hamiltonian& h, const Operator& rho0, const DecayModel& decay,
                               const TimeGrid& grid, const DensityObserver& observe = {},
                               const LindbladOptions& options = {});

}  // namespace paritygate
