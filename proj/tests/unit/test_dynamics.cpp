#include <cmath>

#include "doctest.h"
#include "test_support.hpp"
#include "paritygate/dynamics.hpp"
#include "paritygate/gates.hpp"
#include "paritygate/model.hpp"

using namespace paritygate;
using testing_support::pe_x_pulse;

namespace {

Hamiltonian zero_hamiltonian() { return Hamiltonian(Operator::Zero(kDim, kDim)); }

Operator pure(const BasisLabel& label) {
  const StateVector v = basis_state(label);
  return v * v.adjoint();
}

SystemConfig fast_config() {
  SystemConfig c;
  c.include_vdw = false;
  return c;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("zero Hamiltonian leaves the state unchanged") {
    const Hamiltonian h = zero_hamiltonian();
    const StateVector psi0 = reference_initial_state();
    const TimeGrid grid = fixed_time_grid(h, 0.0, 1.0, 0.01, 11);
    int calls = 0;
    const auto r = evolve_schrodinger(h, psi0, grid, [&](double, const StateVector& psi) {
      ++calls;
      CHECK((psi - psi0).norm() == 0.0);
    });
    CHECK(calls == 11);
    CHECK(r.steps == 100);
    CHECK((r.final_state - psi0).norm() == 0.0);
  }

  TEST_CASE("two-level Rabi oscillation") {
    const double omega = 2.0;
    Operator sx(2, 2);
    sx << 0, omega, omega, 0;
    const Hamiltonian h(sx);
    StateVector psi0(2);
    psi0 << 1, 0;
    const double t_half = std::numbers::pi / 2 / omega;
    const auto r = evolve_schrodinger(h, psi0, make_time_grid(h, 0.0, t_half, 2, 1e-4));
    CHECK(std::norm(r.final_state(1)) == doctest::Approx(1.0).epsilon(1e-10));
    const double t = 0.3;
    const auto r2 = evolve_schrodinger(h, psi0, make_time_grid(h, 0.0, t, 2, 1e-4));
    CHECK(std::norm(r2.final_state(1)) == doctest::Approx(std::pow(std::sin(omega * t), 2)).epsilon(1e-10));
  }

  TEST_CASE("time grid follows the stability contract") {
    const Hamiltonian h = make_hamiltonian(SystemConfig{}, pe_x_pulse());
    const double norm = max_hamiltonian_norm(h, 0.0, 3.0);
    const TimeGrid g = make_time_grid(h, 0.0, 3.0);
    CHECK(g.dt() * norm <= kStabilityLimit * (1 + 1e-12));
    CHECK(g.dt() <= kDefaultMaxStep);
    CHECK(g.time(g.steps) == 3.0);
    CHECK_THROWS_AS(fixed_time_grid(h, 0.0, 3.0, 0.01), StabilityError);
    try {
      fixed_time_grid(h, 0.0, 3.0, 0.01);
    } catch (const StabilityError& e) {
      CHECK(e.dt() == doctest::Approx(0.01));
      CHECK(e.required_dt() < 0.01);
    }
  }

  TEST_CASE("norm is conserved on a full gate run") {
    const SystemConfig c = fast_config();
    const Hamiltonian h = make_hamiltonian(c, pe_x_pulse());
    const auto r = evolve_schrodinger(h, reference_initial_state(), make_time_grid(h, 0.0, 3.0));
    CHECK(r.max_norm_drift < 1e-8);
    CHECK(std::abs(r.final_state.squaredNorm() - 1.0) < 1e-8);
  }

  TEST_CASE("halving the step changes a short-window fidelity by < 1e-4") {
    const SystemConfig c = fast_config();
    const Hamiltonian h = make_hamiltonian(c, pe_x_pulse());
    const TimeGrid g = make_time_grid(h, 0.0, 0.6, 3);
    TimeGrid half = g;
    half.steps *= 2;
    const auto a = evolve_schrodinger(h, reference_initial_state(), g);
    const auto b = evolve_schrodinger(h, reference_initial_state(), half);
    const double fa = fidelity_pure(a.final_state, reference_input(), pe_x());
    const double fb = fidelity_pure(b.final_state, reference_input(), pe_x());
    CHECK(std::abs(fa - fb) < 1e-4);
    CHECK((a.final_state - b.final_state).norm() < 1e-6);
  }

  TEST_CASE("decay model") {
    const DecayModel d;
    CHECK(d.jump_operators().size() == 18);
    CHECK(DecayModel::none().is_zero());
    DecayModel bad;
    bad.branch_m = 0.9;
    CHECK_THROWS(bad.validate());
    const JumpOperator j{1, Level::m, Level::P, 4.0};
    CHECK((j.matrix() - 2.0 * embed(transition(Level::m, Level::P), 1)).norm() < 1e-15);
  }

  TEST_CASE("spontaneous decay reaches 1/e at one lifetime") {
    const Hamiltonian h = zero_hamiltonian();
    const DecayModel d;
    const auto r = evolve_lindblad(h, pure({Level::D, Level::g0, Level::g0}), d, fixed_time_grid(h, 0.0, 508.0, 0.5, 3));
    CHECK(expectation(r.final_state, {Level::D, Level::g0, Level::g0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
    CHECK(r.max_trace_drift < 1e-8);
  }

  TEST_CASE("branching ratios of the decay products") {
    const Hamiltonian h = zero_hamiltonian();
    for (Level start : {Level::D, Level::P}) {
      const DecayModel d;
      const double lifetime = start == Level::D ? 508.0 : 1140.0;
      const auto r = evolve_lindblad(h, pure({start, Level::g0, Level::g0}), d,
                                     fixed_time_grid(h, 0.0, 14 * lifetime, lifetime / 200, 3));
      CHECK(expectation(r.final_state, {Level::g0, Level::g0, Level::g0}) == doctest::Approx(0.125).epsilon(1e-4 / 0.125));
      CHECK(expectation(r.final_state, {Level::g1, Level::g0, Level::g0}) == doctest::Approx(0.125).epsilon(1e-4 / 0.125));
      CHECK(expectation(r.final_state, {Level::m, Level::g0, Level::g0}) == doctest::Approx(0.75).epsilon(1e-4 / 0.75));
    }
  }

  TEST_CASE("zero-decay Lindblad reproduces Schrodinger") {
    const SystemConfig c = fast_config();
    const Hamiltonian h = make_hamiltonian(c, pe_x_pulse());
    const TimeGrid g = make_time_grid(h, 0.0, 0.5, 3);
    const StateVector psi0 = reference_initial_state();
    const auto s = evolve_schrodinger(h, psi0, g);
    const auto l = evolve_lindblad(h, psi0 * psi0.adjoint(), DecayModel::none(), g);
    const Operator rho_s = s.final_state * s.final_state.adjoint();
    CHECK((l.final_state - rho_s).cwiseAbs().maxCoeff() < 1e-8);
    const StateVector target = target_state(pe_x(), reference_input());
    CHECK(std::abs(fidelity_mixed(l.final_state, target) - fidelity_pure(s.final_state, reference_input(), pe_x())) < 1e-8);
    CHECK(l.max_trace_drift < 1e-8);
    CHECK(l.max_hermiticity_error < 1e-10);
  }

  TEST_CASE("sector-blocked and dense Lindblad kernels agree") {
    const SystemConfig c = fast_config();
    const Hamiltonian h = make_hamiltonian(c, pe_x_pulse());
    DecayModel strong;
    strong.gamma_d = 2.0;
    strong.gamma_p = 1.0;
    const TimeGrid g = make_time_grid(h, 0.0, 0.3, 3);
    const StateVector psi0 = reference_initial_state();
    LindbladOptions dense;
    dense.sector_blocking = false;
    const auto a = evolve_lindblad(h, psi0 * psi0.adjoint(), strong, g);
    const auto b = evolve_lindblad(h, psi0 * psi0.adjoint(), strong, g, {}, dense);
    CHECK((a.final_state - b.final_state).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a.max_trace_drift < 1e-8);
    double m_pop = 0.0;
    for (int i = 0; i < kDim; ++i)
      for (int atom = 0; atom < kAtoms; ++atom)
        if (level_of(i, atom) == level_index(Level::m)) {
          m_pop += a.final_state(i, i).real();
          break;
        }
    CHECK(m_pop > 0.0);
  }

  TEST_CASE("invalid initial states are rejected") {
    const Hamiltonian h = zero_hamiltonian();
    const TimeGrid g = fixed_time_grid(h, 0.0, 1.0, 0.1);
    CHECK_THROWS(evolve_schrodinger(h, StateVector::Zero(7), g));
    Operator rho = Operator::Zero(kDim, kDim);
    rho(0, 0) = 2.0;
    CHECK_THROWS(evolve_lindblad(h, rho, DecayModel{}, g));
  }
}
