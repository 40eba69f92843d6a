#include <cmath>
#include <random>

#include "doctest.h"
#include "paritygate/dynamics.hpp"
#include "paritygate/model.hpp"

using namespace paritygate;
using namespace std::complex_literals;

namespace {

SystemConfig odd_config() {
  SystemConfig c;
  c.parity = Parity::Odd;
  c.omega_c = mhz(2.3455);
  return c;
}

// Independent term-by-term enumeration of one matrix element of H(t).
Complex reference_element(double t, int row, int col, const SystemConfig& c, const TargetPulse& p) {
  const double d = c.spacing;
  const std::array<double, 3> dist{2 * d, d, d};
  const double ang = std::cos(c.polar_angle);
  std::array<int, 3> lr{}, lc{};
  int differing = 0;
  for (int a = 0; a < 3; ++a) {
    lr[a] = level_of(row, a);
    lc[a] = level_of(col, a);
    differing += lr[a] != lc[a];
  }
  const int D = 3, P = 4, G0 = 0, G1 = 1;
  const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  if (differing == 0) {
    Complex v = 0.0;
    const double oc2 = c.omega_c * c.omega_c, s = oc2 / c.detuning;
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = pairs[k];
      const double r6 = std::pow(dist[k], 6);
      if (c.include_vdw && lr[i] == D && lr[j] == D) v += -c.c6_d / r6;
      if (c.include_vdw && lr[i] == P && lr[j] == P) v += -c.c6_p / r6;
    }
    if (c.stark_compensation) {
      if (lr[0] == G0) v += -s;
      if (lr[0] == G1) v += s;
      const double flip = c.parity == Parity::Even ? 1.0 : -1.0;
      if (lr[1] == G0) v += -s * flip;
      if (lr[1] == G1) v += s * flip;
      const double vd = c.include_vdw ? -c.c6_d / std::pow(d, 6) : 0.0;
      const double vp = c.include_vdw ? -c.c6_p / std::pow(d, 6) : 0.0;
      if (lr[2] == D) v += -(2 * oc2 / (c.detuning - vd) - 2 * oc2 / c.detuning);
      if (lr[2] == P) v += 2 * oc2 / (c.detuning + vp) - 2 * oc2 / c.detuning;
    }
    return v;
  }
  if (differing == 2) {
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = pairs[k];
      const int other = 3 - i - j;
      if (lr[other] != lc[other]) continue;
      const bool swap = (lr[i] == D && lr[j] == P && lc[i] == P && lc[j] == D) ||
                        (lr[i] == P && lr[j] == D && lc[i] == D && lc[j] == P);
      if (swap) return c.c3 * (1 - 3 * ang * ang) / std::pow(dist[k], 3);
    }
    return 0.0;
  }
  if (differing != 1) return 0.0;
  int a = 0;
  while (lr[a] == lc[a]) ++a;
  const int to = lr[a], from = lc[a];
  const bool up = (to == D || to == P) && (from == G0 || from == G1);
  const bool down = (from == D || from == P) && (to == G0 || to == G1);
  if (!up && !down) return 0.0;
  const int ground = up ? from : to, ryd = up ? to : from;
  Complex amp = 0.0;
  if (a < 2) {
    int partner = ground == G0 ? D : P;
    if (a == 1 && c.parity == Parity::Odd) partner = ground == G0 ? P : D;
    if (ryd != partner) return 0.0;
    const double sign = ryd == D ? -1.0 : 1.0;
    amp = c.omega_c * std::exp(1i * (sign * c.detuning * t));
  } else {
    const double omega = pulse_envelope(t, p);
    const double phi1 = t < p.duration / 2 ? 0.0 : std::numbers::pi - p.rotation.gamma;
    amp = ground == G0 ? omega * std::sin(p.rotation.theta / 2) * std::exp(1i * (phi1 - p.rotation.phi))
                       : omega * std::cos(p.rotation.theta / 2) * std::exp(1i * phi1);
  }
  return up ? amp : std::conj(amp);
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("dipole coupling examples") {
    const SystemConfig c;
    CHECK(to_mhz(dipole_coupling(c.c3, std::numbers::pi / 2, 5.334)) == doctest::Approx(86.0).epsilon(1e-3));
    CHECK(std::abs(dipole_coupling(c.c3, std::acos(1 / std::sqrt(3.0)), 5.334)) < 1e-9);
    CHECK(dipole_coupling(c.c3, 1.0, 10.668) == doctest::Approx(dipole_coupling(c.c3, 1.0, 5.334) / 8));
    CHECK_THROWS(dipole_coupling(c.c3, 1.0, 0.0));
    CHECK(resonant_spacing(c) == doctest::Approx(5.334).epsilon(1e-3));
  }

  TEST_CASE("van der Waals constants to four significant figures") {
    const SystemConfig c;
    CHECK(to_mhz(vdw_coupling(c.c6_d, 5.334)) == doctest::Approx(-66.978).epsilon(5e-5));
    CHECK(to_mhz(vdw_coupling(c.c6_d, 10.668)) == doctest::Approx(-1.0465).epsilon(5e-5));
    CHECK(to_mhz(vdw_coupling(c.c6_p, 5.334)) == doctest::Approx(-238.23).epsilon(5e-5));
    CHECK(to_mhz(vdw_coupling(c.c6_p, 10.668)) == doctest::Approx(-3.7223).epsilon(5e-5));
  }

  TEST_CASE("envelope vanishes at the edges and peaks at the segment centre") {
    TargetPulse p;
    const double T = p.segment();
    CHECK(pulse_envelope(2 * T, p) == doctest::Approx(p.omega_f));
    CHECK(pulse_envelope(6 * T, p) == doctest::Approx(p.omega_f));
    CHECK(std::abs(pulse_envelope(0.0, p)) < 1e-12);
    CHECK(std::abs(pulse_envelope(4 * T, p)) < 1e-12);
    CHECK(std::abs(pulse_envelope(p.duration, p)) < 1e-12);
    CHECK_THROWS_AS(pulse_envelope(-0.1, p), std::out_of_range);
    p.alpha = 42.76;  // nearly flat: still finite and zero at the edges
    CHECK(pulse_envelope(2 * T, p) == doctest::Approx(p.omega_f));
    CHECK(std::abs(pulse_envelope(0.0, p)) < 1e-9);
  }

  TEST_CASE("phase schedule") {
    CHECK(phase_schedule(1.0, 0.7, 3.0) == 0.0);
    CHECK(phase_schedule(1.5, std::numbers::pi / 2, 3.0) == doctest::Approx(std::numbers::pi / 2));
    CHECK(phase_schedule(2.0, std::numbers::pi, 3.0) == 0.0);
  }

  TEST_CASE("geometry from displacements") {
    const SystemConfig c;
    const GeometrySample g = nominal_geometry(c);
    CHECK(g.distance[kPair13] == doctest::Approx(5.334));
    CHECK(g.distance[kPair23] == doctest::Approx(5.334));
    CHECK(g.distance[kPair12] == doctest::Approx(10.668));
    CHECK(g.dipole[kPair12] == doctest::Approx(g.dipole[kPair13] / 8));
    const GeometrySample s = geometry_from_displacements(c, {}, {}, {0, 0.1, 0});
    CHECK(s.distance[kPair13] == doctest::Approx(std::sqrt(5.334 * 5.334 + 0.01)));
  }

  TEST_CASE("target Stark shift at Omega_c = 2pi x 5 MHz") {
    SystemConfig c;
    c.omega_c = mhz(5.0);
    const double v13 = -mhz(66.978);
    const double oc2 = c.omega_c * c.omega_c;
    const double expected = 2 * oc2 / (c.detuning - v13) - 2 * oc2 / c.detuning;
    const auto shifts = target_stark_shifts(c, nominal_geometry(c));
    CHECK(-shifts[0] == doctest::Approx(expected).epsilon(1e-4));
    SystemConfig flat = c;
    flat.c6_d = flat.c6_p = 0.0;
    const auto zero = target_stark_shifts(flat, nominal_geometry(flat));
    CHECK(std::abs(zero[0]) < 1e-12);
    CHECK(std::abs(zero[1]) < 1e-12);
  }

  TEST_CASE("control compensation cancels the second-order light shift") {
    // One control atom: |0>-|D> at e^{-i Delta t}, |1>-|P> at e^{+i Delta t}.
    const SystemConfig c;
    const double s = c.omega_c * c.omega_c / c.detuning;
    const Operator comp = stark_compensation(c, nominal_geometry(c));
    const double c1_g0 = comp(basis_index(Level::g0, Level::m, Level::m), basis_index(Level::g0, Level::m, Level::m)).real();
    const double c1_g1 = comp(basis_index(Level::g1, Level::m, Level::m), basis_index(Level::g1, Level::m, Level::m)).real();
    CHECK(c1_g0 == doctest::Approx(-s));
    CHECK(c1_g1 == doctest::Approx(s));

    const auto phase_rate = [&](Level ground, double counter_term) {
      Operator diag = Operator::Zero(kLevels, kLevels);
      diag(level_index(ground), level_index(ground)) = counter_term;
      Hamiltonian h(diag);
      const double delta = c.detuning, oc = c.omega_c;
      h.add_drive(transition(Level::D, Level::g0), [=](double t) { return oc * std::exp(-1i * delta * t); });
      h.add_drive(transition(Level::P, Level::g1), [=](double t) { return oc * std::exp(1i * delta * t); });
      StateVector psi = StateVector::Zero(kLevels);
      psi(level_index(ground)) = 1.0;
      const double duration = 3.0;
      const SchrodingerResult r = evolve_schrodinger(h, psi, make_time_grid(h, 0.0, duration, 3));
      // Energy E gives amplitude e^{-iEt}.
      return -std::arg(r.final_state(level_index(ground))) / duration;
    };
    const double bare0 = phase_rate(Level::g0, 0.0);
    const double bare1 = phase_rate(Level::g1, 0.0);
    CHECK(bare0 == doctest::Approx(s).epsilon(0.02));
    CHECK(bare1 == doctest::Approx(-s).epsilon(0.02));
    CHECK(std::abs(phase_rate(Level::g0, c1_g0)) < 0.02 * s);
    CHECK(std::abs(phase_rate(Level::g1, c1_g1)) < 0.02 * s);
  }

  TEST_CASE("Hamiltonian is Hermitian at random times") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (const SystemConfig& c : {SystemConfig{}, odd_config()}) {
      const Hamiltonian h = make_hamiltonian(c, TargetPulse{});
      for (int k = 0; k < 5; ++k) {
        const Operator m = h.matrix(u(rng));
        CHECK((m - m.adjoint()).norm() < 1e-12);
      }
    }
  }

  TEST_CASE("matches a hand-assembled reference on sampled entries") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ut(0.0, 3.0);
    std::uniform_int_distribution<int> ui(0, kDim - 1);
    for (const SystemConfig& c : {SystemConfig{}, odd_config()}) {
      TargetPulse p;
      p.rotation = c.parity == Parity::Even ? pe_x().rotation : po_sqrt_x().rotation;
      const double t = ut(rng);
      const Operator m = build_hamiltonian(t, c, p);
      std::vector<std::pair<int, int>> nonzero;
      for (int r = 0; r < kDim; ++r)
        for (int col = 0; col < kDim; ++col)
          if (m(r, col) != 0.0) nonzero.emplace_back(r, col);
      std::uniform_int_distribution<std::size_t> pick(0, nonzero.size() - 1);
      for (int k = 0; k < 20; ++k) {
        const auto [r, col] = nonzero[pick(rng)];
        CHECK(std::abs(m(r, col) - reference_element(t, r, col, c, p)) < 1e-9 * (1 + std::abs(m(r, col))));
      }
      for (int k = 0; k < 20; ++k) {
        const int r = ui(rng), col = ui(rng);
        CHECK(std::abs(m(r, col) - reference_element(t, r, col, c, p)) < 1e-9 * (1 + std::abs(m(r, col))));
      }
      // Full sweep as a stronger check of the same oracle.
      double worst = 0.0;
      for (int r = 0; r < kDim; ++r)
        for (int col = 0; col < kDim; ++col)
          worst = std::max(worst, std::abs(m(r, col) - reference_element(t, r, col, c, p)));
      CHECK(worst < 1e-9);
    }
  }

  TEST_CASE("exchange matrix element and drive-free block structure") {
    SystemConfig c;
    const Operator m = build_hamiltonian(0.0, c, TargetPulse{});
    const double j13 = dipole_coupling(c.c3, c.polar_angle, c.spacing);
    CHECK(m(basis_index(Level::D, Level::g0, Level::P), basis_index(Level::P, Level::g0, Level::D)).real() ==
          doctest::Approx(j13));
    const Operator n = rydberg_number();
    c.stark_compensation = false;
    const Operator h0 = static_hamiltonian(c, {});
    CHECK((h0 * n - n * h0).norm() < 1e-9);
    // Without the target pulse the only remaining time dependence is the
    // control drives, which never touch the target atom.
    TargetPulse off;
    off.omega_f = 0.0;
    const Operator rest = build_hamiltonian(1.3, c, off) - h0;
    for (int r = 0; r < kDim; ++r)
      for (int col = 0; col < kDim; ++col)
        if (rest(r, col) != 0.0) CHECK(level_of(r, kTarget) == level_of(col, kTarget));
  }

  TEST_CASE("envelope area meets the geometric condition for the shipped parameter sets") {
    TargetPulse pe;
    CHECK(envelope_area(pe) / std::numbers::pi == doctest::Approx(1.0).epsilon(0.05));
    TargetPulse po;
    po.omega_f = mhz(0.3699);
    po.alpha = 0.7584;
    CHECK(envelope_area(po) / std::numbers::pi == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("configuration validation") {
    SystemConfig c;
    c.spacing = -1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    TargetPulse p;
    p.alpha = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }
}
