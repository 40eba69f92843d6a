#include <cmath>
#include <cstring>

#include "doctest.h"
#include "test_support.hpp"
#include "paritygate/noise.hpp"

using namespace paritygate;
using testing_support::pe_x_pulse;

namespace {

SystemConfig fast_config() {
  SystemConfig c;
  c.include_vdw = false;
  return c;
}

bool same_bits(const NoiseDraw& a, const NoiseDraw& b) {
  return std::memcmp(&a, &b, sizeof(NoiseDraw)) == 0;
}

NoiseSpec only(bool position, bool phase, bool amplitude) {
  NoiseSpec s;
  s.position = position;
  s.phase = phase;
  s.amplitude = amplitude;
  return s;
}

}  // namespace

TEST_SUITE("noise") {
  TEST_CASE("Box-Muller examples") {
    CHECK(sample_displacement(22.0, 1.0, 0.3) == 0.0);
    CHECK(std::abs(sample_displacement(22.0, 0.4, 0.25)) < 1e-14);
    CHECK(sample_displacement(22.0, std::exp(-0.5), 0.0) == doctest::Approx(22.0));
    CHECK_THROWS(sample_displacement(1.0, 0.0, 0.1));
  }

  TEST_CASE("raw deviates have the requested moments") {
    ShotRng rng(123, 0);
    const int n = 100000;
    const double sigma = 22.0;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = rng.normal(sigma);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(mean) < 0.01 * sigma);
    CHECK(std::abs(sd / sigma - 1.0) < 0.01);
  }

  TEST_CASE("uniforms stay in range") {
    ShotRng rng(5, 6, 7);
    for (int k = 0; k < 1000; ++k) {
      const double u = rng.uniform();
      const double v = rng.uniform_open_low();
      CHECK((u >= 0.0 && u < 1.0));
      CHECK((v > 0.0 && v <= 1.0));
    }
  }

  TEST_CASE("disabled channels give exact zeros") {
    const SystemConfig c;
    CHECK(draw_noise(only(false, false, false), c, 3).is_zero());
    const NoiseDraw pos = draw_noise(only(true, false, false), c, 3);
    CHECK_FALSE(pos.is_zero());
    for (int b = 0; b < kBeams; ++b) {
      CHECK(pos.phase_offset[b] == 0.0);
      CHECK(pos.amplitude_error[b] == 0.0);
    }
    // Enabling a channel never changes another channel's values.
    const NoiseDraw all = draw_noise(NoiseSpec{}, c, 3);
    CHECK(all.displacement == pos.displacement);
    CHECK(draw_noise(only(false, true, false), c, 3).phase_offset == all.phase_offset);
  }

  TEST_CASE("draws are reproducible and shot-local") {
    const SystemConfig c;
    const NoiseSpec s;
    CHECK(same_bits(draw_noise(s, c, 17), draw_noise(s, c, 17)));
    CHECK(draw_digest(draw_noise(s, c, 17)) == draw_digest(draw_noise(s, c, 17)));
    CHECK(draw_digest(draw_noise(s, c, 17)) != draw_digest(draw_noise(s, c, 18)));
    NoiseSpec other = s;
    other.seed += 1;
    CHECK(draw_digest(draw_noise(s, c, 17)) != draw_digest(draw_noise(other, c, 17)));
    CHECK(draw_digest(draw_noise(s, c, 17)).size() == 16);
  }

  TEST_CASE("beam sharing follows the parity") {
    SystemConfig even;
    SystemConfig odd;
    odd.parity = Parity::Odd;
    const NoiseSpec s;
    const NoiseDraw e = draw_noise(s, even, 4);
    CHECK(e.phase_offset[kC1Ground0] == e.phase_offset[kC2Ground0]);
    CHECK(e.amplitude_error[kC1Ground1] == e.amplitude_error[kC2Ground1]);
    CHECK(e.phase_offset[kTargetOmega0] != e.phase_offset[kTargetOmega1]);
    CHECK(e.displacement[0] != e.displacement[1]);
    const NoiseDraw o = draw_noise(s, odd, 4);
    CHECK(o.phase_offset[kC1Ground0] != o.phase_offset[kC2Ground0]);
    NoiseSpec forced = s;
    forced.sharing = BeamSharing::Shared;
    const NoiseDraw f = draw_noise(forced, odd, 4);
    CHECK(f.phase_offset[kC1Ground0] == f.phase_offset[kC2Ground0]);
    CHECK(parse_beam_sharing(beam_sharing_name(BeamSharing::Independent)) == BeamSharing::Independent);
  }

  TEST_CASE("scaled spec") {
    const NoiseSpec s = NoiseSpec{}.scaled(0.1);
    CHECK(s.position_sigma_nm[2] == doctest::Approx(6.0));
    CHECK(s.control_phase_sigma == doctest::Approx(0.001 * std::numbers::pi));
    NoiseSpec bad;
    bad.shots = 0;
    CHECK_THROWS(bad.validate());
  }

  TEST_CASE("zero-noise ensemble has identical shots") {
    NoiseSpec s = only(false, false, false);
    s.shots = 5;
    const EnsembleResult r = ensemble_average(fast_config(), pe_x_pulse(), s, pe_x());
    CHECK(r.completed == 5);
    CHECK(r.stddev == 0.0);
    for (const ShotResult& shot : r.shots) CHECK(shot.fidelity == r.shots[0].fidelity);
    CHECK(r.min == r.max);
  }

  TEST_CASE("ensemble is bit-identical across thread counts") {
    NoiseSpec s;
    s.shots = 4;
    EnsembleOptions one;
    one.threads = 1;
    EnsembleOptions many;
    many.threads = 3;
    const EnsembleResult a = ensemble_average(fast_config(), pe_x_pulse(), s, pe_x(), one);
    const EnsembleResult b = ensemble_average(fast_config(), pe_x_pulse(), s, pe_x(), many);
    REQUIRE(a.shots.size() == b.shots.size());
    for (std::size_t k = 0; k < a.shots.size(); ++k) {
      CHECK(a.shots[k].shot == k);
      CHECK(std::memcmp(&a.shots[k].fidelity, &b.shots[k].fidelity, sizeof(double)) == 0);
      CHECK(same_bits(a.shots[k].draw, b.shots[k].draw));
    }
    CHECK(std::memcmp(&a.mean, &b.mean, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.stddev, &b.stddev, sizeof(double)) == 0);
  }

  TEST_CASE("shrinking the noise moves the mean toward the noiseless fidelity") {
    const SystemConfig c = fast_config();
    const TargetPulse p = pe_x_pulse();
    const double f0 = run_shot(c, p, pe_x(), NoiseDraw{}, EnsembleOptions{}).fidelity;
    std::vector<double> distance;
    for (double factor : {1.0, 0.1, 0.01}) {
      NoiseSpec s = NoiseSpec{}.scaled(factor);
      s.shots = 4;
      distance.push_back(std::abs(ensemble_average(c, p, s, pe_x()).mean - f0));
    }
    MESSAGE("distance to noiseless " << distance[0] << " " << distance[1] << " " << distance[2]);
    CHECK(distance[1] < distance[0]);
    CHECK(distance[2] < distance[1]);
  }

  TEST_CASE("a single shot can record its fidelity curve") {
    EnsembleOptions o;
    o.record_curves = true;
    o.samples = 31;
    const ShotResult r = run_shot(fast_config(), pe_x_pulse(), pe_x(), NoiseDraw{}, o);
    CHECK(r.times.size() == r.curve.size());
    CHECK(r.curve.front() == doctest::Approx(0.25));
    CHECK(r.curve.back() == r.fidelity);
    CHECK(r.max_drift < 1e-8);
  }
}
