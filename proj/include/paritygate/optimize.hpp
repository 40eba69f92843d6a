#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "paritygate/gates.hpp"
#include "paritygate/model.hpp"
#include "paritygate/noise.hpp"

namespace paritygate {

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const { return x >= lower && x <= upper; }
  double clamp(double x) const { return std::min(upper, std::max(lower, x)); }
};

struct SimplexOptions {
  int max_evaluations = 500;
  // Stop when every vertex lies within this fraction of the parameter
  // scale (max(|x0_i|, bound width * 1e-3)) of the best vertex.
  double tolerance = 1e-4;
  int restarts = 2;             // fresh simplices around the incumbent
  double initial_step = 0.1;    // relative to the parameter scale
  std::uint64_t seed = 1;       // orientation of restart simplices
};

struct TracePoint {
  int evaluation = 0;
  std::vector<double> x;
  double cost = 0.0;
  double best_cost = 0.0;  // best-so-far, never increases
};

struct SimplexResult {
  std::vector<double> best_x;
  double best_cost = 0.0;
  double start_cost = 0.0;
  int evaluations = 0;
  int restarts_used = 0;
  bool converged = false;  // tolerance reached (not the budget)
  std::vector<TracePoint> trace;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Nelder-Mead with candidates projected onto the box. Every evaluated point
// lies inside the bounds (checked before each call).
SimplexResult nelder_mead(const Objective& f, const std::vector<double>& start,
                          const std::vector<Bounds>& bounds, const SimplexOptions& options = {});

enum class CostKind { Deterministic, Ensemble };

struct OptimizationProblem {
  SystemConfig config;  // J, Delta, tau held fixed; parity from `gate`
  TargetPulse pulse;    // duration fixed; omega_f, alpha free; rotation from `gate`
  ParityGate gate = pe_x();
  CostKind kind = CostKind::Deterministic;
  NoiseSpec noise;            // ensemble objective only; seed frozen
  EnsembleOptions ensemble;   // ensemble objective only
  // (Omega_c, Omega_f, alpha)
  std::array<Bounds, 3> bounds{{{mhz(1.0), mhz(8.0)}, {mhz(0.05), mhz(1.0)}, {0.1, 100.0}}};
  std::array<double, 3> start{mhz(4.3), mhz(0.4), 0.3};
  double max_step = kDefaultMaxStep;

  void validate() const;
};

struct CostEvaluation {
  double cost = 1.0;
  bool penalized = false;
  std::string diagnostic;
};

// 1 - F (deterministic) or 1 - mean F over the frozen noise draws. Integrator
// failures return the penalty cost 1.
CostEvaluation evaluate_cost(const std::array<double, 3>& params, const OptimizationProblem& problem);
double cost(const std::array<double, 3>& params, const OptimizationProblem& problem);

struct OptimizationResult {
  std::array<double, 3> best{};
  double best_cost = 1.0;
  double start_cost = 1.0;
  int evaluations = 0;
  int penalized = 0;
  bool converged = false;
  bool failed = false;  // every evaluation penalized
  std::vector<TracePoint> trace;
  std::vector<std::string> diagnostics;
};

OptimizationResult minimize(const OptimizationProblem& problem, const SimplexOptions& options = {});

}  // namespace paritygate
