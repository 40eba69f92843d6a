#include "paritygate/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace paritygate {

namespace {

struct Vertex {
  std::vector<double> x;
  double f = 0.0;
};

class BoundedObjective {
 public:
  BoundedObjective(const Objective& f, const std::vector<Bounds>& bounds, const SimplexOptions& options,
                   SimplexResult& result)
      : f_(f), bounds_(bounds), options_(options), result_(result) {}

  bool exhausted() const { return result_.evaluations >= options_.max_evaluations; }

  std::vector<double> project(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = bounds_[i].clamp(x[i]);
    return x;
  }

  Vertex operator()(std::vector<double> x) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!bounds_[i].contains(x[i]))
        throw std::logic_error("optimizer evaluated a point outside the bounds");
    double v = f_(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::max();
    ++result_.evaluations;
    if (result_.trace.empty() || v < result_.best_cost) {
      result_.best_cost = v;
      result_.best_x = x;
    }
    result_.trace.push_back({result_.evaluations, x, v, result_.best_cost});
    return {std::move(x), v};
  }

 private:
  const Objective& f_;
  const std::vector<Bounds>& bounds_;
  const SimplexOptions& options_;
  SimplexResult& result_;
};

// Vertex i > 0 displaced along axis i-1, towards the interior when the
// positive step would leave the box.
std::vector<std::vector<double>> initial_simplex(const std::vector<double>& center,
                                                 const std::vector<double>& scale,
                                                 const std::vector<Bounds>& bounds, double step,
                                                 std::mt19937_64* flips) {
  const std::size_t n = center.size();
  std::vector<std::vector<double>> points{center};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p = center;
    double h = step * scale[i];
    if (flips && ((*flips)() & 1u)) h = -h;
    if (!bounds[i].contains(p[i] + h)) h = -h;
    p[i] = bounds[i].clamp(p[i] + h);
    if (p[i] == center[i]) p[i] = bounds[i].clamp(center[i] - h);
    points.push_back(std::move(p));
  }
  return points;
}

double relative_diameter(const std::vector<Vertex>& simplex, const std::vector<double>& scale) {
  double d = 0.0;
  for (std::size_t k = 1; k < simplex.size(); ++k)
    for (std::size_t i = 0; i < scale.size(); ++i)
      d = std::max(d, std::abs(simplex[k].x[i] - simplex[0].x[i]) / scale[i]);
  return d;
}

// One Nelder-Mead descent; returns true when the diameter criterion fired.
bool descend(std::vector<Vertex>& simplex, BoundedObjective& eval, const std::vector<double>& scale,
             double tolerance) {
  const std::size_t n = scale.size();
  const auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  const auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = c[i] + t * (w[i] - c[i]);
    return eval.project(std::move(p));
  };
  order();
  while (true) {
    if (relative_diameter(simplex, scale) < tolerance) return true;
    if (eval.exhausted()) return false;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i] / static_cast<double>(n);
    Vertex& worst = simplex[n];

    Vertex r = eval(along(centroid, worst.x, -1.0));
    if (r.f < simplex[0].f) {
      if (eval.exhausted()) {
        worst = std::move(r);
      } else {
        Vertex e = eval(along(centroid, worst.x, -2.0));
        worst = e.f < r.f ? std::move(e) : std::move(r);
      }
    } else if (r.f < simplex[n - 1].f) {
      worst = std::move(r);
    } else {
      if (eval.exhausted()) return false;
      const bool outside = r.f < worst.f;
      Vertex c = eval(outside ? along(centroid, r.x, 0.5) : along(centroid, worst.x, 0.5));
      if (c.f < std::min(r.f, worst.f)) {
        worst = std::move(c);
      } else {
        for (std::size_t k = 1; k <= n && !eval.exhausted(); ++k)
          simplex[k] = eval(along(simplex[0].x, simplex[k].x, 0.5));
      }
    }
    order();
  }
}

}  // namespace

SimplexResult nelder_mead(const Objective& f, const std::vector<double>& start,
                          const std::vector<Bounds>& bounds, const SimplexOptions& options) {
  const std::size_t n = start.size();
  if (n == 0 || bounds.size() != n) throw std::invalid_argument("start and bounds sizes differ");
  if (options.max_evaluations < static_cast<int>(n) + 1)
    throw std::invalid_argument("evaluation budget smaller than the simplex");
  if (!(options.tolerance > 0) || !(options.initial_step > 0))
    throw std::invalid_argument("tolerance and initial step must be positive");
  std::vector<double> scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(bounds[i].lower < bounds[i].upper)) throw std::invalid_argument("empty bound interval");
    if (!bounds[i].contains(start[i])) throw std::invalid_argument("start point outside the bounds");
    scale[i] = std::max(std::abs(start[i]), 1e-3 * (bounds[i].upper - bounds[i].lower));
  }

  SimplexResult result;
  BoundedObjective eval(f, bounds, options, result);
  std::mt19937_64 flips(options.seed);

  std::vector<double> center = start;
  for (int round = 0; round <= options.restarts && !eval.exhausted(); ++round) {
    const double before = round == 0 ? std::numeric_limits<double>::infinity() : result.best_cost;
    std::vector<Vertex> simplex;
    for (auto& p : initial_simplex(center, scale, bounds, options.initial_step, round ? &flips : nullptr)) {
      if (eval.exhausted()) break;
      simplex.push_back(eval(std::move(p)));
    }
    if (round == 0) result.start_cost = simplex.front().f;
    if (simplex.size() < n + 1) break;
    result.converged = descend(simplex, eval, scale, options.tolerance);
    result.restarts_used = round;
    center = result.best_x;
    // A restart that finds nothing better ends the search.
    if (round > 0 && !(result.best_cost < before)) break;
  }
  return result;
}

void OptimizationProblem::validate() const {
  config.validate();
  pulse.validate();
  if (std::abs(config.duration - pulse.duration) > 1e-12)
    throw std::invalid_argument("config and pulse durations differ");
  for (int i = 0; i < 3; ++i) {
    if (!(bounds[i].lower < bounds[i].upper)) throw std::invalid_argument("empty bound interval");
    if (!bounds[i].contains(start[i])) throw std::invalid_argument("start point outside the bounds");
  }
  if (bounds[0].lower <= 0 || bounds[1].lower < 0 || bounds[2].lower <= 0)
    throw std::invalid_argument("bounds must keep Omega_c > 0, Omega_f >= 0, alpha > 0");
  if (kind == CostKind::Ensemble) noise.validate();
}

CostEvaluation evaluate_cost(const std::array<double, 3>& params, const OptimizationProblem& problem) {
  for (int i = 0; i < 3; ++i)
    if (!problem.bounds[i].contains(params[i]))
      throw std::invalid_argument("cost evaluated outside the bounds");
  SystemConfig config = problem.config;
  TargetPulse pulse = problem.pulse;
  config.omega_c = params[0];
  pulse.omega_f = params[1];
  pulse.alpha = params[2];
  // The gate fixes the rotation and the drive assignment.
  pulse.rotation = problem.gate.rotation;
  config.parity = problem.gate.parity;

  CostEvaluation out;
  std::ostringstream diag;
  diag << "Omega_c/2pi=" << to_mhz(params[0]) << " Omega_f/2pi=" << to_mhz(params[1])
       << " alpha=" << params[2] << ": ";
  try {
    EnsembleOptions options = problem.ensemble;
    options.record_curves = false;
    options.samples = 2;
    options.max_step = problem.max_step;
    double fidelity = 0.0;
    if (problem.kind == CostKind::Deterministic) {
      const ShotResult shot = run_shot(config, pulse, problem.gate, NoiseDraw{}, options);
      if (shot.aborted) throw IntegrationError(shot.error);
      fidelity = shot.fidelity;
    } else {
      fidelity = ensemble_average(config, pulse, problem.noise, problem.gate, options).mean;
    }
    out.cost = std::clamp(1.0 - fidelity, 0.0, 1.0);
  } catch (const std::exception& e) {
    out.cost = 1.0;
    out.penalized = true;
    diag << e.what();
    out.diagnostic = diag.str();
  }
  return out;
}

double cost(const std::array<double, 3>& params, const OptimizationProblem& problem) {
  return evaluate_cost(params, problem).cost;
}

OptimizationResult minimize(const OptimizationProblem& problem, const SimplexOptions& options) {
  problem.validate();
  OptimizationResult out;
  const Objective objective = [&](const std::vector<double>& x) {
    const CostEvaluation c = evaluate_cost({x[0], x[1], x[2]}, problem);
    if (c.penalized) {
      ++out.penalized;
      out.diagnostics.push_back(c.diagnostic);
    }
    return c.cost;
  };
  const std::vector<double> start(problem.start.begin(), problem.start.end());
  const std::vector<Bounds> bounds(problem.bounds.begin(), problem.bounds.end());
  SimplexResult r = nelder_mead(objective, start, bounds, options);
  std::copy(r.best_x.begin(), r.best_x.end(), out.best.begin());
  out.best_cost = r.best_cost;
  out.start_cost = r.start_cost;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  out.failed = out.penalized == r.evaluations;
  out.trace = std::move(r.trace);
  return out;
}

}  // namespace paritygate
