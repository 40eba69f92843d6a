#include "paritygate/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "paritygate/codes.hpp"
#include "paritygate/digest.hpp"
#include "paritygate/effective.hpp"
#include "paritygate/noise.hpp"

namespace paritygate {

using ojson = nlohmann::ordered_json;

namespace {

std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

void say(const RunRequest& r, const std::string& message) {
  if (r.log) r.log(message);
}

ojson config_record(const RunConfig& c) {
  ojson j;
  j["criterion"] = c.criterion;
  j["description"] = c.description;
  j["gate"] = c.gate_name;
  j["parity"] = std::string(parity_name(c.gate.parity));
  j["omega_c_mhz"] = to_mhz(c.system.omega_c);
  j["detuning_mhz"] = to_mhz(c.system.detuning);
  j["omega_f_mhz"] = to_mhz(c.pulse.omega_f);
  j["alpha"] = c.pulse.alpha;
  j["duration_us"] = c.system.duration;
  j["spacing_um"] = c.system.spacing;
  j["include_vdw"] = c.system.include_vdw;
  j["stark_compensation"] = c.system.stark_compensation;
  j["decay"] = c.decay_enabled;
  j["max_step_us"] = c.integrator.max_step;
  return j;
}

ojson noise_record(const NoiseSpec& n) {
  ojson j;
  ojson channels = ojson::array();
  if (n.position) channels.push_back("position");
  if (n.phase) channels.push_back("phase");
  if (n.amplitude) channels.push_back("amplitude");
  j["channels"] = channels;
  j["position_sigma_nm"] = n.position_sigma_nm;
  j["control_phase_sigma_pi"] = n.control_phase_sigma / std::numbers::pi;
  j["target_phase_sigma_pi"] = n.target_phase_sigma / std::numbers::pi;
  j["control_amplitude_sigma"] = n.control_amplitude_sigma;
  j["target_amplitude_sigma"] = n.target_amplitude_sigma;
  j["beam_sharing"] = std::string(beam_sharing_name(n.sharing));
  j["shots"] = n.shots;
  j["seed"] = n.seed;
  return j;
}

ojson summary_header(const RunConfig& c, const RunManifest& m) {
  ojson j;
  j["schema_version"] = kOutputSchemaVersion;
  j["manifest"] = m.to_json();
  j["config"] = config_record(c);
  return j;
}

std::string short_hash(const RunManifest& m) { return m.hash().substr(0, 12); }

// Ground-state pattern (c1, c2) with target bit t, as a 125-dim index.
int computational_index(int c1, int c2, int t) { return physical_index(4 * c1 + 2 * c2 + t); }

bool acts(const ParityGate& g, int c1, int c2) { return g.acts_on(c1, c2); }

// ---------------------------------------------------------------- simulate

struct TrajectoryRows {
  std::vector<std::vector<double>> rows;
  double idle_deviation = 0.0;
  double max_rydberg = 0.0;
  double max_leak = 0.0;
};

// Columns: t, F, P(c1 c2 t) for the 8 computational states, Rydberg number,
// population outside the computational subspace.
std::vector<std::string> trajectory_columns() {
  std::vector<std::string> cols{"t_us", "fidelity"};
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2)
      for (int t = 0; t < 2; ++t)
        cols.push_back("p_" + std::to_string(c1) + std::to_string(c2) + std::to_string(t));
  cols.push_back("rydberg_number");
  cols.push_back("p_noncomputational");
  return cols;
}

void add_trajectory_row(TrajectoryRows& out, double t, double fidelity, const Eigen::VectorXd& populations,
                        const ParityGate& gate, const Eigen::VectorXd& initial) {
  std::vector<double> row{t, fidelity};
  double computational = 0.0;
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2)
      for (int b = 0; b < 2; ++b) {
        const int i = computational_index(c1, c2, b);
        row.push_back(populations(i));
        computational += populations(i);
        if (!acts(gate, c1, c2))
          out.idle_deviation = std::max(out.idle_deviation, std::abs(populations(i) - initial(i)));
      }
  double rydberg = 0.0;
  const Operator n = rydberg_number();
  for (int i = 0; i < kDim; ++i) rydberg += n(i, i).real() * populations(i);
  row.push_back(rydberg);
  row.push_back(1.0 - computational);
  out.max_rydberg = std::max(out.max_rydberg, rydberg);
  out.max_leak = std::max(out.max_leak, 1.0 - computational);
  out.rows.push_back(std::move(row));
}

struct TrajectoryRun {
  TrajectoryRows rows;
  double fidelity = 0.0;
  double drift = 0.0;
  int steps = 0;
  double dt = 0.0;
};

TrajectoryRun run_trajectory(const RunConfig& c, bool with_decay) {
  const Hamiltonian h = make_hamiltonian(c.system, c.pulse);
  const TimeGrid grid = make_time_grid(h, 0.0, c.pulse.duration, c.integrator.samples, c.integrator.max_step);
  const StateVector psi0 = reference_initial_state();
  const StateVector target = target_state(c.gate, reference_input());
  const Eigen::VectorXd initial = psi0.cwiseAbs2();
  TrajectoryRun run;
  run.steps = grid.steps;
  run.dt = grid.dt();
  if (!with_decay) {
    const auto res = evolve_schrodinger(h, psi0, grid, [&](double t, const StateVector& psi) {
      add_trajectory_row(run.rows, t, std::norm(target.dot(psi)), psi.cwiseAbs2(), c.gate, initial);
    });
    run.fidelity = std::norm(target.dot(res.final_state));
    run.drift = res.max_norm_drift;
  } else {
    const auto res = evolve_lindblad(h, psi0 * psi0.adjoint(), c.decay, grid, [&](double t, const Operator& rho) {
      add_trajectory_row(run.rows, t, fidelity_mixed(rho, target), rho.diagonal().real(), c.gate, initial);
    });
    run.fidelity = fidelity_mixed(res.final_state, target);
    run.drift = res.max_trace_drift;
  }
  return run;
}

RunReport run_simulate(const RunRequest&, const RunConfig& c, RunReport report) {
  const TrajectoryRun run = run_trajectory(c, c.decay_enabled);
  CsvTable csv(trajectory_columns(), report.manifest);
  for (const auto& r : run.rows.rows) csv.add_row(r);

  const double area = envelope_area(c.pulse);
  ojson& s = report.summary;
  s["fidelity"] = run.fidelity;
  s["envelope_area_over_pi"] = area / std::numbers::pi;
  s["envelope_area_exact_over_pi"] = envelope_area_exact(c.pulse) / std::numbers::pi;
  s["idle_population_deviation"] = run.rows.idle_deviation;
  s["max_rydberg_number"] = run.rows.max_rydberg;
  s["max_noncomputational_population"] = run.rows.max_leak;
  s[c.decay_enabled ? "max_trace_drift" : "max_norm_drift"] = run.drift;
  s["steps"] = run.steps;
  s["dt_us"] = run.dt;

  report.files["trajectory.csv"] = csv.str();
  report.files["trajectory.gp"] =
      gnuplot_script("trajectory.csv", "simulate " + c.gate_name, "population / fidelity",
                     {{2, "fidelity"}, {3, "p_000"}, {5, "p_010"}, {7, "p_100"}, {9, "p_110"}, {11, "rydberg"}},
                     report.manifest);
  report.summary_line = "simulate gate=" + c.gate_name + " F=" + fixed(run.fidelity) +
                        " area/pi=" + fixed(area / std::numbers::pi, 4) +
                        " idle_dev=" + fixed(run.rows.idle_deviation, 4) + " steps=" + std::to_string(run.steps);
  return report;
}

// ---------------------------------------------------------------- ensemble

RunReport run_ensemble(const RunRequest& req, const RunConfig& c, RunReport report) {
  EnsembleOptions options = c.ensemble_options(req.threads > 0 ? req.threads : default_thread_count());
  options.record_curves = req.curves;
  const int total = c.noise.shots;
  if (req.log) {
    const int every = std::max(1, total / 10);
    options.progress = [&req, every](int done, int n) {
      if (done % every == 0 || done == n) req.log("  " + std::to_string(done) + "/" + std::to_string(n) + " shots");
    };
  }
  const EnsembleResult result = ensemble_average(c.system, c.pulse, c.noise, c.gate, options);

  CsvTable shots({"shot", "draw_digest", "fidelity", "aborted", "steps"}, report.manifest);
  for (const auto& s : result.shots) {
    shots.add_row(std::vector<std::string>{std::to_string(s.shot), draw_digest(s.draw), format_number(s.fidelity),
                                           s.aborted ? "1" : "0", std::to_string(s.steps)});
    if (s.aborted) say(req, "warning: shot " + std::to_string(s.shot) + " aborted: " + s.error);
  }
  report.files["shots.csv"] = shots.str();

  if (req.curves && !result.shots.empty()) {
    std::vector<std::string> cols{"t_us", "mean"};
    for (const auto& s : result.shots) cols.push_back("shot_" + std::to_string(s.shot));
    CsvTable curves(cols, report.manifest);
    const auto& ref = result.shots.front().times;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      std::vector<double> row{ref[k], 0.0};
      double sum = 0.0;
      int n = 0;
      for (const auto& s : result.shots) {
        const double v = k < s.curve.size() ? s.curve[k] : std::nan("");
        row.push_back(v);
        if (!s.aborted) sum += v, ++n;
      }
      row[1] = n ? sum / n : std::nan("");
      curves.add_row(row);
    }
    report.files["curves.csv"] = curves.str();
    report.files["curves.gp"] = gnuplot_script("curves.csv", "ensemble " + c.gate_name, "fidelity",
                                               {{2, "mean"}}, report.manifest);
  }

  ojson& s = report.summary;
  s["noise"] = noise_record(c.noise);
  s["mean_fidelity"] = result.mean;
  s["stddev"] = result.stddev;
  s["min_fidelity"] = result.min;
  s["max_fidelity"] = result.max;
  s["completed"] = result.completed;
  s["aborted"] = result.aborted;
  s["seed"] = result.seed;
  report.summary_line = "ensemble gate=" + c.gate_name + " mean_F=" + fixed(result.mean) +
                        " std=" + fixed(result.stddev) + " shots=" + std::to_string(result.completed) + "/" +
                        std::to_string(total) + " aborted=" + std::to_string(result.aborted);
  return report;
}

// ---------------------------------------------------------------- decay

RunReport run_decay(const RunRequest& req, const RunConfig& config, RunReport report) {
  RunConfig c = config;
  if (!c.decay_enabled) {
    c.decay_enabled = true;
    say(req, "note: decay section absent or disabled; using the default lifetimes");
  }
  say(req, "  Lindblad run with decay");
  const TrajectoryRun with = run_trajectory(c, true);
  say(req, "  reference run without decay");
  const TrajectoryRun without = run_trajectory(c, false);

  CsvTable csv({"t_us", "fidelity_decay", "fidelity_no_decay", "rydberg_number_decay", "p_noncomputational_decay"},
               report.manifest);
  const std::size_t n = std::min(with.rows.rows.size(), without.rows.rows.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = with.rows.rows[k];
    const auto& b = without.rows.rows[k];
    csv.add_row(std::vector<double>{a[0], a[1], b[1], a[10], a[11]});
  }
  report.files["decay.csv"] = csv.str();
  report.files["decay.gp"] = gnuplot_script("decay.csv", "decay " + c.gate_name, "fidelity",
                                            {{2, "with decay"}, {3, "without decay"}}, report.manifest);
  ojson& s = report.summary;
  s["lifetime_d_us"] = 1.0 / c.decay.gamma_d;
  s["lifetime_p_us"] = 1.0 / c.decay.gamma_p;
  s["branching"] = {c.decay.branch_g0, c.decay.branch_g1, c.decay.branch_m};
  s["fidelity_decay"] = with.fidelity;
  s["fidelity_no_decay"] = without.fidelity;
  s["difference"] = without.fidelity - with.fidelity;
  s["max_trace_drift"] = with.drift;
  s["steps"] = with.steps;
  report.summary_line = "decay gate=" + c.gate_name + " F_decay=" + fixed(with.fidelity) +
                        " F_no_decay=" + fixed(without.fidelity);
  return report;
}

// ---------------------------------------------------------------- validate-effective

double eigenvalue_gap(const Eigen::MatrixXcd& block, const Eigen::VectorXd& closed_form) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
  Eigen::VectorXd want = closed_form;
  std::sort(want.data(), want.data() + want.size());
  return (es.eigenvalues() - want).cwiseAbs().maxCoeff();
}

RunReport run_validate_effective(const RunRequest& req, const RunConfig& c, RunReport report) {
  const GeometrySample geo = nominal_geometry(c.system);
  const double j = geo.dipole[kPair13];
  const double j12 = geo.dipole[kPair12];

  // Exchange blocks at the configured geometry plus random triples.
  ojson blocks = ojson::array();
  double worst_residual = 0.0, worst_eigen = 0.0;
  const Operator h_nominal = exchange_operator(j, j12);
  for (auto b : kExchangeBlocks) {
    double residual = 0.0, eig = 0.0, norm_err = 0.0;
    for (Level idle : {Level::g0, Level::g1}) {
      const auto block = dd_block_spectrum(j, j12, b, idle);
      residual = std::max(residual, eigen_residual(h_nominal, block));
      eig = std::max(eig, eigenvalue_gap(restrict_to(h_nominal, block.basis), block.eigenvalues));
      for (int k = 0; k < block.eigenvectors.cols(); ++k)
        norm_err = std::max(norm_err, std::abs(block.eigenvectors.col(k).norm() - 1.0));
    }
    double random_residual = 0.0, random_eig = 0.0;
    for (int t = 0; t < c.effective.random_triples; ++t) {
      ShotRng rng(c.effective.seed, static_cast<std::uint64_t>(t));
      const double rj = mhz(10.0 + 190.0 * rng.uniform());
      const double rj12 = rj * rng.uniform();
      const Operator h = exchange_operator(rj, rj12);
      for (Level idle : {Level::g0, Level::g1}) {
        const auto block = dd_block_spectrum(rj, rj12, b, idle);
        random_residual = std::max(random_residual, eigen_residual(h, block) / rj);
        random_eig = std::max(random_eig, eigenvalue_gap(restrict_to(h, block.basis), block.eigenvalues) / rj);
      }
    }
    worst_residual = std::max({worst_residual, residual / j, random_residual});
    worst_eigen = std::max({worst_eigen, eig / j, random_eig});
    const auto block = dd_block_spectrum(j, j12, b);
    ojson e;
    e["block"] = std::string(exchange_block_name(b));
    std::vector<double> ev(block.eigenvalues.data(), block.eigenvalues.data() + block.eigenvalues.size());
    for (double& v : ev) v = to_mhz(v);
    e["eigenvalues_mhz"] = ev;
    e["max_eigen_residual_rel"] = residual / j;
    e["max_eigenvalue_error_rel"] = eig / j;
    e["eigenvector_norm_error"] = norm_err;
    e["random_triples"] = c.effective.random_triples;
    e["random_max_eigen_residual_rel"] = random_residual;
    e["random_max_eigenvalue_error_rel"] = random_eig;
    blocks.push_back(e);
  }

  // Omega_c block: bare coupling (eigenvalues 0, -+sqrt2 Omega_c) versus the
  // coupling Omega_c/sqrt2 written for the exchange-dressed states.
  const auto describe = [](const DressingBlock& d) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(d.coupling);
    double residual = 0.0;
    for (int k = 0; k < 3; ++k)
      residual = std::max(residual, (d.coupling * d.eigenvectors.col(k) - d.eigenvalues(k) * d.eigenvectors.col(k)).norm());
    Eigen::Vector3d want = d.eigenvalues;
    std::sort(want.data(), want.data() + 3);
    ojson o;
    o["eigenvalues_mhz"] = {to_mhz(d.eigenvalues(0)), to_mhz(d.eigenvalues(1)), to_mhz(d.eigenvalues(2))};
    o["eigen_residual"] = residual;
    o["numeric_eigenvalues_mhz"] = {to_mhz(es.eigenvalues()(0)), to_mhz(es.eigenvalues()(1)), to_mhz(es.eigenvalues()(2))};
    o["max_eigenvalue_error"] = (es.eigenvalues() - want).cwiseAbs().maxCoeff();
    return o;
  };
  ojson dressing;
  dressing["omega_c_mhz"] = to_mhz(c.system.omega_c);
  dressing["bare_coupling"] = describe(omega_c_block_spectrum(c.system.omega_c));
  dressing["half_coupling"] = describe(omega_c_dressed_block(c.system.omega_c));
  dressing["note"] =
      "eigenvalues -+sqrt2*Omega_c hold for coupling Omega_c to |D0P> and |0DP>; the coupling Omega_c/sqrt2 "
      "to the exchange-dressed states gives -+Omega_c";

  // Dynamics: full vs reduced model.
  say(req, "  full vs reduced dynamics");
  const DynamicsComparison cmp = compare_dynamics(c.system, c.pulse, reference_input(), c.gate, c.integrator.samples);
  CsvTable csv({"t_us", "fidelity_original", "fidelity_effective"}, report.manifest);
  for (std::size_t k = 0; k < cmp.times.size(); ++k)
    csv.add_row(std::vector<double>{cmp.times[k], cmp.fidelity_original[k], cmp.fidelity_effective[k]});
  report.files["comparison.csv"] = csv.str();
  report.files["comparison.gp"] =
      gnuplot_script("comparison.csv", "original vs effective " + c.gate_name, "fidelity",
                     {{2, "original"}, {3, "effective"}}, report.manifest);

  // Reduced propagator vs the ideal gate on the computational block.
  const Operator u = effective_propagator(c.pulse, c.gate.parity);
  const double gate_overlap =
      phase_insensitive_overlap(u.topLeftCorner(8, 8), Eigen::MatrixXcd(c.gate.unitary));

  const ConditionCheck cond = check_conditions(c.system, c.pulse, c.effective.threshold);
  ojson conditions;
  conditions["detuning_over_omega_c"] = cond.detuning_over_omega_c;
  conditions["omega_c_over_omega"] = cond.omega_c_over_omega;
  conditions["detuning_over_omega"] = cond.detuning_over_omega;
  conditions["exchange_over_detuning"] = cond.exchange_over_detuning;
  conditions["threshold"] = cond.threshold;
  conditions["operative_hierarchy"] = "J = Delta >> Omega_c >> Omega";
  conditions["operative_hierarchy_met"] = cond.strong_dressing;
  conditions["alternative_hierarchy"] = "J = Delta >> {Omega, Omega_c}";
  conditions["alternative_hierarchy_met"] = cond.weak_drive;
  conditions["hierarchies_disagree"] = cond.strong_dressing != cond.weak_drive;

  ojson& s = report.summary;
  s["exchange_blocks"] = blocks;
  s["max_eigen_residual_rel"] = worst_residual;
  s["max_eigenvalue_error_rel"] = worst_eigen;
  s["omega_c_block"] = dressing;
  s["dynamics"] = {{"max_gap", cmp.max_gap},
                   {"endpoint_gap", cmp.endpoint_gap},
                   {"fidelity_original", cmp.fidelity_original.back()},
                   {"fidelity_effective", cmp.fidelity_effective.back()}};
  s["effective_propagator_gate_overlap"] = gate_overlap;
  s["envelope_area_over_pi"] = envelope_area_exact(c.pulse) / std::numbers::pi;
  s["conditions"] = conditions;
  report.summary_line = "validate-effective gate=" + c.gate_name + " residual=" + format_number(worst_residual) +
                        " endpoint_gap=" + fixed(cmp.endpoint_gap) + " max_gap=" + fixed(cmp.max_gap) +
                        " hierarchy_met=" + (cond.strong_dressing ? "yes" : "no");
  return report;
}

// ---------------------------------------------------------------- optimize

RunReport run_optimize(const RunRequest& req, const RunConfig& c, RunReport report) {
  OptimizationProblem problem = c.optimization_problem();
  problem.ensemble.threads = req.threads > 0 ? req.threads : default_thread_count();
  const OptimizationResult r = minimize(problem, c.optimize.simplex);
  CsvTable trace({"evaluation", "omega_c_mhz", "omega_f_mhz", "alpha", "cost", "best_cost"}, report.manifest);
  for (const auto& p : r.trace)
    trace.add_row(std::vector<double>{static_cast<double>(p.evaluation), to_mhz(p.x[0]), to_mhz(p.x[1]), p.x[2],
                                      p.cost, p.best_cost});
  report.files["trace.csv"] = trace.str();
  for (const auto& d : r.diagnostics) say(req, "penalized evaluation: " + d);

  ojson& s = report.summary;
  s["objective"] = c.optimize.objective == CostKind::Deterministic ? "deterministic" : "ensemble";
  if (c.optimize.objective == CostKind::Ensemble) s["noise"] = noise_record(c.noise);
  s["start"] = {{"omega_c_mhz", to_mhz(problem.start[0])}, {"omega_f_mhz", to_mhz(problem.start[1])},
                {"alpha", problem.start[2]}};
  s["best"] = {{"omega_c_mhz", to_mhz(r.best[0])}, {"omega_f_mhz", to_mhz(r.best[1])}, {"alpha", r.best[2]}};
  s["start_cost"] = r.start_cost;
  s["best_cost"] = r.best_cost;
  s["evaluations"] = r.evaluations;
  s["penalized"] = r.penalized;
  s["converged"] = r.converged;
  s["failed"] = r.failed;
  report.summary_line = "optimize gate=" + c.gate_name + " best_cost=" + fixed(r.best_cost) +
                        " start_cost=" + fixed(r.start_cost) + " evals=" + std::to_string(r.evaluations) +
                        " Omega_c/2pi=" + fixed(to_mhz(r.best[0]), 4) + " Omega_f/2pi=" + fixed(to_mhz(r.best[1]), 4) +
                        " alpha=" + fixed(r.best[2], 4);
  if (r.failed) {
    report.exit_code = 3;
    report.summary_line += " FAILED (every evaluation penalized)";
  }
  return report;
}

// ---------------------------------------------------------------- codes

RunReport run_codes(const RunRequest& req, const RunConfig& c, RunReport report) {
  const std::vector<std::string> errors = req.errors.empty() ? c.codes.errors : req.errors;
  CsvTable csv({"error", "stabilizer", "outcome", "syndrome", "probability", "expected"}, report.manifest);
  ojson rows = ojson::array();
  bool all_match = true;
  std::string compact;
  if (c.codes.code == "repetition") {
    for (const auto& text : errors) {
      const PauliError e = parse_pauli_error(text);
      QubitRegister reg = encode_repetition(c.codes.a, c.codes.b);
      apply_pauli_error(reg, e);
      const SyndromeRecord r = repetition_detect(reg);
      // Odd pair count: 0 or 2 for any bit-flip pattern; two odd pairs read -1.
      int odd = 0;
      for (auto [a, b] : {std::pair{1, 2}, {2, 3}, {1, 3}}) {
        int flips = 0;
        for (const auto& t : e.terms)
          if ((t.pauli == 'X' || t.pauli == 'Y') && (t.qubit == a || t.qubit == b)) ++flips;
        odd += flips % 2;
      }
      const int expected = odd == 2 ? -1 : 1;
      all_match = all_match && expected == r.syndrome;
      csv.add_row(std::vector<std::string>{e.label(), r.stabilizer, std::to_string(r.outcome),
                                           std::to_string(r.syndrome), format_number(r.probability),
                                           std::to_string(expected)});
      rows.push_back({{"error", e.label()}, {"syndrome", r.syndrome}, {"probability", r.probability}});
      compact += " " + e.label() + ":" + (r.syndrome > 0 ? "+1" : "-1");
    }
  } else {
    const CodeLayout layout = load_layout(c.codes.layout);
    for (const auto& text : errors) {
      const PauliError e = parse_pauli_error(text);
      QubitRegister reg = codespace_state(layout);
      if (!c.codes.logical.empty()) apply_pauli_string(reg, c.codes.logical);
      const auto recs = xzzx_round(reg, layout, e);
      const auto expected = expected_syndromes(layout, e);
      ojson syndromes = ojson::array();
      std::string pattern;
      for (std::size_t k = 0; k < recs.size(); ++k) {
        all_match = all_match && recs[k].syndrome == expected[k];
        csv.add_row(std::vector<std::string>{e.label(), recs[k].stabilizer, std::to_string(recs[k].outcome),
                                             std::to_string(recs[k].syndrome), format_number(recs[k].probability),
                                             std::to_string(expected[k])});
        syndromes.push_back(recs[k].syndrome);
        pattern += recs[k].syndrome > 0 ? '+' : '-';
      }
      rows.push_back({{"error", e.label()}, {"syndromes", syndromes}});
      compact += " " + e.label() + ":" + pattern;
    }
    report.summary["layout"] = layout.name;
    report.summary["stabilizers"] = [&] {
      ojson a = ojson::array();
      for (const auto& st : layout.stabilizers) a.push_back(st.label);
      return a;
    }();
  }
  report.files["syndromes.csv"] = csv.str();
  report.summary["code"] = c.codes.code;
  report.summary["results"] = rows;
  report.summary["all_match_expected"] = all_match;
  report.summary_line = "codes " + c.codes.code + compact;
  return report;
}

}  // namespace

RunConfig effective_config(const RunRequest& request) {
  RunConfig c = request.config;
  if (request.seed) c.noise.seed = *request.seed;
  if (request.shots) {
    if (*request.shots < 1) throw ConfigError("--shots", "must be >= 1");
    c.noise.shots = *request.shots;
  }
  if (request.no_vdw) c.system.include_vdw = false;
  if (request.no_stark) c.system.stark_compensation = false;
  return c;
}

RunManifest make_manifest(const RunRequest& request, const RunConfig& config) {
  RunManifest m;
  m.subcommand = request.subcommand;
  m.config_path = config.source_path;
  m.config_hash = git_blob_sha1(config.source_text);
  m.output_dir = request.out_dir;
  m.seed = config.noise.seed;
  m.shots = config.noise.shots;
  if (request.no_vdw) m.flags.push_back("no-vdw");
  if (request.no_stark) m.flags.push_back("no-stark");
  if (request.curves) m.flags.push_back("curves");
  for (const auto& e : request.errors) m.flags.push_back("error=" + e);
  return m;
}

RunReport run_subcommand(const RunRequest& request) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), request.subcommand) == kSubcommands.end())
    throw std::invalid_argument("unknown subcommand '" + request.subcommand + "'");
  const RunConfig c = effective_config(request);
  RunReport report;
  report.manifest = make_manifest(request, c);
  report.summary = summary_header(c, report.manifest);

  if (request.subcommand == "simulate") report = run_simulate(request, c, std::move(report));
  else if (request.subcommand == "ensemble") report = run_ensemble(request, c, std::move(report));
  else if (request.subcommand == "decay") report = run_decay(request, c, std::move(report));
  else if (request.subcommand == "validate-effective") report = run_validate_effective(request, c, std::move(report));
  else if (request.subcommand == "optimize") report = run_optimize(request, c, std::move(report));
  else report = run_codes(request, c, std::move(report));

  const std::string name = request.subcommand == "validate-effective" ? "report.json" : "summary.json";
  report.files[name] = json_text(report.summary);
  report.summary_line += " manifest=" + short_hash(report.manifest);
  if (!request.out_dir.empty())
    for (const auto& [file, content] : report.files)
      write_file((std::filesystem::path(request.out_dir) / file).string(), content);
  return report;
}

}  // namespace paritygate
