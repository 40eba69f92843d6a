#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "paritygate/app.hpp"
#include "paritygate/noise.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> shots;
  int threads = 0;
  bool no_vdw = false;
  bool no_stark = false;
  std::vector<std::string> errors;
  bool curves = false;
  bool quiet = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory (default out/<subcommand>)");
  sub->add_option("--seed", f.seed, "master seed for noise draws");
  sub->add_option("--shots", f.shots, "number of Monte Carlo shots")->check(CLI::PositiveNumber);
  sub->add_option("--threads", f.threads, "worker threads (default: PARITYGATE_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--no-vdw", f.no_vdw, "drop the van der Waals terms");
  sub->add_flag("--no-stark", f.no_stark, "drop the Stark compensation");
  sub->add_flag("--quiet", f.quiet, "no progress messages on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parity-controlled Rydberg gate simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", paritygate::kToolVersion);
  Flags flags;

  for (const auto& name : paritygate::kSubcommands) {
    CLI::App* sub = nullptr;
    if (name == "simulate") sub = app.add_subcommand(name, "single no-noise trajectory");
    else if (name == "ensemble") sub = app.add_subcommand(name, "Monte Carlo noise ensemble");
    else if (name == "decay") sub = app.add_subcommand(name, "Lindblad run with and without decay");
    else if (name == "validate-effective") sub = app.add_subcommand(name, "effective-model validation report");
    else if (name == "optimize") sub = app.add_subcommand(name, "pulse-parameter optimization");
    else sub = app.add_subcommand(name, "syndrome extraction table");
    add_common(sub, flags);
    if (name == "ensemble") sub->add_flag("--curves", flags.curves, "write per-shot fidelity(t)");
    if (name == "codes") sub->add_option("--error", flags.errors, "Pauli error, e.g. X2 (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    paritygate::RunRequest req;
    req.subcommand = sub;
    req.config = paritygate::load_config(flags.config);
    req.out_dir = flags.out.empty() ? "out/" + sub : flags.out;
    req.seed = flags.seed;
    req.shots = flags.shots;
    req.threads = flags.threads;
    req.no_vdw = flags.no_vdw;
    req.no_stark = flags.no_stark;
    req.errors = flags.errors;
    req.curves = flags.curves;
    if (!flags.quiet) req.log = [](const std::string& m) { std::cerr << m << '\n'; };

    const auto t0 = std::chrono::steady_clock::now();
    const paritygate::RunReport report = paritygate::run_subcommand(req);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", elapsed);
    std::cout << report.summary_line << " time=" << buf << "s out=" << req.out_dir << '\n';
    return report.exit_code;
  } catch (const paritygate::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const paritygate::EnsembleAborted& e) {
    std::cerr << "ensemble failed: " << e.what() << '\n';
    return 4;
  } catch (const paritygate::StabilityError& e) {
    std::cerr << "integrator refused to run: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
