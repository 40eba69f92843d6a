#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "paritygate/config.hpp"
#include "paritygate/io.hpp"

namespace paritygate {

inline const std::vector<std::string> kSubcommands{"simulate", "ensemble", "decay",
                                                   "validate-effective", "optimize", "codes"};

struct RunRequest {
  std::string subcommand;
  RunConfig config;
  std::string out_dir;  // empty: keep files in memory only
  std::optional<std::uint64_t> seed;
  std::optional<int> shots;
  int threads = 0;  // 0: PARITYGATE_THREADS or hardware concurrency
  bool no_vdw = false;
  bool no_stark = false;
  std::vector<std::string> errors;  // codes: replaces the configured list
  bool curves = false;              // ensemble: per-shot fidelity(t)
  std::function<void(const std::string&)> log;  // progress and warnings
};

struct RunReport {
  int exit_code = 0;
  std::string summary_line;
  nlohmann::ordered_json summary;
  std::map<std::string, std::string> files;  // file name -> content
  RunManifest manifest;
};

// Runs one subcommand. Files are written under out_dir when it is set.
RunReport run_subcommand(const RunRequest& request);

// Config after the command-line overrides (seed, shots, vdW, Stark).
RunConfig effective_config(const RunRequest& request);
RunManifest make_manifest(const RunRequest& request, const RunConfig& config);

}  // namespace paritygate
