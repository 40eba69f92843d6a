#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace paritygate {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kOutputSchemaVersion = 1;

// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

struct RunManifest {
  std::string subcommand;
  std::string config_path;
  std::string config_hash;  // git blob SHA-1 of the config bytes
  std::string output_dir;
  std::uint64_t seed = 0;
  int shots = 0;
  std::vector<std::string> flags;  // overrides such as "no-vdw", sorted
  std::string version = kToolVersion;

  // SHA-1 over the content fields (hash, subcommand, seed, shots, flags,
  // version); paths and thread counts do not enter.
  std::string hash() const;
  nlohmann::ordered_json to_json() const;
};

// Column-oriented CSV with a "# key: value" preamble carrying the manifest.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> columns, const RunManifest& manifest);
  void add_row(const std::vector<std::string>& cells);
  void add_row(const std::vector<double>& values);
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::string preamble_;
  std::string body_;
};

// gnuplot script plotting columns of a CSV file against the first one.
std::string gnuplot_script(const std::string& csv_name, const std::string& title, const std::string& ylabel,
                           const std::vector<std::pair<int, std::string>>& series, const RunManifest& manifest);

// JSON text with a trailing newline; objects keep insertion order.
std::string json_text(const nlohmann::ordered_json& j);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace paritygate
