#include "paritygate/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "paritygate/digest.hpp"

namespace paritygate {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string RunManifest::hash() const {
  std::vector<std::string> sorted = flags;
  std::sort(sorted.begin(), sorted.end());
  std::ostringstream os;
  os << "config " << config_hash << '\n'
     << "subcommand " << subcommand << '\n'
     << "seed " << seed << '\n'
     << "shots " << shots << '\n'
     << "version " << version << '\n';
  for (const auto& f : sorted) os << "flag " << f << '\n';
  return sha1_hex(os.str());
}

nlohmann::ordered_json RunManifest::to_json() const {
  std::vector<std::string> sorted = flags;
  std::sort(sorted.begin(), sorted.end());
  nlohmann::ordered_json j;
  j["hash"] = hash();
  j["subcommand"] = subcommand;
  j["config_path"] = config_path;
  j["config_hash"] = config_hash;
  j["output_dir"] = output_dir;
  j["seed"] = seed;
  j["shots"] = shots;
  j["flags"] = sorted;
  j["version"] = version;
  return j;
}

CsvTable::CsvTable(std::vector<std::string> columns, const RunManifest& manifest)
    : columns_(std::move(columns)) {
  std::ostringstream os;
  os << "# paritygate " << manifest.version << " " << manifest.subcommand << '\n'
     << "# manifest: " << manifest.hash() << '\n'
     << "# config_hash: " << manifest.config_hash << '\n'
     << "# seed: " << manifest.seed << '\n';
  for (std::size_t k = 0; k < columns_.size(); ++k) os << (k ? "," : "") << columns_[k];
  os << '\n';
  preamble_ = os.str();
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw std::invalid_argument("CSV row width mismatch");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].find_first_of(",\"\n") != std::string::npos)
      throw std::invalid_argument("CSV cell needs quoting: " + cells[k]);
    body_ += (k ? "," : "") + cells[k];
  }
  body_ += '\n';
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(cells);
}

std::string CsvTable::str() const { return preamble_ + body_; }

std::string gnuplot_script(const std::string& csv_name, const std::string& title, const std::string& ylabel,
                           const std::vector<std::pair<int, std::string>>& series, const RunManifest& manifest) {
  std::ostringstream os;
  os << "# manifest: " << manifest.hash() << '\n'
     << "set datafile separator ','\n"
     << "set datafile commentschars '#'\n"
     << "set key autotitle columnhead\n"
     << "set title '" << title << "'\n"
     << "set xlabel 't (us)'\n"
     << "set ylabel '" << ylabel << "'\n"
     << "set grid\n"
     << "plot ";
  for (std::size_t k = 0; k < series.size(); ++k)
    os << (k ? ", \\\n     " : "") << "'" << csv_name << "' using 1:" << series[k].first << " with lines title '"
       << series[k].second << "'";
  os << '\n';
  return os.str();
}

std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace paritygate
