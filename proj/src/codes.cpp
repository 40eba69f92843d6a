#include "paritygate/codes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace paritygate {

namespace {

constexpr int kMaxQubits = 10;
constexpr double kZeroProbability = 1e-12;

Eigen::Matrix2cd pauli_matrix(char p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument(std::string("unknown Pauli '") + p + "'");
  }
  return m;
}

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

// "X1Z3", "X1 Z3" -> terms with 1-based qubits.
std::vector<PauliTerm> parse_terms(std::string_view text) {
  std::vector<PauliTerm> terms;
  std::size_t i = 0;
  const auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*')) ++i;
  };
  skip();
  while (i < text.size()) {
    const char p = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
    if (p != 'I' && p != 'X' && p != 'Y' && p != 'Z')
      throw std::invalid_argument("malformed Pauli label '" + std::string(text) + "'");
    ++i;
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) {
      if (p == 'I' && terms.empty()) {
        skip();
        if (i == text.size()) return {};
      }
      throw std::invalid_argument("Pauli '" + std::string(1, p) + "' needs a qubit index in '" +
                                  std::string(text) + "'");
    }
    const int q = std::stoi(std::string(text.substr(start, i - start)));
    if (q < 1) throw std::invalid_argument("qubit indices are 1-based");
    terms.push_back({p, q});
    skip();
  }
  return terms;
}

std::string format_terms(const std::vector<PauliTerm>& terms) {
  if (terms.empty()) return "I";
  std::string s;
  for (const auto& t : terms) s += t.pauli + std::to_string(t.qubit);
  return s;
}

}  // namespace

QubitRegister::QubitRegister(int n, std::vector<std::string> labels) : n_(n), labels_(std::move(labels)) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("register size must be 1..10");
  if (labels_.empty())
    for (int q = 0; q < n; ++q) labels_.push_back("q" + std::to_string(q));
  if (static_cast<int>(labels_.size()) != n) throw std::invalid_argument("one label per qubit required");
  state_ = Eigen::VectorXcd::Zero(1 << n);
  state_(0) = 1.0;
}

void QubitRegister::set_state(const Eigen::VectorXcd& psi) {
  if (psi.size() != state_.size()) throw std::invalid_argument("state dimension mismatch");
  if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) throw std::invalid_argument("state must be normalized");
  state_ = psi;
}

int QubitRegister::index_of(std::string_view label) const {
  for (int q = 0; q < n_; ++q)
    if (labels_[q] == label) return q;
  throw std::invalid_argument("no qubit labelled '" + std::string(label) + "'");
}

void QubitRegister::apply_1q(const Eigen::Matrix2cd& u, int q) {
  if (q < 0 || q >= n_) throw std::out_of_range("qubit index out of range");
  const int mask = 1 << bit(q);
  for (int i = 0; i < state_.size(); ++i) {
    if (i & mask) continue;
    const Complex a = state_(i), b = state_(i | mask);
    state_(i) = u(0, 0) * a + u(0, 1) * b;
    state_(i | mask) = u(1, 0) * a + u(1, 1) * b;
  }
}

void QubitRegister::apply_3q(const Eigen::Matrix<Complex, 8, 8>& u, int a, int b, int c) {
  for (int q : {a, b, c})
    if (q < 0 || q >= n_) throw std::out_of_range("qubit index out of range");
  if (a == b || a == c || b == c) throw std::invalid_argument("gate qubits must differ");
  const std::array<int, 3> masks{1 << bit(a), 1 << bit(b), 1 << bit(c)};
  const int all = masks[0] | masks[1] | masks[2];
  Eigen::Matrix<Complex, 8, 1> local;
  std::array<int, 8> index{};
  for (int base = 0; base < state_.size(); ++base) {
    if (base & all) continue;
    for (int k = 0; k < 8; ++k) {
      index[k] = base | ((k & 4) ? masks[0] : 0) | ((k & 2) ? masks[1] : 0) | ((k & 1) ? masks[2] : 0);
      local(k) = state_(index[k]);
    }
    local = u * local;
    for (int k = 0; k < 8; ++k) state_(index[k]) = local(k);
  }
}

void QubitRegister::apply_pauli(char pauli, int q) {
  if (pauli == 'I') {
    if (q < 0 || q >= n_) throw std::out_of_range("qubit index out of range");
    return;
  }
  apply_1q(pauli_matrix(pauli), q);
}

double QubitRegister::probability_one(int q) const {
  if (q < 0 || q >= n_) throw std::out_of_range("qubit index out of range");
  const int mask = 1 << bit(q);
  double p = 0.0;
  for (int i = 0; i < state_.size(); ++i)
    if (i & mask) p += std::norm(state_(i));
  return p;
}

QubitRegister::Measurement QubitRegister::measure(int q, std::optional<int> forced) {
  Measurement m;
  m.p_one = probability_one(q);
  m.outcome = forced ? *forced : (m.p_one > 0.5 ? 1 : 0);
  if (m.outcome != 0 && m.outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");
  m.probability = m.outcome ? m.p_one : 1.0 - m.p_one;
  if (m.probability < kZeroProbability) throw std::domain_error("forced outcome has zero probability");
  const int mask = 1 << bit(q);
  for (int i = 0; i < state_.size(); ++i)
    if (static_cast<bool>(i & mask) != static_cast<bool>(m.outcome)) state_(i) = 0.0;
  state_ /= std::sqrt(m.probability);
  return m;
}

void QubitRegister::reset(int q) {
  if (measure(q).outcome == 1) apply_pauli('X', q);
}

std::string PauliError::label() const { return format_terms(terms); }

PauliError parse_pauli_error(std::string_view text) { return {parse_terms(text)}; }

void apply_pauli_error(QubitRegister& reg, const PauliError& error) {
  for (const auto& t : error.terms) {
    if (t.qubit < 1 || t.qubit > reg.size()) throw std::out_of_range("error qubit index out of range");
    reg.apply_pauli(t.pauli, t.qubit - 1);
  }
}

void apply_pauli_string(QubitRegister& reg, std::string_view label) {
  apply_pauli_error(reg, parse_pauli_error(label));
}

double pauli_expectation(const QubitRegister& reg, std::string_view label) {
  QubitRegister copy = reg;
  apply_pauli_string(copy, label);
  return reg.state().dot(copy.state()).real();
}

bool paulis_commute(std::string_view a, std::string_view b) {
  int anti = 0;
  for (const auto& x : parse_terms(a))
    for (const auto& y : parse_terms(b))
      if (x.qubit == y.qubit && x.pauli != 'I' && y.pauli != 'I' && x.pauli != y.pauli) ++anti;
  return anti % 2 == 0;
}

QubitRegister encode_repetition(Complex a, Complex b) {
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-10)
    throw std::invalid_argument("|A|^2 + |B|^2 must equal 1");
  QubitRegister reg(4, {"D1", "D2", "D3", "A1"});
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
  psi(0b0000) = a;
  psi(0b1110) = b;
  reg.set_state(psi);
  return reg;
}

namespace {

void require_fresh_ancilla(const QubitRegister& reg, int ancilla) {
  if (reg.probability_one(ancilla) > kZeroProbability)
    throw std::invalid_argument("ancilla must be prepared in |0>");
}

SyndromeRecord read_out(QubitRegister& reg, int ancilla, std::string label) {
  const auto m = reg.measure(ancilla);
  SyndromeRecord r;
  r.stabilizer = std::move(label);
  r.outcome = m.outcome;
  r.syndrome = m.outcome ? -1 : 1;
  r.probability = m.probability;
  r.state = reg.state();
  return r;
}

}  // namespace

SyndromeRecord repetition_detect(QubitRegister& reg, int ancilla) {
  require_fresh_ancilla(reg, ancilla);
  const auto u = po_sqrt_x().unitary;
  reg.apply_3q(u, 0, 1, ancilla);
  reg.apply_3q(u, 1, 2, ancilla);
  reg.apply_3q(u, 0, 2, ancilla);
  return read_out(reg, ancilla, "Z1Z2;Z2Z3;Z1Z3");
}

void Stabilizer::validate() const {
  if (support.empty()) throw std::invalid_argument("stabilizer '" + label + "' has no support");
  std::set<int> sites, paired;
  for (const auto& s : support) {
    if (s.pauli != 'X' && s.pauli != 'Z')
      throw std::invalid_argument("stabilizer '" + label + "': only X and Z sites are supported");
    if (!sites.insert(s.qubit).second)
      throw std::invalid_argument("stabilizer '" + label + "' repeats a qubit");
  }
  if (pairs.size() != 1 && pairs.size() != 2)
    throw std::invalid_argument("stabilizer '" + label + "' needs one or two pairs");
  for (const auto& p : pairs)
    for (int q : p)
      if (!sites.count(q) || !paired.insert(q).second)
        throw std::invalid_argument("stabilizer '" + label + "': pairs must partition the support");
  if (paired.size() != sites.size())
    throw std::invalid_argument("stabilizer '" + label + "': pairs must partition the support");
}

Stabilizer make_stabilizer(std::string_view label, const std::vector<std::array<int, 2>>& pairs) {
  Stabilizer s;
  s.label = std::string(label);
  for (const auto& t : parse_terms(label)) s.support.push_back({t.qubit - 1, t.pauli});
  for (const auto& p : pairs) s.pairs.push_back({p[0] - 1, p[1] - 1});
  s.validate();
  return s;
}

SyndromeRecord measure_stabilizer(QubitRegister& reg, const Stabilizer& s, int ancilla) {
  s.validate();
  for (const auto& site : s.support)
    if (site.qubit == ancilla || site.qubit < 0 || site.qubit >= reg.size())
      throw std::invalid_argument("stabilizer '" + s.label + "' does not fit the register");
  require_fresh_ancilla(reg, ancilla);
  const Eigen::Matrix2cd h = hadamard();
  for (const auto& site : s.support)
    if (site.pauli == 'X') reg.apply_1q(h, site.qubit);
  const ParityGate gate = s.pairs.size() == 2 ? pe_x() : parity_gate(Parity::Odd, {std::numbers::pi, std::numbers::pi / 2, std::numbers::pi});
  for (const auto& p : s.pairs) reg.apply_3q(gate.unitary, p[0], p[1], ancilla);
  for (const auto& site : s.support)
    if (site.pauli == 'X') reg.apply_1q(h, site.qubit);
  SyndromeRecord r = read_out(reg, ancilla, s.label);
  if (r.outcome) reg.apply_pauli('X', ancilla);
  return r;
}

void CodeLayout::validate() const {
  if (data_qubits < 1 || data_qubits + 1 > kMaxQubits)
    throw std::invalid_argument("layout needs 1..9 data qubits");
  if (stabilizers.empty()) throw std::invalid_argument("layout has no stabilizers");
  for (const auto& s : stabilizers) {
    s.validate();
    for (const auto& site : s.support)
      if (site.qubit >= data_qubits)
        throw std::invalid_argument("stabilizer '" + s.label + "' acts outside the data qubits");
  }
  for (std::size_t a = 0; a < stabilizers.size(); ++a)
    for (std::size_t b = a + 1; b < stabilizers.size(); ++b)
      if (!paulis_commute(stabilizers[a].label, stabilizers[b].label))
        throw std::invalid_argument("stabilizers " + stabilizers[a].label + " and " + stabilizers[b].label +
                                    " anticommute");
  for (const auto* logical : {&logical_x, &logical_z}) {
    if (logical->empty()) continue;
    for (const auto& s : stabilizers)
      if (!paulis_commute(*logical, s.label))
        throw std::invalid_argument("logical " + *logical + " anticommutes with " + s.label);
  }
  if (!logical_x.empty() && !logical_z.empty() && paulis_commute(logical_x, logical_z))
    throw std::invalid_argument("logical X and Z must anticommute");
}

CodeLayout xzzx_9_1_3_layout() {
  CodeLayout l;
  l.name = "xzzx_9_1_3";
  l.data_qubits = 9;
  l.stabilizers = {
      make_stabilizer("Z1X2X4Z5", {{{1, 5}}, {{2, 4}}}),
      make_stabilizer("Z2X3X5Z6", {{{2, 6}}, {{3, 5}}}),
      make_stabilizer("Z4X5X7Z8", {{{4, 8}}, {{5, 7}}}),
      make_stabilizer("Z5X6X8Z9", {{{5, 9}}, {{6, 8}}}),
      make_stabilizer("X2Z3", {{{2, 3}}}),
      make_stabilizer("Z7X8", {{{7, 8}}}),
      make_stabilizer("X1Z4", {{{1, 4}}}),
      make_stabilizer("Z6X9", {{{6, 9}}}),
  };
  l.logical_x = "X7Z8X9";
  l.logical_z = "Z1X4Z7";
  l.validate();
  return l;
}

CodeLayout parse_layout(const std::string& json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("layout: invalid JSON: ") + e.what());
  }
  const auto need = [&](const json& node, const char* key, const std::string& where) -> const json& {
    if (!node.contains(key)) throw std::invalid_argument(where + ": missing field '" + key + "'");
    return node.at(key);
  };
  try {
    if (need(j, "schema_version", "layout").get<int>() != 1)
      throw std::invalid_argument("layout.schema_version: only version 1 is supported");
    CodeLayout l;
    l.name = need(j, "name", "layout").get<std::string>();
    l.data_qubits = need(j, "data_qubits", "layout").get<int>();
    const auto& stabs = need(j, "stabilizers", "layout");
    for (std::size_t k = 0; k < stabs.size(); ++k) {
      const std::string where = "layout.stabilizers[" + std::to_string(k) + "]";
      const auto pairs = need(stabs[k], "pairs", where).get<std::vector<std::array<int, 2>>>();
      l.stabilizers.push_back(make_stabilizer(need(stabs[k], "label", where).get<std::string>(), pairs));
    }
    l.logical_x = j.value("logical_x", "");
    l.logical_z = j.value("logical_z", "");
    l.validate();
    return l;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("layout: ") + e.what());
  }
}

CodeLayout load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open layout file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_layout(ss.str());
}

QubitRegister codespace_state(const CodeLayout& layout) {
  layout.validate();
  std::vector<std::string> labels;
  for (int q = 1; q <= layout.data_qubits; ++q) labels.push_back("D" + std::to_string(q));
  labels.push_back("A");
  QubitRegister reg(layout.data_qubits + 1, labels);
  Eigen::VectorXcd psi = reg.state();
  for (const auto& s : layout.stabilizers) {
    QubitRegister tmp = reg;
    tmp.set_state(psi.normalized());
    apply_pauli_string(tmp, s.label);
    psi = 0.5 * (psi.normalized() + tmp.state());
    if (psi.norm() < 1e-9) throw std::runtime_error("|0...0> has no overlap with the codespace");
  }
  reg.set_state(psi.normalized());
  return reg;
}

std::vector<SyndromeRecord> xzzx_round(QubitRegister& reg, const CodeLayout& layout, const PauliError& error) {
  layout.validate();
  if (reg.size() != layout.data_qubits + 1) throw std::invalid_argument("register must hold data + one ancilla");
  for (const auto& t : error.terms)
    if (t.qubit > layout.data_qubits) throw std::out_of_range("error acts outside the data qubits");
  apply_pauli_error(reg, error);
  const int ancilla = layout.data_qubits;
  std::vector<SyndromeRecord> out;
  for (const auto& s : layout.stabilizers) out.push_back(measure_stabilizer(reg, s, ancilla));
  return out;
}

std::vector<int> expected_syndromes(const CodeLayout& layout, const PauliError& error) {
  std::vector<int> out;
  const std::string e = error.label() == "I" ? "" : error.label();
  for (const auto& s : layout.stabilizers) out.push_back(paulis_commute(s.label, e) ? 1 : -1);
  return out;
}

}  // namespace paritygate
