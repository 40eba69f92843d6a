#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "paritygate/gates.hpp"

namespace paritygate {

// Ideal n-qubit register (n <= 10). Qubit 0 is the most significant bit
// of the basis index.
class QubitRegister {
 public:
  explicit QubitRegister(int n, std::vector<std::string> labels = {});

  int size() const { return n_; }
  const Eigen::VectorXcd& state() const { return state_; }
  void set_state(const Eigen::VectorXcd& psi);
  const std::vector<std::string>& labels() const { return labels_; }
  int index_of(std::string_view label) const;

  void apply_1q(const Eigen::Matrix2cd& u, int q);
  // 8x8 unitary on (a, b, c) with local index 4a + 2b + c.
  void apply_3q(const Eigen::Matrix<Complex, 8, 8>& u, int a, int b, int c);
  // 'I', 'X', 'Y' or 'Z'.
  void apply_pauli(char pauli, int q);

  // Probability of reading 1 on qubit q.
  double probability_one(int q) const;
  struct Measurement {
    int outcome = 0;
    double probability = 1.0;  // of the reported outcome
    double p_one = 0.0;
  };
  // Exact projective measurement: the more likely outcome (0 on ties), or
  // `forced` when given. Throws if the forced outcome has probability 0.
  Measurement measure(int q, std::optional<int> forced = std::nullopt);
  // Measure then flip to |0>.
  void reset(int q);

 private:
  int bit(int q) const { return n_ - 1 - q; }

  int n_;
  Eigen::VectorXcd state_;
  std::vector<std::string> labels_;
};

// Single-qubit Pauli on a 1-based data qubit, e.g. "X2".
struct PauliTerm {
  char pauli = 'I';
  int qubit = 0;  // 1-based
};
// Product of single-qubit Paulis: "I", "X2", "X1Z3" (or "X1 Z3").
struct PauliError {
  std::vector<PauliTerm> terms;
  std::string label() const;
};
PauliError parse_pauli_error(std::string_view text);
// Applies the error to data qubits (1-based index i -> register qubit i - 1).
void apply_pauli_error(QubitRegister& reg, const PauliError& error);

struct SyndromeRecord {
  std::string stabilizer;
  int outcome = 0;          // ancilla bit
  int syndrome = 1;         // +1 for outcome 0, -1 for outcome 1
  double probability = 1.0; // of the recorded outcome
  Eigen::VectorXcd state;   // register after the measurement
};

// A|000> + B|111> on D1..D3, ancilla A1 (qubit 3) in |0>.
QubitRegister encode_repetition(Complex a, Complex b);
// Three PO-sqrtX gates with controls (D1,D2), (D2,D3), (D1,D3) on the
// shared ancilla, then one ancilla readout. The ancilla is left measured.
SyndromeRecord repetition_detect(QubitRegister& reg, int ancilla = 3);

struct PauliSite {
  int qubit = 0;  // 0-based register index
  char pauli = 'Z';
};

// Check measured by parity gates on pairs of its support; the pairs
// partition the support.
struct Stabilizer {
  std::string label;
  std::vector<PauliSite> support;
  std::vector<std::array<int, 2>> pairs;  // register indices

  void validate() const;
};

// Stabilizer from a compact label such as "Z1X2X4Z5" (1-based data qubits)
// and pairs given as 1-based data indices.
Stabilizer make_stabilizer(std::string_view label, const std::vector<std::array<int, 2>>& pairs);

// X-type sites are rotated to the Z basis by Hadamards around the gates.
// Two pairs: two PE-X gates (ancilla flips once per even pair). One pair:
// one PO-X gate = U_O(pi, pi/2, pi) (flips on an odd pair). Either way the
// ancilla reads 1 exactly when the check is -1. The ancilla must be |0>
// on entry; it is reset to |0> afterwards.
SyndromeRecord measure_stabilizer(QubitRegister& reg, const Stabilizer& s, int ancilla);

struct CodeLayout {
  std::string name;
  int data_qubits = 0;
  std::vector<Stabilizer> stabilizers;
  std::string logical_x;  // compact labels, e.g. "X7Z8X9"
  std::string logical_z;

  void validate() const;
};

// Built-in [[9,1,3]] XZZX layout (matches configs/layouts/xzzx_9_1_3.json).
CodeLayout xzzx_9_1_3_layout();
CodeLayout load_layout(const std::string& path);
CodeLayout parse_layout(const std::string& json_text);

// Applies a compact Pauli label such as "Z1X4Z7" to the register.
void apply_pauli_string(QubitRegister& reg, std::string_view label);
// <psi| P |psi> for a compact Pauli label (real for Hermitian P).
double pauli_expectation(const QubitRegister& reg, std::string_view label);
// True when two compact labels commute.
bool paulis_commute(std::string_view a, std::string_view b);

// Register with `data_qubits` data qubits and one ancilla (last), data in
// the +1 eigenspace of every stabilizer: |0...0> projected and normalized.
QubitRegister codespace_state(const CodeLayout& layout);

// Applies `error`, then extracts every check in layout order with the one
// ancilla (last qubit), resetting it after each readout.
std::vector<SyndromeRecord> xzzx_round(QubitRegister& reg, const CodeLayout& layout,
                                       const PauliError& error = {});

// Expected syndromes from commutation: -1 where the error anticommutes.
std::vector<int> expected_syndromes(const CodeLayout& layout, const PauliError& error);

}  // namespace paritygate
