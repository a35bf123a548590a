#pragma once

// Exact pure-state simulation for small registers.
//
// Qubit 0 is the least significant bit of the basis index. Rotations follow
// R_P(theta) = exp(-i theta P / 2) and U3(a, b, c) = RZ(c) RX(b) RZ(a).

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hqrc/rng.hpp"

namespace hqrc {

using Complex = std::complex<double>;

inline constexpr unsigned kMaxQubits = 14;

enum class Pauli : std::uint8_t { X = 0, Y = 1, Z = 2 };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

enum class GateKind : std::uint8_t { RX, RY, RZ, U3, CX };

struct GateOp {
  GateKind kind = GateKind::RX;
  // Rotations use targets[0]; CX uses (control, target).
  std::array<unsigned, 2> targets{0, 0};
  std::array<double, 3> angles{0.0, 0.0, 0.0};

  static GateOp rotation(Pauli axis, unsigned qubit, double theta);
  static GateOp rx(unsigned q, double theta) { return {GateKind::RX, {q, 0}, {theta, 0, 0}}; }
  static GateOp ry(unsigned q, double theta) { return {GateKind::RY, {q, 0}, {theta, 0, 0}}; }
  static GateOp rz(unsigned q, double theta) { return {GateKind::RZ, {q, 0}, {theta, 0, 0}}; }
  static GateOp u3(unsigned q, double a, double b, double c) {
    return {GateKind::U3, {q, 0}, {a, b, c}};
  }
  static GateOp cx(unsigned control, unsigned target) {
    return {GateKind::CX, {control, target}, {0, 0, 0}};
  }

  bool is_rotation() const { return kind != GateKind::CX; }
  unsigned angle_count() const {
    return kind == GateKind::CX ? 0 : (kind == GateKind::U3 ? 3 : 1);
  }

  friend bool operator==(const GateOp&, const GateOp&) = default;
};

std::string to_string(const GateOp& gate);

/// 2x2 unitary of a single-qubit gate, row-major.
std::array<Complex, 4> gate_matrix(const GateOp& gate);

class StateVector {
 public:
  /// |0...0> on n_qubits. Throws ConfigError outside [1, kMaxQubits].
  explicit StateVector(unsigned n_qubits);

  unsigned n_qubits() const { return n_qubits_; }
  std::size_t size() const { return amps_.size(); }

  std::span<const Complex> amplitudes() const { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  /// Replace all amplitudes; the vector must have 2^n entries.
  void set_amplitudes(std::vector<Complex> amps);

  void reset();
  void apply(const GateOp& gate);
  void apply(std::span<const GateOp> gates);

  double norm_squared() const;
  /// Born probabilities in the computational basis.
  std::vector<double> probabilities() const;

 private:
  void apply_single(unsigned q, const std::array<Complex, 4>& m);
  void apply_diagonal(unsigned q, Complex d0, Complex d1);
  void apply_cx(unsigned control, unsigned target);
  void check_qubit(unsigned q) const;

  unsigned n_qubits_;
  std::vector<Complex> amps_;
};

StateVector init_state(unsigned n_qubits);

/// Returns a copy of `state` with `gate` applied.
StateVector apply_gate(StateVector state, const GateOp& gate);

/// Same-axis Pauli product on 1 to 3 qubits, e.g. X0 X3.
class PauliString {
 public:
  PauliString(Pauli axis, std::vector<unsigned> qubits);

  Pauli axis() const { return axis_; }
  std::span<const unsigned> qubits() const { return qubits_; }
  std::size_t order() const { return qubits_.size(); }
  std::uint64_t mask() const { return mask_; }
  std::string label() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.axis_ == b.axis_ && a.qubits_ == b.qubits_;
  }

 private:
  Pauli axis_;
  std::vector<unsigned> qubits_;
  std::uint64_t mask_ = 0;
};

/// Exact <psi|P|psi>, evaluated from the amplitudes.
double expectation(const StateVector& state, const PauliString& obs);

/// Gates that rotate the `axis` eigenbasis onto the computational basis
/// (+1 eigenvalue -> bit 0). X: RY(-pi/2), Y: RX(pi/2), Z: none.
std::vector<GateOp> basis_change(unsigned n_qubits, Pauli axis);

/// Born distribution after the basis change for `axis`.
std::vector<double> basis_probabilities(const StateVector& state, Pauli axis);

/// Signed parity sum  sum_b w[b] (-1)^{popcount(b & mask)}.
double parity_expectation(std::span<const double> weights, std::uint64_t mask);

/// In-place Walsh-Hadamard transform: w[mask] <- parity_expectation(w, mask)
/// for every mask at once. Size must be a power of two.
void walsh_hadamard(std::span<double> w);

/// Bitstring (qubit 0 = bit 0) -> number of occurrences.
using CountTable = std::map<std::uint64_t, std::uint64_t>;

/// Draw `shots` samples in the given basis. Multinomial sampling through
/// sequential conditional binomials, so cost is independent of `shots`.
CountTable sample_basis(const StateVector& state, Pauli axis, std::uint64_t shots, Rng& rng);

/// Dense counts (length 2^n) for the same draw as sample_basis.
std::vector<std::uint64_t> sample_distribution(std::span<const double> probs,
                                               std::uint64_t shots, Rng& rng);

/// Mean over shots of the product of +-1 outcomes on obs's qubits.
/// Throws UsageError on an empty table.
double estimate_from_counts(const CountTable& counts, const PauliString& obs);

/// Adds an independent N(0, sigma^2) draw to every rotation angle. CX gates
/// pass through; sigma == 0 returns the input without touching rng.
std::vector<GateOp> perturb_angles(std::span<const GateOp> gates, double sigma, Rng& rng);

}  // namespace hqrc
