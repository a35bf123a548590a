#include "hqrc/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hqrc/error.hpp"

namespace hqrc {

char to_char(Pauli p) {
  switch (p) {
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
  }
  throw ConfigError(std::string("unknown Pauli axis '") + c + "'");
}

GateOp GateOp::rotation(Pauli axis, unsigned qubit, double theta) {
  switch (axis) {
    case Pauli::X: return rx(qubit, theta);
    case Pauli::Y: return ry(qubit, theta);
    case Pauli::Z: return rz(qubit, theta);
  }
  return rx(qubit, theta);
}

std::string to_string(const GateOp& gate) {
  std::ostringstream os;
  switch (gate.kind) {
    case GateKind::RX: os << "RX(" << gate.angles[0] << ") q" << gate.targets[0]; break;
    case GateKind::RY: os << "RY(" << gate.angles[0] << ") q" << gate.targets[0]; break;
    case GateKind::RZ: os << "RZ(" << gate.angles[0] << ") q" << gate.targets[0]; break;
    case GateKind::U3:
      os << "U3(" << gate.angles[0] << "," << gate.angles[1] << "," << gate.angles[2] << ") q"
         << gate.targets[0];
      break;
    case GateKind::CX: os << "CX q" << gate.targets[0] << "->q" << gate.targets[1]; break;
  }
  return os.str();
}

namespace {

using Mat2 = std::array<Complex, 4>;

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 rx_matrix(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return {Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0)};
}

Mat2 ry_matrix(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return {Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0)};
}

Mat2 rz_matrix(double t) {
  return {std::polar(1.0, -t / 2), Complex(0, 0), Complex(0, 0), std::polar(1.0, t / 2)};
}

}  // namespace

std::array<Complex, 4> gate_matrix(const GateOp& gate) {
  switch (gate.kind) {
    case GateKind::RX: return rx_matrix(gate.angles[0]);
    case GateKind::RY: return ry_matrix(gate.angles[0]);
    case GateKind::RZ: return rz_matrix(gate.angles[0]);
    case GateKind::U3:
      return mul(rz_matrix(gate.angles[2]),
                 mul(rx_matrix(gate.angles[1]), rz_matrix(gate.angles[0])));
    case GateKind::CX: break;
  }
  throw UsageError("gate_matrix: CX is not a single-qubit gate");
}

// ---------------------------------------------------------------------------

StateVector::StateVector(unsigned n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ConfigError("n_qubits must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                      std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << n_qubits, Complex(0, 0));
  amps_[0] = 1.0;
}

void StateVector::set_amplitudes(std::vector<Complex> amps) {
  if (amps.size() != amps_.size()) {
    throw UsageError("set_amplitudes: expected " + std::to_string(amps_.size()) + " entries");
  }
  amps_ = std::move(amps);
}

void StateVector::reset() {
  std::fill(amps_.begin(), amps_.end(), Complex(0, 0));
  amps_[0] = 1.0;
}

void StateVector::check_qubit(unsigned q) const {
  if (q >= n_qubits_) {
    throw ConfigError("qubit index " + std::to_string(q) + " out of range for " +
                      std::to_string(n_qubits_) + " qubits");
  }
}

void StateVector::apply(const GateOp& gate) {
  switch (gate.kind) {
    case GateKind::RZ: {
      check_qubit(gate.targets[0]);
      const double t = gate.angles[0];
      apply_diagonal(gate.targets[0], std::polar(1.0, -t / 2), std::polar(1.0, t / 2));
      return;
    }
    case GateKind::CX:
      check_qubit(gate.targets[0]);
      check_qubit(gate.targets[1]);
      if (gate.targets[0] == gate.targets[1]) {
        throw ConfigError("CX control and target must differ");
      }
      apply_cx(gate.targets[0], gate.targets[1]);
      return;
    default:
      check_qubit(gate.targets[0]);
      apply_single(gate.targets[0], gate_matrix(gate));
  }
}

void StateVector::apply(std::span<const GateOp> gates) {
  for (const auto& g : gates) apply(g);
}

void StateVector::apply_single(unsigned q, const std::array<Complex, 4>& m) {
  const std::size_t stride = std::size_t{1} << q;
  const std::size_t n = amps_.size();
  for (std::size_t block = 0; block < n; block += 2 * stride) {
    for (std::size_t i = block; i < block + stride; ++i) {
      const Complex a0 = amps_[i];
      const Complex a1 = amps_[i + stride];
      amps_[i] = m[0] * a0 + m[1] * a1;
      amps_[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

void StateVector::apply_diagonal(unsigned q, Complex d0, Complex d1) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    amps_[i] *= (i & bit) ? d1 : d0;
  }
}

void StateVector::apply_cx(unsigned control, unsigned target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
  }
}

double StateVector::norm_squared() const {
  double s = 0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps_.size());
  std::transform(amps_.begin(), amps_.end(), p.begin(), [](Complex a) { return std::norm(a); });
  return p;
}

StateVector init_state(unsigned n_qubits) { return StateVector(n_qubits); }

StateVector apply_gate(StateVector state, const GateOp& gate) {
  state.apply(gate);
  return state;
}

// ---------------------------------------------------------------------------

PauliString::PauliString(Pauli axis, std::vector<unsigned> qubits)
    : axis_(axis), qubits_(std::move(qubits)) {
  if (qubits_.empty() || qubits_.size() > 3) {
    throw ConfigError("Pauli string must act on 1 to 3 qubits");
  }
  for (std::size_t i = 0; i < qubits_.size(); ++i) {
    if (qubits_[i] >= kMaxQubits) throw ConfigError("Pauli string qubit index out of range");
    if (i > 0 && qubits_[i] <= qubits_[i - 1]) {
      throw ConfigError("Pauli string qubit indices must be strictly increasing");
    }
    mask_ |= std::uint64_t{1} << qubits_[i];
  }
}

std::string PauliString::label() const {
  std::string s;
  for (unsigned q : qubits_) {
    s += to_char(axis_);
    s += std::to_string(q);
  }
  return s;
}

double expectation(const StateVector& state, const PauliString& obs) {
  const auto q = obs.qubits();
  if (q.back() >= state.n_qubits()) {
    throw ConfigError("observable " + obs.label() + " exceeds register size");
  }
  const auto amps = state.amplitudes();
  const std::uint64_t mask = obs.mask();

  if (obs.axis() == Pauli::Z) {
    double s = 0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
      const double p = std::norm(amps[b]);
      s += (std::popcount(b & mask) & 1) ? -p : p;
    }
    return s;
  }

  // P|b> = phase(b) |b ^ mask>; for X phase = 1, for Y phase = i^k (-1)^{|b & mask|}.
  Complex phase_k(1, 0);
  if (obs.axis() == Pauli::Y) {
    static constexpr std::array<Complex, 4> ik{Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                               Complex(0, -1)};
    phase_k = ik[obs.order() % 4];
  }
  Complex s(0, 0);
  for (std::size_t b = 0; b < amps.size(); ++b) {
    Complex term = std::conj(amps[b ^ mask]) * amps[b];
    if (obs.axis() == Pauli::Y && (std::popcount(b & mask) & 1)) term = -term;
    s += term;
  }
  return (phase_k * s).real();
}

std::vector<GateOp> basis_change(unsigned n_qubits, Pauli axis) {
  std::vector<GateOp> gates;
  if (axis == Pauli::Z) return gates;
  gates.reserve(n_qubits);
  for (unsigned q = 0; q < n_qubits; ++q) {
    gates.push_back(axis == Pauli::X ? GateOp::ry(q, -std::numbers::pi / 2)
                                     : GateOp::rx(q, std::numbers::pi / 2));
  }
  return gates;
}

std::vector<double> basis_probabilities(const StateVector& state, Pauli axis) {
  if (axis == Pauli::Z) return state.probabilities();
  StateVector rotated = state;
  rotated.apply(basis_change(state.n_qubits(), axis));
  return rotated.probabilities();
}

double parity_expectation(std::span<const double> weights, std::uint64_t mask) {
  double s = 0;
  for (std::size_t b = 0; b < weights.size(); ++b) {
    s += (std::popcount(b & mask) & 1) ? -weights[b] : weights[b];
  }
  return s;
}

void walsh_hadamard(std::span<double> w) {
  const std::size_t n = w.size();
  if (n == 0 || (n & (n - 1)) != 0) throw UsageError("walsh_hadamard: size must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = w[j], b = w[j + h];
        w[j] = a + b;
        w[j + h] = a - b;
      }
    }
  }
}

std::vector<std::uint64_t> sample_distribution(std::span<const double> probs,
                                               std::uint64_t shots, Rng& rng) {
  std::vector<std::uint64_t> counts(probs.size(), 0);
  std::uint64_t remaining = shots;
  double mass_left = 1.0;
  for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
    const double p = probs[i];
    if (p <= 0) continue;
    if (i + 1 == probs.size() || p >= mass_left) {
      counts[i] = remaining;
      remaining = 0;
      break;
    }
    const double cond = std::clamp(p / mass_left, 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> draw(remaining, cond);
    const std::uint64_t k = draw(rng);
    counts[i] = k;
    remaining -= k;
    mass_left -= p;
  }
  if (remaining > 0) {
    // Rounding left mass on trailing zero-probability entries; give it to the
    // last outcome with positive probability.
    for (std::size_t i = probs.size(); i-- > 0;) {
      if (probs[i] > 0) {
        counts[i] += remaining;
        break;
      }
    }
  }
  return counts;
}

CountTable sample_basis(const StateVector& state, Pauli axis, std::uint64_t shots, Rng& rng) {
  if (shots == 0) throw UsageError("sample_basis: shots must be >= 1");
  const auto probs = basis_probabilities(state, axis);
  const auto dense = sample_distribution(probs, shots, rng);
  CountTable table;
  for (std::size_t b = 0; b < dense.size(); ++b) {
    if (dense[b] > 0) table.emplace(b, dense[b]);
  }
  return table;
}

double estimate_from_counts(const CountTable& counts, const PauliString& obs) {
  std::uint64_t total = 0;
  std::int64_t signed_sum = 0;
  for (const auto& [bits, n] : counts) {
    total += n;
    const bool odd = std::popcount(bits & obs.mask()) & 1;
    signed_sum += odd ? -static_cast<std::int64_t>(n) : static_cast<std::int64_t>(n);
  }
  if (total == 0) throw UsageError("estimate_from_counts: empty count table");
  return static_cast<double>(signed_sum) / static_cast<double>(total);
}

std::vector<GateOp> perturb_angles(std::span<const GateOp> gates, double sigma, Rng& rng) {
  if (!(sigma >= 0)) throw ConfigError("coherent noise sigma must be nonnegative");
  std::vector<GateOp> out(gates.begin(), gates.end());
  if (sigma == 0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& g : out) {
    for (unsigned k = 0; k < g.angle_count(); ++k) g.angles[k] += noise(rng);
  }
  return out;
}

}  // namespace hqrc
