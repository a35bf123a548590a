#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hqrc/error.hpp"
#include "hqrc/measurement.hpp"
#include "oracles.hpp"

using namespace hqrc;
using std::numbers::pi;

namespace {

StateVector bell() {
  StateVector s(2);
  s.apply(GateOp::ry(0, pi / 2));
  s.apply(GateOp::cx(0, 1));
  return s;
}

double entry(const ObservableSet& obs, const Eigen::VectorXd& m, Pauli axis, std::vector<unsigned> qs) {
  const auto idx = obs.index_of(PauliString(axis, std::move(qs)));
  EXPECT_TRUE(idx.has_value());
  return m[static_cast<Eigen::Index>(*idx)];
}

}  // namespace

TEST(BuildObservables, EightQubitsOrderTwoHas108) {
  EXPECT_EQ(build_observables(8, {}).size(), 108u);
  EXPECT_EQ(all_to_all_size(8, 2), 108u);
}

TEST(BuildObservables, TwoQubitsOrderTwoHasNine) { EXPECT_EQ(build_observables(2, {}).size(), 9u); }

TEST(BuildObservables, EightQubitsOrderThreeHas276) {
  MeasurementScheme s;
  s.max_order = 3;
  EXPECT_EQ(build_observables(8, s).size(), 276u);
  EXPECT_EQ(all_to_all_size(8, 3), 276u);
}

TEST(BuildObservables, CanonicalOrderAxisMajor) {
  const auto obs = build_observables(3, {});
  std::vector<std::string> labels;
  for (const auto& o : obs) labels.push_back(o.label());
  const std::vector<std::string> want{"X0",   "X1",   "X2",   "X0X1", "X0X2", "X1X2", "Y0",   "Y1",   "Y2",
                                      "Y0Y1", "Y0Y2", "Y1Y2", "Z0",   "Z1",   "Z2",   "Z0Z1", "Z0Z2", "Z1Z2"};
  EXPECT_EQ(labels, want);
}

TEST(BuildObservables, GraphRestrictsCorrelators) {
  MeasurementScheme s;
  s.connectivity = QubitGraph{4, {{1, 2}, {2, 3}}};
  const auto obs = build_observables(4, s);
  std::vector<std::string> pairs;
  for (const auto& o : obs)
    if (o.order() == 2) pairs.push_back(o.label());
  EXPECT_EQ(pairs, (std::vector<std::string>{"X1X2", "X2X3", "Y1Y2", "Y2Y3", "Z1Z2", "Z2Z3"}));
}

TEST(BuildObservables, GraphTrianglesGiveThirdOrderTerms) {
  MeasurementScheme s;
  s.max_order = 3;
  s.axes = {Pauli::Z};
  s.connectivity = QubitGraph{4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}};
  std::vector<std::string> triples;
  for (const auto& o : build_observables(4, s))
    if (o.order() == 3) triples.push_back(o.label());
  EXPECT_EQ(triples, (std::vector<std::string>{"Z0Z1Z2"}));
}

TEST(BuildObservables, UnsupportedOrderIsConfigError) {
  MeasurementScheme s;
  s.max_order = 4;
  EXPECT_THROW(build_observables(4, s), ConfigError);
  s.max_order = 0;
  EXPECT_THROW(build_observables(4, s), ConfigError);
}

TEST(MeasureVector, ComputationalZeroState) {
  for (unsigned n : {1u, 3u, 6u}) {
    ObservableSet obs(n, {});
    Rng rng(0);
    const auto m = measure_vector(StateVector(n), obs, {}, rng);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const auto& o = obs.observables()[i];
      if (o.axis() == Pauli::Z) EXPECT_NEAR(m[static_cast<Eigen::Index>(i)], 1.0, 1e-14);
      if (o.axis() != Pauli::Z && o.order() == 1) EXPECT_NEAR(m[static_cast<Eigen::Index>(i)], 0.0, 1e-14);
    }
  }
}

TEST(MeasureVector, BellCorrelations) {
  ObservableSet obs(2, {});
  Rng rng(0);
  const auto m = measure_vector(bell(), obs, {}, rng);
  EXPECT_NEAR(entry(obs, m, Pauli::Z, {0, 1}), 1.0, 1e-12);
  EXPECT_NEAR(entry(obs, m, Pauli::X, {0, 1}), 1.0, 1e-12);
  EXPECT_NEAR(entry(obs, m, Pauli::Y, {0, 1}), -1.0, 1e-12);
}

TEST(MeasureVector, FiniteShotsWithinBinomialBound) {
  std::mt19937_64 gen(31);
  StateVector s(3);
  s.apply(oracle::random_circuit(3, 30, gen));
  ObservableSet obs(3, {});
  ShotConfig shots;
  shots.shots = 100000;
  Rng rng(32);
  const auto sampled = obs.measure(s, shots, rng);
  const auto exact = obs.measure_direct(s);
  EXPECT_LE((sampled - exact).cwiseAbs().maxCoeff(), 5.0 / std::sqrt(1e5));
}

TEST(MeasureVector, WrongQubitCountIsConfigError) {
  ObservableSet obs(3, {});
  Rng rng(0);
  EXPECT_THROW(obs.measure(StateVector(2), {}, rng), ConfigError);
}

TEST(FeedbackSelection, DefaultUsesSingleQubitExpectations) {
  ObservableSet obs(3, {});
  FeedbackLayer fb;
  const auto sel = default_feedback_selection(fb, 3, obs);
  ASSERT_EQ(sel.size(), 9u);
  EXPECT_EQ(obs.observables()[sel[0]].label(), "X0");
  EXPECT_EQ(obs.observables()[sel[4]].label(), "Y1");
  EXPECT_EQ(obs.observables()[sel[8]].label(), "Z2");

  MeasurementScheme only_z;
  only_z.axes = {Pauli::Z};
  EXPECT_THROW(default_feedback_selection(fb, 3, ObservableSet(3, only_z)), ConfigError);
}

// ---------------------------------------------------------------------------
// Properties

TEST(MeasurementProperty, SharedSampleConsistency) {
  std::mt19937_64 gen(40);
  for (int trial = 0; trial < 10; ++trial) {
    StateVector s(4);
    s.apply(oracle::random_circuit(4, 30, gen));
    MeasurementScheme scheme;
    scheme.max_order = 3;
    ObservableSet obs(4, scheme);
    ShotConfig shots;
    shots.shots = 2000;
    Rng a(static_cast<std::uint64_t>(trial)), b(static_cast<std::uint64_t>(trial));
    const auto m = obs.measure(s, shots, a);

    for (Pauli axis : {Pauli::X, Pauli::Y, Pauli::Z}) {
      const auto table = sample_basis(s, axis, 2000, b);
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& o = obs.observables()[i];
        if (o.axis() != axis) continue;
        EXPECT_NEAR(m[static_cast<Eigen::Index>(i)], estimate_from_counts(table, o), 1e-12) << o.label();
      }
      // Marginal of the same table for single-qubit terms.
      for (unsigned q = 0; q < 4; ++q) {
        std::int64_t signed_sum = 0;
        for (const auto& [bits, n] : table) signed_sum += ((bits >> q) & 1) ? -std::int64_t(n) : std::int64_t(n);
        EXPECT_NEAR(entry(obs, m, axis, {q}), static_cast<double>(signed_sum) / 2000.0, 1e-12);
      }
    }
  }
}

TEST(MeasurementProperty, CanonicalOrderIsStable) {
  MeasurementScheme s;
  s.max_order = 3;
  EXPECT_EQ(build_observables(6, s), build_observables(6, s));
}

TEST(MeasurementProperty, ExactEntriesMatchKroneckerOperators) {
  std::mt19937_64 gen(41);
  const char axis_char[] = {'X', 'Y', 'Z'};
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned n = 2 + trial % 3;
    StateVector s(n);
    s.apply(oracle::random_circuit(n, 30, gen));
    MeasurementScheme scheme;
    scheme.max_order = 3;
    ObservableSet obs(n, scheme);
    Rng rng(0);
    const auto m = obs.measure(s, {}, rng);
    const auto psi = oracle::to_eigen(s);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const auto& o = obs.observables()[i];
      const std::vector<unsigned> qs(o.qubits().begin(), o.qubits().end());
      const double want = oracle::brute_expectation(psi, axis_char[static_cast<int>(o.axis())], qs, n);
      EXPECT_NEAR(m[static_cast<Eigen::Index>(i)], want, 1e-10) << o.label();
    }
  }
}
