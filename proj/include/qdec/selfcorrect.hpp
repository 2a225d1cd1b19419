#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qdec/ansatz.hpp"
#include "qdec/bitvec.hpp"
#include "qdec/rng.hpp"
#include "qdec/simulator.hpp"

namespace qdec {

/// Fully coherent self-correcting distance-3 repetition memory: one round of
/// syndrome extraction onto two ancillas, ancilla-controlled learned
/// rotations on the decoding qubits, and a decoding-qubit-controlled logical
/// X back onto the data qubits. No mid-circuit measurement, no classical
/// syndrome.
///
/// Qubit layout: data 0..2, ancillas 3..4, decoding qubits 5..5+D-1.
struct SelfCorrectConfig {
  int distance = 3;  // fixed
  int decode_qubits = 2;
  int blocks = 2;
  ParameterSet params;  // coefficients indexed by ancilla: syndrome_length = 2
  Entangler entangler = Entangler::CzChain;
  double p = 0.05;        // physical X rate per data qubit
  int control_qubit = 1;  // decoding qubit driving the logical X
  std::size_t shots = 10000;
  uint64_t seed = 0;

  void validate() const {
    if (distance != 3) throw std::invalid_argument("selfcorrect: only distance 3 is supported");
    if (decode_qubits < 1) throw std::invalid_argument("selfcorrect: decode_qubits must be >= 1");
    if (3 + 2 + decode_qubits > kMaxSimQubits)
      throw std::invalid_argument("selfcorrect: qubit cap exceeded");
    if (!(p > 0.0 && p < 0.5) && p != 0.0)
      throw std::invalid_argument("selfcorrect: p must lie in [0, 0.5)");
    if (control_qubit < 0 || control_qubit >= decode_qubits)
      throw std::invalid_argument("selfcorrect: control qubit out of range");
    if (params.num_qubits != decode_qubits || params.num_blocks != blocks ||
        params.syndrome_length != 2)
      throw std::invalid_argument("selfcorrect: parameter shape mismatch");
  }
};

struct TrajectoryResult {
  std::vector<uint8_t> flips;      // logical-flip indicator per shot
  std::size_t flip_count = 0;
  double ler = 0.0;
  double std_err = 0.0;            // binomial standard error
  std::size_t uncorrected_count = 0;  // raw injected observable flips (data 0)
  double uncorrected_rate = 0.0;
  std::array<double, 8> pattern_flip_prob{};  // indexed by e0 + 2 e1 + 4 e2
};

namespace detail {

inline void apply_x(StateVector& s, int qubit) {
  apply_1q(s, qubit, {0, 0}, {1, 0}, {1, 0}, {0, 0});
}

}  // namespace detail

/// Probability that the logical-Z observable (data qubit 0) reads 1 after
/// the coherent circuit runs on injection pattern e (bit q = X on data q).
inline double coherent_flip_probability(const SelfCorrectConfig& cfg, unsigned pattern) {
  const int n_qubits = 3 + 2 + cfg.decode_qubits;
  const int anc0 = 3, anc1 = 4, dec0 = 5;
  StateVector s = StateVector::zero_state(n_qubits);

  for (int q = 0; q < 3; ++q)
    if ((pattern >> q) & 1u) detail::apply_x(s, q);

  // Syndrome extraction: ancilla a compares data a and a+1.
  apply_cnot(s, 0, anc0);
  apply_cnot(s, 1, anc0);
  apply_cnot(s, 1, anc1);
  apply_cnot(s, 2, anc1);

  // Ancilla-controlled rotations replace the classically gated ones: the
  // rotation RX(theta[q][b][i] * gamma_i) becomes an ancilla-i-controlled
  // RX(theta[q][b][i]).
  for (int b = 0; b < cfg.blocks; ++b) {
    for (int q = 0; q < cfg.decode_qubits; ++q) {
      for (int i = 0; i < 2; ++i) {
        double a = cfg.params.theta[cfg.params.index(q, b, i)];
        double c = std::cos(a / 2), sn = std::sin(a / 2);
        apply_controlled_1q(s, anc0 + i, dec0 + q, {c, 0}, {0, -sn}, {0, -sn}, {c, 0});
      }
    }
    for (int q = 0; q < cfg.decode_qubits; ++q) {
      for (int i = 0; i < 2; ++i) {
        double a = cfg.params.phi[cfg.params.index(q, b, i)];
        double c = std::cos(a / 2), sn = std::sin(a / 2);
        apply_controlled_1q(s, anc0 + i, dec0 + q, {c, 0}, {-sn, 0}, {sn, 0}, {c, 0});
      }
    }
    for (int q = 0; q + 1 < cfg.decode_qubits; ++q) {
      if (cfg.entangler == Entangler::CzChain)
        apply_cz(s, dec0 + q, dec0 + q + 1);
      else
        apply_cnot(s, dec0 + q, dec0 + q + 1);
    }
  }

  // Controlled logical X: the control decoding qubit flips all data qubits.
  for (int q = 0; q < 3; ++q) apply_cnot(s, dec0 + cfg.control_qubit, q);

  double norm = s.norm_sq();
  if (std::abs(norm - 1.0) > 1e-10)
    throw std::runtime_error("selfcorrect: state norm drifted");

  double flip = 0.0;
  for (std::size_t x = 0; x < s.amp.size(); ++x)
    if (x & 1u) flip += std::norm(s.amp[x]);
  return flip;
}

/// Stochastic Pauli trajectories: per shot, X errors are injected on the
/// data qubits with probability p each, the coherent circuit runs, and the
/// observable is measured. Only 8 injection patterns exist, so their flip
/// probabilities are computed once and shots reduce to two derived draws.
inline TrajectoryResult run_selfcorrect(const SelfCorrectConfig& cfg) {
  cfg.validate();
  if (cfg.shots < 1) throw std::invalid_argument("selfcorrect: shots must be >= 1");

  TrajectoryResult result;
  for (unsigned e = 0; e < 8; ++e) result.pattern_flip_prob[e] = coherent_flip_probability(cfg, e);

  result.flips.resize(cfg.shots);
  for (std::size_t i = 0; i < cfg.shots; ++i) {
    std::mt19937_64 eng = make_engine(cfg.seed, i);
    unsigned pattern = 0;
    for (int q = 0; q < 3; ++q)
      if (uniform01(eng) < cfg.p) pattern |= 1u << q;
    bool flip = uniform01(eng) < result.pattern_flip_prob[pattern];
    result.flips[i] = flip ? 1 : 0;
    result.flip_count += flip;
    result.uncorrected_count += pattern & 1u;
  }
  const double n = static_cast<double>(cfg.shots);
  result.ler = static_cast<double>(result.flip_count) / n;
  result.std_err = std::sqrt(result.ler * (1.0 - result.ler) / n);
  result.uncorrected_rate = static_cast<double>(result.uncorrected_count) / n;
  return result;
}

struct EquivalenceRow {
  unsigned pattern = 0;  // e0 + 2 e1 + 4 e2
  double coherent_prob = 0.0;
  double classical_prob = 0.0;
  double abs_diff = 0.0;
};

/// Deferred-measurement check: for every injection pattern, the coherent
/// circuit's flip probability must equal the classical pipeline's
/// (decode in sample mode, then apply the logical X on beta = 1). Both
/// sides are computed from amplitudes. Throws on any configuration or
/// parameter mismatch between the two pipelines.
inline std::vector<EquivalenceRow> equivalence_check(const SelfCorrectConfig& cfg,
                                                     const AnsatzConfig& classical_cfg,
                                                     const ParameterSet& classical_params) {
  cfg.validate();
  classical_cfg.validate();
  if (classical_cfg.num_qubits != cfg.decode_qubits || classical_cfg.num_blocks != cfg.blocks ||
      classical_cfg.syndrome_length != 2 || classical_cfg.entangler != cfg.entangler ||
      classical_cfg.readout != std::vector<int>{cfg.control_qubit})
    throw std::invalid_argument("equivalence_check: configuration mismatch");
  if (!(classical_params == cfg.params))
    throw std::invalid_argument("equivalence_check: configuration mismatch (parameters differ)");

  std::vector<EquivalenceRow> rows;
  for (unsigned e = 0; e < 8; ++e) {
    EquivalenceRow row;
    row.pattern = e;
    row.coherent_prob = coherent_flip_probability(cfg, e);

    BitVec syndrome(2);
    syndrome.set(0, ((e >> 0) ^ (e >> 1)) & 1u);
    syndrome.set(1, ((e >> 1) ^ (e >> 2)) & 1u);
    StateVector state = run(build_plan(classical_cfg, classical_params, syndrome),
                            classical_cfg.num_qubits);
    OutcomeDistribution dist = readout_distribution(state, classical_cfg.readout);
    double q1 = dist.probs[1];
    row.classical_prob = (e & 1u) ? 1.0 - q1 : q1;
    row.abs_diff = std::abs(row.coherent_prob - row.classical_prob);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qdec
