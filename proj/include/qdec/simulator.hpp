#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qdec/ansatz.hpp"
#include "qdec/bitvec.hpp"

namespace qdec {

inline constexpr int kMaxSimQubits = 24;
inline constexpr double kProbFloor = 1e-12;  // floor inside -ln(q)

/// Dense 2^Q statevector; qubit 0 is the least significant basis-index bit.
struct StateVector {
  int num_qubits = 0;
  std::vector<std::complex<double>> amp;

  static StateVector zero_state(int qubits) {
    if (qubits < 1 || qubits > kMaxSimQubits)
      throw std::invalid_argument("StateVector: qubit count out of range [1, 24]");
    StateVector s;
    s.num_qubits = qubits;
    s.amp.assign(std::size_t{1} << qubits, {0.0, 0.0});
    s.amp[0] = 1.0;
    return s;
  }

  double norm_sq() const {
    double n = 0.0;
    for (const auto& a : amp) n += std::norm(a);
    return n;
  }
};

namespace detail {

/// Applies a 2x2 unitary [[u00, u01], [u10, u11]] to `qubit`.
inline void apply_1q(StateVector& s, int qubit, std::complex<double> u00,
                     std::complex<double> u01, std::complex<double> u10,
                     std::complex<double> u11) {
  const std::size_t bit = std::size_t{1} << qubit;
  const std::size_t n = s.amp.size();
  for (std::size_t base = 0; base < n; ++base) {
    if (base & bit) continue;
    std::complex<double> a0 = s.amp[base];
    std::complex<double> a1 = s.amp[base | bit];
    s.amp[base] = u00 * a0 + u01 * a1;
    s.amp[base | bit] = u10 * a0 + u11 * a1;
  }
}

}  // namespace detail

inline void apply_rx(StateVector& s, int qubit, double angle) {
  double c = std::cos(angle / 2), sn = std::sin(angle / 2);
  detail::apply_1q(s, qubit, {c, 0}, {0, -sn}, {0, -sn}, {c, 0});
}

inline void apply_ry(StateVector& s, int qubit, double angle) {
  double c = std::cos(angle / 2), sn = std::sin(angle / 2);
  detail::apply_1q(s, qubit, {c, 0}, {-sn, 0}, {sn, 0}, {c, 0});
}

inline void apply_cz(StateVector& s, int a, int b) {
  const std::size_t ba = std::size_t{1} << a, bb = std::size_t{1} << b;
  for (std::size_t x = 0; x < s.amp.size(); ++x)
    if ((x & ba) && (x & bb)) s.amp[x] = -s.amp[x];
}

inline void apply_cnot(StateVector& s, int control, int target) {
  const std::size_t bc = std::size_t{1} << control, bt = std::size_t{1} << target;
  for (std::size_t x = 0; x < s.amp.size(); ++x)
    if ((x & bc) && !(x & bt)) std::swap(s.amp[x], s.amp[x | bt]);
}

/// Controlled single-qubit unitary (used by the coherent feedback circuit).
inline void apply_controlled_1q(StateVector& s, int control, int target,
                                std::complex<double> u00, std::complex<double> u01,
                                std::complex<double> u10, std::complex<double> u11) {
  const std::size_t bc = std::size_t{1} << control, bt = std::size_t{1} << target;
  for (std::size_t base = 0; base < s.amp.size(); ++base) {
    if (!(base & bc) || (base & bt)) continue;
    std::complex<double> a0 = s.amp[base];
    std::complex<double> a1 = s.amp[base | bt];
    s.amp[base] = u00 * a0 + u01 * a1;
    s.amp[base | bt] = u10 * a0 + u11 * a1;
  }
}

inline void apply_gate(StateVector& s, const Gate& g) {
  switch (g.kind) {
    case GateKind::Rx:
      apply_rx(s, g.a, g.angle);
      break;
    case GateKind::Ry:
      apply_ry(s, g.a, g.angle);
      break;
    case GateKind::Cz:
      apply_cz(s, g.a, g.b);
      break;
    case GateKind::Cnot:
      apply_cnot(s, g.a, g.b);
      break;
  }
}

inline void apply_gate_inverse(StateVector& s, const Gate& g) {
  switch (g.kind) {
    case GateKind::Rx:
      apply_rx(s, g.a, -g.angle);
      break;
    case GateKind::Ry:
      apply_ry(s, g.a, -g.angle);
      break;
    default:
      apply_gate(s, g);  // CZ and CNOT are involutions
  }
}

/// Evolves |0...0> through the plan.
inline StateVector run(const CircuitPlan& plan, int qubits) {
  StateVector s = StateVector::zero_state(qubits);
  for (const Gate& g : plan.gates) {
    if (g.a < 0 || g.a >= qubits || ((g.kind == GateKind::Cz || g.kind == GateKind::Cnot) &&
                                     (g.b < 0 || g.b >= qubits || g.b == g.a)))
      throw std::invalid_argument("run: malformed plan (qubit index out of range)");
    if (!std::isfinite(g.angle)) throw std::invalid_argument("run: non-finite gate angle");
    apply_gate(s, g);
  }
  return s;
}

inline StateVector run(const CircuitPlan& plan) { return run(plan, plan.num_qubits); }

struct OutcomeDistribution {
  std::vector<double> probs;  // 2^L entries; index bit j = readout[j]
};

/// Marginal distribution over the readout qubits; bit j of the outcome index
/// is the measured value of qubit readout[j].
inline OutcomeDistribution readout_distribution(const StateVector& s,
                                                const std::vector<int>& readout) {
  for (int q : readout)
    if (q < 0 || q >= s.num_qubits)
      throw std::invalid_argument("readout_distribution: qubit index out of range");
  OutcomeDistribution dist;
  dist.probs.assign(std::size_t{1} << readout.size(), 0.0);
  for (std::size_t x = 0; x < s.amp.size(); ++x) {
    double p = std::norm(s.amp[x]);
    if (p == 0.0) continue;
    std::size_t beta = 0;
    for (std::size_t j = 0; j < readout.size(); ++j)
      beta |= ((x >> readout[j]) & 1u) << j;
    dist.probs[beta] += p;
  }
  return dist;
}

/// Probability that the readout qubits measure exactly `label`.
inline double label_probability(const StateVector& s, const std::vector<int>& readout,
                                const BitVec& label) {
  if (label.size() != readout.size())
    throw std::invalid_argument("label_probability: label length mismatch");
  double p = 0.0;
  for (std::size_t x = 0; x < s.amp.size(); ++x) {
    bool match = true;
    for (std::size_t j = 0; j < readout.size(); ++j) {
      if (((x >> readout[j]) & 1u) != static_cast<std::size_t>(label.get(j))) {
        match = false;
        break;
      }
    }
    if (match) p += std::norm(s.amp[x]);
  }
  return p;
}

struct LossGrad {
  double loss = 0.0;
  double label_prob = 0.0;
  ParameterSet grad;  // same shape as the parameters
};

namespace detail {

struct DenseGate {
  GateKind kind;
  int a, b;
  double angle;
  int slot;  // index into the [Q][B] angle array; -1 for entanglers
};

/// Full gate list including zero-angle rotations, so every (q, b) angle has
/// a gradient. Identical to build_plan up to the omitted identities.
inline std::vector<DenseGate> dense_gates(const AnsatzConfig& cfg, const EffectiveAngles& ang) {
  std::vector<DenseGate> gates;
  GateKind ent = cfg.entangler == Entangler::CzChain ? GateKind::Cz : GateKind::Cnot;
  for (int b = 0; b < cfg.num_blocks; ++b) {
    for (int q = 0; q < cfg.num_qubits; ++q) {
      int slot = q * cfg.num_blocks + b;
      gates.push_back({GateKind::Rx, q, 0, ang.alpha[slot], slot});
    }
    for (int q = 0; q < cfg.num_qubits; ++q) {
      int slot = q * cfg.num_blocks + b;
      gates.push_back({GateKind::Ry, q, 0, ang.beta_y[slot], slot});
    }
    for (int q = 0; q + 1 < cfg.num_qubits; ++q) gates.push_back({ent, q, q + 1, 0.0, -1});
  }
  return gates;
}

inline void apply_dense(StateVector& s, const DenseGate& g, bool inverse) {
  double angle = inverse ? -g.angle : g.angle;
  switch (g.kind) {
    case GateKind::Rx:
      apply_rx(s, g.a, angle);
      break;
    case GateKind::Ry:
      apply_ry(s, g.a, angle);
      break;
    case GateKind::Cz:
      apply_cz(s, g.a, g.b);
      break;
    case GateKind::Cnot:
      apply_cnot(s, g.a, g.b);
      break;
  }
}

/// Im(<lam| X_q |psi>)
inline double im_bra_x_ket(const StateVector& lam, const StateVector& psi, int qubit) {
  const std::size_t bit = std::size_t{1} << qubit;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t x0 = 0; x0 < psi.amp.size(); ++x0) {
    if (x0 & bit) continue;
    acc += std::conj(lam.amp[x0]) * psi.amp[x0 | bit] + std::conj(lam.amp[x0 | bit]) * psi.amp[x0];
  }
  return acc.imag();
}

/// Im(<lam| Y_q |psi>)
inline double im_bra_y_ket(const StateVector& lam, const StateVector& psi, int qubit) {
  const std::size_t bit = std::size_t{1} << qubit;
  double acc = 0.0;
  for (std::size_t x0 = 0; x0 < psi.amp.size(); ++x0) {
    if (x0 & bit) continue;
    // Im(-i conj(l0) p1 + i conj(l1) p0) = Re(conj(l1) p0) - Re(conj(l0) p1)
    acc += (std::conj(lam.amp[x0 | bit]) * psi.amp[x0]).real() -
           (std::conj(lam.amp[x0]) * psi.amp[x0 | bit]).real();
  }
  return acc;
}

}  // namespace detail

/// Cross-entropy loss -ln(max(q(label|syndrome), 1e-12)) and its exact
/// gradient with respect to every theta and phi coefficient.
///
/// The reverse pass walks the gate sequence once: with lam seeded as the
/// label projector applied to the final state, d q / d angle_k equals
/// Im(<lam|G|psi>) evaluated just after gate k (G the gate's Pauli axis),
/// and both vectors are then pulled back through the inverse gate. The
/// chain rule through the angle composition contributes a factor of the
/// syndrome bit: d loss / d theta[q][b][i] = gamma_i * d loss / d alpha[q][b].
inline LossGrad loss_and_gradient(const AnsatzConfig& cfg, const ParameterSet& params,
                                  const BitVec& syndrome, const BitVec& label) {
  cfg.validate();
  if (!params.shape_matches(cfg)) throw std::invalid_argument("loss_and_gradient: shape mismatch");
  if (label.size() != cfg.readout.size())
    throw std::invalid_argument("loss_and_gradient: label length mismatch");

  LossGrad out;
  out.grad = ParameterSet::zeros(cfg);

  // gamma = 0: every rotation is the identity and every d alpha / d theta
  // vanishes, so the result has this closed form.
  if (!syndrome.any()) {
    if (static_cast<int>(syndrome.size()) != cfg.syndrome_length)
      throw std::invalid_argument("loss_and_gradient: syndrome length mismatch");
    out.label_prob = label.any() ? 0.0 : 1.0;
    out.loss = -std::log(std::max(out.label_prob, kProbFloor));
    return out;
  }

  EffectiveAngles ang = effective_angles(params, syndrome);
  std::vector<detail::DenseGate> gates = detail::dense_gates(cfg, ang);

  StateVector psi = StateVector::zero_state(cfg.num_qubits);
  for (const auto& g : gates) detail::apply_dense(psi, g, false);

  const double q_label = label_probability(psi, cfg.readout, label);
  out.label_prob = q_label;
  out.loss = -std::log(std::max(q_label, kProbFloor));
  const double dloss_dq = q_label > kProbFloor ? -1.0 / q_label : 0.0;

  // lam = projector(label) |psi>
  StateVector lam = psi;
  for (std::size_t x = 0; x < lam.amp.size(); ++x) {
    for (std::size_t j = 0; j < cfg.readout.size(); ++j) {
      if (((x >> cfg.readout[j]) & 1u) != static_cast<std::size_t>(label.get(j))) {
        lam.amp[x] = 0.0;
        break;
      }
    }
  }

  const int qb = cfg.num_qubits * cfg.num_blocks;
  std::vector<double> dq_dalpha(qb, 0.0), dq_dbeta(qb, 0.0);
  for (std::size_t k = gates.size(); k-- > 0;) {
    const auto& g = gates[k];
    if (g.slot >= 0) {
      double v = g.kind == GateKind::Rx ? detail::im_bra_x_ket(lam, psi, g.a)
                                        : detail::im_bra_y_ket(lam, psi, g.a);
      (g.kind == GateKind::Rx ? dq_dalpha : dq_dbeta)[g.slot] = v;
    }
    detail::apply_dense(psi, g, true);
    detail::apply_dense(lam, g, true);
  }

  const int m = cfg.syndrome_length;
  for (int k = 0; k < qb; ++k) {
    double ga = dloss_dq * dq_dalpha[k];
    double gb = dloss_dq * dq_dbeta[k];
    for (int i = 0; i < m; ++i) {
      if (syndrome.get(i)) {
        out.grad.theta[static_cast<std::size_t>(k) * m + i] = ga;
        out.grad.phi[static_cast<std::size_t>(k) * m + i] = gb;
      }
    }
  }
  return out;
}

}  // namespace qdec
