#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdec/bitvec.hpp"

namespace qdec {

enum class Entangler { CzChain, CnotChain };

inline std::string entangler_name(Entangler e) {
  return e == Entangler::CzChain ? "cz-chain" : "cnot-chain";
}

inline Entangler entangler_from_name(const std::string& name) {
  if (name == "cz-chain") return Entangler::CzChain;
  if (name == "cnot-chain") return Entangler::CnotChain;
  throw std::invalid_argument("unknown entangler '" + name + "'");
}

/// Shape of the decoding circuit: Q qubits, B blocks, syndrome length m.
/// `readout` lists the measured qubits; its length is the label length L.
struct AnsatzConfig {
  int num_qubits = 3;        // Q
  int num_blocks = 10;       // B
  int syndrome_length = 1;   // m
  std::vector<int> readout;  // default 0..L-1
  Entangler entangler = Entangler::CzChain;

  void validate() const {
    if (num_qubits < 1 || num_blocks < 1 || syndrome_length < 1)
      throw std::invalid_argument("ansatz config: Q, B, m must be >= 1");
    if (readout.empty() || static_cast<int>(readout.size()) > num_qubits)
      throw std::invalid_argument("ansatz config: readout length must lie in [1, Q]");
    std::vector<bool> seen(num_qubits, false);
    for (int q : readout) {
      if (q < 0 || q >= num_qubits) throw std::invalid_argument("ansatz config: readout index out of range");
      if (seen[q]) throw std::invalid_argument("ansatz config: duplicate readout index");
      seen[q] = true;
    }
  }
};

inline AnsatzConfig make_ansatz_config(int qubits, int blocks, int syndrome_length,
                                       int label_length, Entangler ent = Entangler::CzChain) {
  AnsatzConfig cfg;
  cfg.num_qubits = qubits;
  cfg.num_blocks = blocks;
  cfg.syndrome_length = syndrome_length;
  cfg.entangler = ent;
  for (int i = 0; i < label_length; ++i) cfg.readout.push_back(i);
  cfg.validate();
  return cfg;
}

/// Learned rotation coefficients theta (X axis) and phi (Y axis), each of
/// shape [Q][B][m] stored row-major, 2*Q*B*m parameters in total.
struct ParameterSet {
  int num_qubits = 0;
  int num_blocks = 0;
  int syndrome_length = 0;
  std::vector<double> theta;
  std::vector<double> phi;

  static ParameterSet zeros(const AnsatzConfig& cfg) {
    ParameterSet p;
    p.num_qubits = cfg.num_qubits;
    p.num_blocks = cfg.num_blocks;
    p.syndrome_length = cfg.syndrome_length;
    p.theta.assign(static_cast<std::size_t>(cfg.num_qubits) * cfg.num_blocks * cfg.syndrome_length,
                   0.0);
    p.phi = p.theta;
    return p;
  }

  std::size_t index(int q, int b, int i) const {
    return (static_cast<std::size_t>(q) * num_blocks + b) * syndrome_length + i;
  }
  std::size_t count() const { return theta.size() + phi.size(); }

  bool shape_matches(const AnsatzConfig& cfg) const {
    return num_qubits == cfg.num_qubits && num_blocks == cfg.num_blocks &&
           syndrome_length == cfg.syndrome_length &&
           theta.size() == static_cast<std::size_t>(num_qubits) * num_blocks * syndrome_length &&
           phi.size() == theta.size();
  }

  bool operator==(const ParameterSet& o) const {
    return num_qubits == o.num_qubits && num_blocks == o.num_blocks &&
           syndrome_length == o.syndrome_length && theta == o.theta && phi == o.phi;
  }
};

enum class GateKind { Rx, Ry, Cz, Cnot };

struct Gate {
  GateKind kind;
  int a = 0;  // target qubit (control for Cnot/Cz pairs is `a`, partner `b`)
  int b = 0;
  double angle = 0.0;
};

struct CircuitPlan {
  int num_qubits = 0;
  std::vector<Gate> gates;
};

/// Per-(qubit, block) rotation angles for a syndrome: same-axis rotations
/// commute, so the per-bit rotations collapse to one rotation by the dot
/// product of coefficients with the syndrome.
struct EffectiveAngles {
  std::vector<double> alpha;   // X angles, [Q][B] row-major
  std::vector<double> beta_y;  // Y angles, [Q][B] row-major
};

inline EffectiveAngles effective_angles(const ParameterSet& params, const BitVec& syndrome) {
  if (static_cast<int>(syndrome.size()) != params.syndrome_length)
    throw std::invalid_argument("effective_angles: syndrome length mismatch");
  const int qb = params.num_qubits * params.num_blocks;
  const int m = params.syndrome_length;
  EffectiveAngles out;
  out.alpha.assign(qb, 0.0);
  out.beta_y.assign(qb, 0.0);
  for (int k = 0; k < qb; ++k) {
    double a = 0.0, b = 0.0;
    const double* th = params.theta.data() + static_cast<std::size_t>(k) * m;
    const double* ph = params.phi.data() + static_cast<std::size_t>(k) * m;
    for (int i = 0; i < m; ++i) {
      if (syndrome.get(i)) {
        a += th[i];
        b += ph[i];
      }
    }
    out.alpha[k] = a;
    out.beta_y[k] = b;
  }
  return out;
}

/// Gate sequence for one syndrome. Per block: X rotations on every qubit,
/// Y rotations on every qubit, then the entangling chain (q, q+1).
/// Rotations with angle exactly 0 are omitted; for the all-zero syndrome the
/// plan is entanglers only.
inline CircuitPlan build_plan(const AnsatzConfig& cfg, const ParameterSet& params,
                              const BitVec& syndrome) {
  cfg.validate();
  if (!params.shape_matches(cfg)) throw std::invalid_argument("build_plan: shape mismatch");
  EffectiveAngles ang = effective_angles(params, syndrome);

  CircuitPlan plan;
  plan.num_qubits = cfg.num_qubits;
  GateKind ent = cfg.entangler == Entangler::CzChain ? GateKind::Cz : GateKind::Cnot;
  for (int b = 0; b < cfg.num_blocks; ++b) {
    for (int q = 0; q < cfg.num_qubits; ++q) {
      double a = ang.alpha[q * cfg.num_blocks + b];
      if (a != 0.0) plan.gates.push_back({GateKind::Rx, q, 0, a});
    }
    for (int q = 0; q < cfg.num_qubits; ++q) {
      double a = ang.beta_y[q * cfg.num_blocks + b];
      if (a != 0.0) plan.gates.push_back({GateKind::Ry, q, 0, a});
    }
    for (int q = 0; q + 1 < cfg.num_qubits; ++q) plan.gates.push_back({ent, q, q + 1, 0.0});
  }
  return plan;
}

/// Checkpoint file: header `Q <int> B <int> m <int> entangler <name>
/// readout <csv>`, then Q*B*m theta values and Q*B*m phi values, one per
/// line, row-major [q][b][i], 17 significant digits.
inline void write_checkpoint(const AnsatzConfig& cfg, const ParameterSet& params,
                             std::ostream& out) {
  if (!params.shape_matches(cfg)) throw std::invalid_argument("write_checkpoint: shape mismatch");
  out << "Q " << cfg.num_qubits << " B " << cfg.num_blocks << " m " << cfg.syndrome_length
      << " entangler " << entangler_name(cfg.entangler) << " readout ";
  for (std::size_t i = 0; i < cfg.readout.size(); ++i) {
    if (i) out << ",";
    out << cfg.readout[i];
  }
  out << "\n";
  char buf[64];
  for (double v : params.theta) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
  for (double v : params.phi) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
}

inline void write_checkpoint_file(const AnsatzConfig& cfg, const ParameterSet& params,
                                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_checkpoint(cfg, params, out);
}

inline std::pair<AnsatzConfig, ParameterSet> read_checkpoint(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("checkpoint: empty input");
  std::istringstream hs(header);
  std::string kq, kb, km, kent, kread, ent_name, readout_csv;
  AnsatzConfig cfg;
  if (!(hs >> kq >> cfg.num_qubits >> kb >> cfg.num_blocks >> km >> cfg.syndrome_length >> kent >>
        ent_name >> kread >> readout_csv) ||
      kq != "Q" || kb != "B" || km != "m" || kent != "entangler" || kread != "readout")
    throw std::runtime_error("checkpoint: bad header");
  cfg.entangler = entangler_from_name(ent_name);
  cfg.readout.clear();
  std::istringstream rs(readout_csv);
  std::string item;
  while (std::getline(rs, item, ',')) cfg.readout.push_back(std::stoi(item));
  cfg.validate();

  ParameterSet params = ParameterSet::zeros(cfg);
  auto read_values = [&](std::vector<double>& dst) {
    for (double& v : dst) {
      if (!(in >> v)) throw std::runtime_error("checkpoint: truncated value list");
    }
  };
  read_values(params.theta);
  read_values(params.phi);
  return {cfg, params};
}

inline std::pair<AnsatzConfig, ParameterSet> read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_checkpoint(in);
}

}  // namespace qdec
