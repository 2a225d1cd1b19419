#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdec/bitvec.hpp"

namespace qdec {

/// One symptom: the detectors and logical observables flipped together.
struct Symptom {
  std::vector<int> detectors;    // sorted, duplicate-free
  std::vector<int> observables;  // sorted, duplicate-free

  bool operator==(const Symptom& o) const {
    return detectors == o.detectors && observables == o.observables;
  }
};

/// XOR of two sorted index sets (symmetric difference).
inline std::vector<int> xor_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// An independent error source: fires with `probability`, flipping the
/// detectors and observables of its symptom. A mechanism may carry a
/// decomposition into components whose XOR equals the whole symptom.
struct ErrorMechanism {
  double probability = 0.0;
  std::vector<int> detectors;
  std::vector<int> observables;
  std::vector<Symptom> decomposition;  // empty when not decomposed

  bool operator==(const ErrorMechanism& o) const {
    return probability == o.probability && detectors == o.detectors &&
           observables == o.observables && decomposition == o.decomposition;
  }
};

struct DetectorErrorModel {
  int num_detectors = 0;    // m
  int num_observables = 0;  // L
  std::vector<ErrorMechanism> mechanisms;

  bool operator==(const DetectorErrorModel& o) const {
    return num_detectors == o.num_detectors && num_observables == o.num_observables &&
           mechanisms == o.mechanisms;
  }
};

enum class CodeFamily { Repetition, RotatedSurface };
enum class NoiseModel { CodeCapacity, CircuitLevelPhenomenological };

struct CodeSpec {
  CodeFamily family = CodeFamily::Repetition;
  int distance = 3;
  int rounds = 1;
  NoiseModel noise = NoiseModel::CircuitLevelPhenomenological;
  double p = 0.001;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline void validate_mechanism(const ErrorMechanism& mech, int line) {
  if (!(mech.probability > 0.0 && mech.probability <= 0.5))
    throw ParseError(line, "probability out of range (0, 0.5]");
  if (!mech.decomposition.empty()) {
    std::vector<int> det, obs;
    for (const Symptom& c : mech.decomposition) {
      det = xor_sorted(det, c.detectors);
      obs = xor_sorted(obs, c.observables);
    }
    if (det != mech.detectors || obs != mech.observables)
      throw ParseError(line, "decomposition XOR does not match mechanism symptom");
  }
}

inline std::vector<int> sorted_unique_xor(std::vector<int> v) {
  // Repeated targets cancel pairwise (XOR semantics).
  std::sort(v.begin(), v.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    if ((j - i) % 2 == 1) out.push_back(v[i]);
    i = j;
  }
  return out;
}

}  // namespace detail

/// Parses the DEM text subset: `error(<p>) <targets>` lines with `D<int>` /
/// `L<int>` targets and optional `^` component separators, plus
/// `detector D<int>` and `logical_observable L<int>` declarations.
/// `#` starts a comment. Parenthesized arguments after `detector` (detector
/// coordinates, as emitted by external tools) are accepted and ignored.
/// Repeated identical symptom lines stay separate mechanisms.
inline DetectorErrorModel parse_dem(std::istream& in) {
  DetectorErrorModel model;
  int max_det = -1, max_obs = -1;
  std::string raw;
  int line_no = 0;

  auto parse_index = [&](const std::string& tok, char kind) -> int {
    // tok starts just past 'D'/'L'.
    if (tok.empty()) throw ParseError(line_no, std::string("missing index after '") + kind + "'");
    if (tok[0] == '-') throw ParseError(line_no, std::string(1, kind) + " index negative");
    std::size_t pos = 0;
    long v;
    try {
      v = std::stol(tok, &pos);
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad index '" + tok + "'");
    }
    if (pos != tok.size() || v < 0)
      throw ParseError(line_no, "bad index '" + tok + "'");
    return static_cast<int>(v);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;

    if (word == "detector" || word == "logical_observable") {
      std::string target;
      if (!(ls >> target)) throw ParseError(line_no, word + ": missing target");
      // Strip an optional coordinate argument list glued to the keyword,
      // e.g. "detector(1, 0) D3" splits as "detector(1," ... handled below.
      char kind = word == "detector" ? 'D' : 'L';
      if (target[0] != kind) throw ParseError(line_no, word + ": expected " + kind + "<int> target");
      int idx = parse_index(target.substr(1), kind);
      if (kind == 'D')
        max_det = std::max(max_det, idx);
      else
        max_obs = std::max(max_obs, idx);
      std::string extra;
      if (ls >> extra) throw ParseError(line_no, "unexpected trailing token '" + extra + "'");
      continue;
    }

    // Declarations with coordinate args: "detector(a, b) D0".
    if (word.rfind("detector(", 0) == 0) {
      std::size_t close = line.find(')');
      if (close == std::string::npos) throw ParseError(line_no, "unterminated coordinate list");
      std::istringstream rest(line.substr(close + 1));
      std::string target;
      if (!(rest >> target) || target[0] != 'D')
        throw ParseError(line_no, "detector: expected D<int> target");
      max_det = std::max(max_det, parse_index(target.substr(1), 'D'));
      continue;
    }

    if (word.rfind("error(", 0) == 0 || word == "error") {
      std::size_t open = line.find('(');
      std::size_t close = line.find(')');
      if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError(line_no, "error: expected error(<p>)");
      std::string pstr = line.substr(open + 1, close - open - 1);
      double p;
      try {
        std::size_t pos = 0;
        p = std::stod(pstr, &pos);
        while (pos < pstr.size() && std::isspace(static_cast<unsigned char>(pstr[pos]))) ++pos;
        if (pos != pstr.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(line_no, "error: bad probability '" + pstr + "'");
      }

      std::istringstream ts(line.substr(close + 1));
      std::vector<Symptom> components(1);
      std::vector<int> cur_det, cur_obs;
      std::string tok;
      bool saw_target = false;
      auto flush = [&] {
        components.back().detectors = detail::sorted_unique_xor(cur_det);
        components.back().observables = detail::sorted_unique_xor(cur_obs);
        cur_det.clear();
        cur_obs.clear();
      };
      while (ts >> tok) {
        if (tok == "^") {
          if (!saw_target) throw ParseError(line_no, "error: empty component before '^'");
          flush();
          components.emplace_back();
          saw_target = false;
        } else if (tok[0] == 'D') {
          int idx = parse_index(tok.substr(1), 'D');
          cur_det.push_back(idx);
          max_det = std::max(max_det, idx);
          saw_target = true;
        } else if (tok[0] == 'L') {
          int idx = parse_index(tok.substr(1), 'L');
          cur_obs.push_back(idx);
          max_obs = std::max(max_obs, idx);
          saw_target = true;
        } else {
          throw ParseError(line_no, "error: bad target '" + tok + "'");
        }
      }
      if (!saw_target) throw ParseError(line_no, "error: no targets");
      flush();

      ErrorMechanism mech;
      mech.probability = p;
      if (components.size() == 1) {
        mech.detectors = std::move(components[0].detectors);
        mech.observables = std::move(components[0].observables);
      } else {
        for (const Symptom& c : components) {
          mech.detectors = xor_sorted(mech.detectors, c.detectors);
          mech.observables = xor_sorted(mech.observables, c.observables);
        }
        mech.decomposition = std::move(components);
      }
      detail::validate_mechanism(mech, line_no);
      model.mechanisms.push_back(std::move(mech));
      continue;
    }

    throw ParseError(line_no, "unknown statement '" + word + "'");
  }

  model.num_detectors = std::max(max_det + 1, 1);
  model.num_observables = std::max(max_obs + 1, 1);
  return model;
}

inline DetectorErrorModel parse_dem(const std::string& text) {
  std::istringstream in(text);
  return parse_dem(in);
}

namespace detail {

inline std::string format_probability(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

inline void write_symptom(std::ostream& out, const Symptom& s) {
  for (int d : s.detectors) out << " D" << d;
  for (int o : s.observables) out << " L" << o;
}

}  // namespace detail

/// Canonical text form. Declarations pin m and L; mechanisms keep their order.
inline void serialize_dem(const DetectorErrorModel& model, std::ostream& out) {
  out << "detector D" << (model.num_detectors - 1) << "\n";
  out << "logical_observable L" << (model.num_observables - 1) << "\n";
  for (const ErrorMechanism& mech : model.mechanisms) {
    out << "error(" << detail::format_probability(mech.probability) << ")";
    if (mech.decomposition.empty()) {
      detail::write_symptom(out, Symptom{mech.detectors, mech.observables});
    } else {
      for (std::size_t i = 0; i < mech.decomposition.size(); ++i) {
        if (i) out << " ^";
        detail::write_symptom(out, mech.decomposition[i]);
      }
    }
    out << "\n";
  }
}

inline std::string serialize_dem(const DetectorErrorModel& model) {
  std::ostringstream out;
  serialize_dem(model, out);
  return out.str();
}

/// FNV-1a 64 over the canonical serialization; ties shot files to the model
/// they were sampled from.
inline uint64_t dem_fingerprint(const DetectorErrorModel& model) {
  std::string text = serialize_dem(model);
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string fingerprint_hex(uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

namespace detail {

inline void check_code_spec(const CodeSpec& spec) {
  if (spec.distance < 3 || spec.distance % 2 == 0)
    throw std::invalid_argument("code spec: distance must be an odd integer >= 3");
  if (!(spec.p > 0.0 && spec.p < 0.5))
    throw std::invalid_argument("code spec: p must lie in (0, 0.5)");
  if (spec.rounds < 1) throw std::invalid_argument("code spec: rounds must be >= 1");
}

}  // namespace detail

/// Repetition-code (bit-flip) memory DEM.
///
/// Circuit-level phenomenological noise: r rounds of ancilla parity
/// measurements plus a final data readout. Detector (t, a) has index
/// t*(d-1)+a for rounds t = 0..r; round r holds the final data-parity
/// detectors, so m = (d-1)(r+1). Fault set: an X flip on data qubit q in
/// round interval t flips the round-t detectors of the adjacent ancillas
/// (q-1 and q) and, for q = 0, the logical observable; a flipped ancilla-a
/// measurement in round t flips detectors (t, a) and (t+1, a). All faults
/// fire with probability p.
///
/// Code-capacity noise (single round, perfect measurement): m = d-1, one X
/// mechanism per data qubit.
inline DetectorErrorModel build_repetition_dem(const CodeSpec& spec) {
  detail::check_code_spec(spec);
  if (spec.family != CodeFamily::Repetition)
    throw std::invalid_argument("build_repetition_dem: family must be repetition");
  const int d = spec.distance;

  DetectorErrorModel model;
  model.num_observables = 1;

  if (spec.noise == NoiseModel::CodeCapacity) {
    if (spec.rounds != 1)
      throw std::invalid_argument("build_repetition_dem: code-capacity requires rounds = 1");
    model.num_detectors = d - 1;
    for (int q = 0; q < d; ++q) {
      ErrorMechanism mech;
      mech.probability = spec.p;
      if (q - 1 >= 0) mech.detectors.push_back(q - 1);
      if (q < d - 1) mech.detectors.push_back(q);
      if (q == 0) mech.observables.push_back(0);
      model.mechanisms.push_back(std::move(mech));
    }
    return model;
  }

  const int r = spec.rounds;
  model.num_detectors = (d - 1) * (r + 1);
  auto det = [d](int t, int a) { return t * (d - 1) + a; };

  for (int t = 0; t <= r; ++t) {
    for (int q = 0; q < d; ++q) {
      ErrorMechanism mech;
      mech.probability = spec.p;
      if (q - 1 >= 0) mech.detectors.push_back(det(t, q - 1));
      if (q < d - 1) mech.detectors.push_back(det(t, q));
      if (q == 0) mech.observables.push_back(0);
      model.mechanisms.push_back(std::move(mech));
    }
  }
  for (int t = 0; t < r; ++t) {
    for (int a = 0; a < d - 1; ++a) {
      ErrorMechanism mech;
      mech.probability = spec.p;
      mech.detectors = {det(t, a), det(t + 1, a)};
      model.mechanisms.push_back(std::move(mech));
    }
  }
  return model;
}

/// Rotated surface code under code-capacity noise (one perfect measurement
/// round). Data qubits sit on a d x d grid; stabilizer cells (i, j) for
/// i, j in 0..d cover the data qubits at rows i-1..i, cols j-1..j. Cells
/// with i+j even are Z-type, odd are X-type; boundary cells survive only on
/// the matching side (X on top/bottom rows, Z on left/right columns), which
/// yields the usual d^2-1 stabilizers. Observable 0 is the logical Z
/// (support: data row 0, flipped by X errors); observable 1 the logical X
/// (support: data column 0, flipped by Z errors). Each data qubit
/// contributes one X and one Z mechanism of probability p.
inline DetectorErrorModel build_surface_code_capacity_dem(const CodeSpec& spec) {
  detail::check_code_spec(spec);
  if (spec.family != CodeFamily::RotatedSurface)
    throw std::invalid_argument("build_surface_code_capacity_dem: family must be rotated-surface");
  if (spec.noise != NoiseModel::CodeCapacity)
    throw std::invalid_argument("build_surface_code_capacity_dem: noise must be code-capacity");
  if (spec.rounds != 1)
    throw std::invalid_argument("build_surface_code_capacity_dem: rounds must be 1");
  const int d = spec.distance;

  struct Cell {
    int i, j;
    bool z_type;
  };
  std::vector<Cell> cells;
  for (int i = 0; i <= d; ++i) {
    for (int j = 0; j <= d; ++j) {
      bool z_type = (i + j) % 2 == 0;
      bool top_bottom = (i == 0 || i == d);
      bool left_right = (j == 0 || j == d);
      if (top_bottom && left_right) continue;  // corners touch one qubit
      if (top_bottom && z_type) continue;      // X boundaries on top/bottom
      if (left_right && !z_type) continue;     // Z boundaries on left/right
      cells.push_back({i, j, z_type});
    }
  }

  DetectorErrorModel model;
  model.num_detectors = static_cast<int>(cells.size());
  model.num_observables = 2;

  auto adjacent_detectors = [&](int row, int col, bool want_z) {
    std::vector<int> out;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const Cell& c = cells[k];
      if (c.z_type != want_z) continue;
      if (row >= c.i - 1 && row <= c.i && col >= c.j - 1 && col <= c.j)
        out.push_back(static_cast<int>(k));
    }
    return out;
  };

  for (int row = 0; row < d; ++row) {
    for (int col = 0; col < d; ++col) {
      ErrorMechanism x_mech;  // X error: seen by Z stabilizers
      x_mech.probability = spec.p;
      x_mech.detectors = adjacent_detectors(row, col, true);
      if (row == 0) x_mech.observables.push_back(0);
      model.mechanisms.push_back(std::move(x_mech));

      ErrorMechanism z_mech;  // Z error: seen by X stabilizers
      z_mech.probability = spec.p;
      z_mech.detectors = adjacent_detectors(row, col, false);
      if (col == 0) z_mech.observables.push_back(1);
      model.mechanisms.push_back(std::move(z_mech));
    }
  }
  return model;
}

inline DetectorErrorModel build_dem(const CodeSpec& spec) {
  if (spec.family == CodeFamily::Repetition) return build_repetition_dem(spec);
  return build_surface_code_capacity_dem(spec);
}

/// Per-mechanism bit masks, precomputed once for sampling and enumeration.
struct CompiledMechanisms {
  std::vector<BitVec> detector_masks;
  std::vector<BitVec> observable_masks;
  std::vector<double> probabilities;
};

inline CompiledMechanisms compile_mechanisms(const DetectorErrorModel& model) {
  CompiledMechanisms c;
  c.detector_masks.reserve(model.mechanisms.size());
  c.observable_masks.reserve(model.mechanisms.size());
  c.probabilities.reserve(model.mechanisms.size());
  for (const ErrorMechanism& mech : model.mechanisms) {
    BitVec det(model.num_detectors), obs(model.num_observables);
    for (int i : mech.detectors) {
      if (i >= model.num_detectors) throw std::invalid_argument("mechanism detector out of range");
      det.set(i, true);
    }
    for (int i : mech.observables) {
      if (i >= model.num_observables)
        throw std::invalid_argument("mechanism observable out of range");
      obs.set(i, true);
    }
    c.detector_masks.push_back(std::move(det));
    c.observable_masks.push_back(std::move(obs));
    c.probabilities.push_back(mech.probability);
  }
  return c;
}

}  // namespace qdec
