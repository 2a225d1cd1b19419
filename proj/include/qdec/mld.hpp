#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qdec/bitvec.hpp"
#include "qdec/dem.hpp"

namespace qdec {

inline constexpr int kMaxMldMechanisms = 24;
inline constexpr int kMaxMldObservables = 16;

/// Exhaustive maximum-likelihood decoder. Enumerates every subset of error
/// mechanisms once, accumulating probability mass per (syndrome, label);
/// decoding is then a table lookup. Exact, hence the oracle every other
/// decoder is judged against. Mechanism count is capped at 24.
class MldDecoder {
 public:
  struct Entry {
    std::vector<double> label_mass;  // 2^L masses, index = packed label bits
    int best_label = 0;              // argmax, ties toward the lowest value
    double total = 0.0;
  };

  explicit MldDecoder(const DetectorErrorModel& model)
      : num_detectors_(model.num_detectors), num_observables_(model.num_observables) {
    if (static_cast<int>(model.mechanisms.size()) > kMaxMldMechanisms)
      throw std::invalid_argument("MldDecoder: model too large (> 24 mechanisms)");
    if (model.num_observables > kMaxMldObservables)
      throw std::invalid_argument("MldDecoder: too many observables");
    CompiledMechanisms mechs = compile_mechanisms(model);
    BitVec syndrome(model.num_detectors);
    uint64_t label = 0;
    enumerate(mechs, 0, 1.0, syndrome, label);
    for (auto& [key, entry] : table_) {
      double best = -1.0;
      for (std::size_t b = 0; b < entry.label_mass.size(); ++b) {
        entry.total += entry.label_mass[b];
        if (entry.label_mass[b] > best) {
          best = entry.label_mass[b];
          entry.best_label = static_cast<int>(b);
        }
      }
    }
  }

  /// Most likely label for the syndrome. Syndromes with zero mass (never
  /// produced by the model) decode to 0; `unseen`, when given, is set.
  BitVec decode(const BitVec& syndrome, bool* unseen = nullptr) const {
    if (static_cast<int>(syndrome.size()) != num_detectors_)
      throw std::invalid_argument("MldDecoder: syndrome length mismatch");
    BitVec label(num_observables_);
    auto it = table_.find(syndrome);
    if (it == table_.end()) {
      if (unseen) *unseen = true;
      return label;
    }
    if (unseen) *unseen = false;
    for (int b = 0; b < num_observables_; ++b)
      label.set(b, (it->second.best_label >> b) & 1);
    return label;
  }

  const Entry* lookup(const BitVec& syndrome) const {
    auto it = table_.find(syndrome);
    return it == table_.end() ? nullptr : &it->second;
  }

  const std::unordered_map<BitVec, Entry, BitVecHash>& table() const { return table_; }

  /// Expected logical error rate of this decoder over the exact model
  /// distribution: sum over syndromes of (total mass - best label mass).
  double expected_error_rate() const {
    double err = 0.0;
    for (const auto& [key, entry] : table_)
      err += entry.total - entry.label_mass[static_cast<std::size_t>(entry.best_label)];
    return err;
  }

 private:
  void enumerate(const CompiledMechanisms& mechs, std::size_t i, double prob, BitVec& syndrome,
                 uint64_t label) {
    if (i == mechs.probabilities.size()) {
      Entry& entry = table_[syndrome];
      if (entry.label_mass.empty())
        entry.label_mass.assign(std::size_t{1} << num_observables_, 0.0);
      entry.label_mass[label] += prob;
      return;
    }
    enumerate(mechs, i + 1, prob * (1.0 - mechs.probabilities[i]), syndrome, label);
    syndrome ^= mechs.detector_masks[i];
    enumerate(mechs, i + 1, prob * mechs.probabilities[i], syndrome,
              label ^ mechs.observable_masks[i].low64());
    syndrome ^= mechs.detector_masks[i];
  }

  int num_detectors_;
  int num_observables_;
  std::unordered_map<BitVec, Entry, BitVecHash> table_;
};

/// One-shot convenience wrapper; builds the table each call.
inline BitVec mld_decode(const DetectorErrorModel& model, const BitVec& syndrome) {
  return MldDecoder(model).decode(syndrome);
}

}  // namespace qdec
