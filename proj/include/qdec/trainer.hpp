#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qdec/ansatz.hpp"
#include "qdec/bitvec.hpp"
#include "qdec/dem.hpp"
#include "qdec/parallel.hpp"
#include "qdec/rng.hpp"
#include "qdec/sampler.hpp"
#include "qdec/simulator.hpp"

namespace qdec {

class FingerprintMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 256;
  double learning_rate = 0.005;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double init_scale = 0.1;
  int eval_every = 10;
  uint64_t seed = 0;
  int workers = 1;

  void validate() const {
    if (epochs < 1 || batch_size < 1 || eval_every < 1 || workers < 1)
      throw std::invalid_argument("train config: counts must be >= 1");
    if (!(learning_rate > 0.0) || !(adam_eps > 0.0) || !(init_scale > 0.0))
      throw std::invalid_argument("train config: rates must be > 0");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
      throw std::invalid_argument("train config: betas must lie in (0, 1)");
  }
};

struct TraceRow {
  int epoch = 0;
  double train_loss = 0.0;
  double train_ler = 0.0;
  double test_ler = 0.0;
  double seconds = 0.0;
};

struct TrainingTrace {
  std::vector<TraceRow> rows;
};

/// i.i.d. uniform initialization on [-scale, +scale], theta then phi in
/// row-major [q][b][i] order.
inline ParameterSet init_params(const AnsatzConfig& cfg, double scale, uint64_t seed) {
  cfg.validate();
  if (!(scale > 0.0)) throw std::invalid_argument("init_params: scale must be > 0");
  ParameterSet p = ParameterSet::zeros(cfg);
  std::mt19937_64 eng = make_engine(seed, 0x1A17);
  for (double& v : p.theta) v = scale * (2.0 * uniform01(eng) - 1.0);
  for (double& v : p.phi) v = scale * (2.0 * uniform01(eng) - 1.0);
  return p;
}

enum class PredictMode { Argmax, Sample };

inline BitVec label_from_index(std::size_t idx, std::size_t bits) {
  BitVec v(bits);
  for (std::size_t j = 0; j < bits; ++j)
    if ((idx >> j) & 1u) v.set(j, true);
  return v;
}

/// Argmax mode returns the label maximizing q(beta|gamma), ties toward the
/// lowest binary value; sample mode draws from the distribution with the
/// given seed.
inline BitVec predict(const ParameterSet& params, const AnsatzConfig& cfg, const BitVec& syndrome,
                      PredictMode mode = PredictMode::Argmax, uint64_t seed = 0) {
  StateVector state = run(build_plan(cfg, params, syndrome), cfg.num_qubits);
  OutcomeDistribution dist = readout_distribution(state, cfg.readout);
  if (mode == PredictMode::Argmax) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < dist.probs.size(); ++b)
      if (dist.probs[b] > dist.probs[best]) best = b;
    return label_from_index(best, cfg.readout.size());
  }
  std::mt19937_64 eng = make_engine(seed, 0x5A3B);
  double u = uniform01(eng);
  double acc = 0.0;
  std::size_t pick = dist.probs.size() - 1;
  for (std::size_t b = 0; b < dist.probs.size(); ++b) {
    acc += dist.probs[b];
    if (u < acc) {
      pick = b;
      break;
    }
  }
  return label_from_index(pick, cfg.readout.size());
}

namespace detail {

struct PairKey {
  BitVec syndrome, label;
  bool operator==(const PairKey& o) const { return syndrome == o.syndrome && label == o.label; }
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    return k.syndrome.hash() * 1000003u ^ k.label.hash();
  }
};

struct ShotGroup {
  BitVec syndrome, label;
  std::size_t count = 0;
};

/// Collapses shots to unique (syndrome, label) pairs, ordered by first
/// occurrence. Identical shots share one circuit evaluation.
template <class GetShot>
std::vector<ShotGroup> group_shots(std::size_t n, GetShot&& get) {
  std::vector<ShotGroup> groups;
  std::unordered_map<PairKey, std::size_t, PairKeyHash> index;
  for (std::size_t i = 0; i < n; ++i) {
    const Shot& s = get(i);
    PairKey key{s.syndrome, s.label};
    auto [it, inserted] = index.emplace(std::move(key), groups.size());
    if (inserted)
      groups.push_back({s.syndrome, s.label, 1});
    else
      ++groups[it->second].count;
  }
  return groups;
}

}  // namespace detail

/// Count-weighted mean loss and gradient over a list of shot groups.
/// Per-group results are computed in parallel but always combined in group
/// order, so the outcome does not depend on the worker count.
inline LossGrad batch_loss_and_gradient(const AnsatzConfig& cfg, const ParameterSet& params,
                                        const std::vector<detail::ShotGroup>& groups,
                                        std::size_t total_count, int workers = 1) {
  std::vector<LossGrad> per_group(groups.size());
  parallel_for(groups.size(), workers, [&](std::size_t g) {
    per_group[g] = loss_and_gradient(cfg, params, groups[g].syndrome, groups[g].label);
  });
  LossGrad out;
  out.grad = ParameterSet::zeros(cfg);
  const double inv = 1.0 / static_cast<double>(total_count);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double w = static_cast<double>(groups[g].count) * inv;
    out.loss += w * per_group[g].loss;
    for (std::size_t j = 0; j < out.grad.theta.size(); ++j) {
      out.grad.theta[j] += w * per_group[g].grad.theta[j];
      out.grad.phi[j] += w * per_group[g].grad.phi[j];
    }
  }
  return out;
}

struct EvalResult {
  double loss = 0.0;
  double ler = 0.0;
  std::size_t errors = 0;
  std::size_t shots = 0;
};

/// Mean cross-entropy and argmax logical error rate over a shot set.
/// Each unique syndrome is simulated once.
inline EvalResult evaluate(const ParameterSet& params, const AnsatzConfig& cfg,
                           const ShotSet& shots, int workers = 1) {
  if (shots.shots.empty()) throw std::invalid_argument("evaluate: empty shot set");
  auto groups =
      detail::group_shots(shots.shots.size(), [&](std::size_t i) -> const Shot& { return shots.shots[i]; });

  std::vector<BitVec> unique_syndromes;
  std::unordered_map<BitVec, std::size_t, BitVecHash> syn_index;
  for (const auto& g : groups) {
    if (syn_index.emplace(g.syndrome, unique_syndromes.size()).second)
      unique_syndromes.push_back(g.syndrome);
  }

  std::vector<OutcomeDistribution> dists(unique_syndromes.size());
  parallel_for(unique_syndromes.size(), workers, [&](std::size_t i) {
    StateVector state = run(build_plan(cfg, params, unique_syndromes[i]), cfg.num_qubits);
    dists[i] = readout_distribution(state, cfg.readout);
  });

  EvalResult out;
  out.shots = shots.shots.size();
  for (const auto& g : groups) {
    const OutcomeDistribution& dist = dists[syn_index.at(g.syndrome)];
    std::size_t label_idx = g.label.low64();
    out.loss += static_cast<double>(g.count) *
                -std::log(std::max(dist.probs[label_idx], kProbFloor));
    std::size_t best = 0;
    for (std::size_t b = 1; b < dist.probs.size(); ++b)
      if (dist.probs[b] > dist.probs[best]) best = b;
    if (best != label_idx) out.errors += g.count;
  }
  out.loss /= static_cast<double>(out.shots);
  out.ler = static_cast<double>(out.errors) / static_cast<double>(out.shots);
  return out;
}

inline double logical_error_rate(const ParameterSet& params, const AnsatzConfig& cfg,
                                 const ShotSet& shots, int workers = 1) {
  return evaluate(params, cfg, shots, workers).ler;
}

struct TrainResult {
  ParameterSet best_params;
  int best_epoch = 0;
  double best_test_ler = 0.0;
  ParameterSet final_params;
  TrainingTrace trace;
};

/// Mini-batch Adam on the mean cross-entropy. Batches are drawn from a
/// deterministic per-epoch shuffle; the trace is recorded every
/// `eval_every` epochs (and at the last); the returned checkpoint is the
/// one with the lowest test LER seen at an evaluation point. `on_eval`,
/// when given, fires after each recorded row (progress logging).
inline TrainResult train(const DetectorErrorModel& model, const AnsatzConfig& ansatz,
                         const ShotSet& data, const ShotSet& test, const TrainConfig& cfg,
                         const std::function<void(const TraceRow&)>& on_eval = {}) {
  cfg.validate();
  ansatz.validate();
  if (data.shots.empty() || test.shots.empty())
    throw std::invalid_argument("train: empty shot set");
  const uint64_t fp = dem_fingerprint(model);
  if (data.fingerprint != fp || test.fingerprint != fp)
    throw FingerprintMismatch("train: shot set fingerprint does not match the model");
  if (ansatz.syndrome_length != model.num_detectors)
    throw std::invalid_argument("train: ansatz syndrome length != model detectors");
  if (static_cast<int>(ansatz.readout.size()) != model.num_observables)
    throw std::invalid_argument("train: readout length != model observables");

  ParameterSet params = init_params(ansatz, cfg.init_scale, cfg.seed);
  const std::size_t n_params = params.theta.size();
  std::vector<double> m1(2 * n_params, 0.0), m2(2 * n_params, 0.0);
  int64_t step = 0;

  auto adam_update = [&](const ParameterSet& grad) {
    ++step;
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
    for (std::size_t j = 0; j < 2 * n_params; ++j) {
      double g = j < n_params ? grad.theta[j] : grad.phi[j - n_params];
      double& v = j < n_params ? params.theta[j] : params.phi[j - n_params];
      m1[j] = cfg.adam_beta1 * m1[j] + (1.0 - cfg.adam_beta1) * g;
      m2[j] = cfg.adam_beta2 * m2[j] + (1.0 - cfg.adam_beta2) * g * g;
      v -= cfg.learning_rate * (m1[j] / c1) / (std::sqrt(m2[j] / c2) + cfg.adam_eps);
    }
  };

  TrainResult result;
  result.best_test_ler = std::numeric_limits<double>::infinity();
  const std::size_t n = data.shots.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const auto t0 = std::chrono::steady_clock::now();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::mt19937_64 shuffle_eng = make_engine(cfg.seed, 0xE70C0000ULL + static_cast<uint64_t>(epoch));
    deterministic_shuffle(order, shuffle_eng);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      auto groups = detail::group_shots(
          stop - start, [&](std::size_t i) -> const Shot& { return data.shots[order[start + i]]; });
      LossGrad batch = batch_loss_and_gradient(ansatz, params, groups, stop - start, cfg.workers);
      adam_update(batch.grad);
    }

    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      EvalResult train_eval = evaluate(params, ansatz, data, cfg.workers);
      EvalResult test_eval = evaluate(params, ansatz, test, cfg.workers);
      double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      result.trace.rows.push_back(
          {epoch, train_eval.loss, train_eval.ler, test_eval.ler, seconds});
      if (on_eval) on_eval(result.trace.rows.back());
      if (test_eval.ler < result.best_test_ler) {
        result.best_test_ler = test_eval.ler;
        result.best_epoch = epoch;
        result.best_params = params;
      }
    }
  }
  result.final_params = params;
  return result;
}

/// Trace CSV: `epoch,train_loss,train_ler,test_ler,seconds`.
inline constexpr const char* kTraceHeader = "epoch,train_loss,train_ler,test_ler,seconds\n";

inline std::string format_trace_row(const TraceRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%.12g,%.9g,%.9g,%.3f\n", r.epoch, r.train_loss, r.train_ler,
                r.test_ler, r.seconds);
  return buf;
}

inline void write_trace_csv(const TrainingTrace& trace, std::ostream& out) {
  out << kTraceHeader;
  for (const TraceRow& r : trace.rows) out << format_trace_row(r);
}

inline void write_trace_csv_file(const TrainingTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_trace_csv(trace, out);
}

}  // namespace qdec
