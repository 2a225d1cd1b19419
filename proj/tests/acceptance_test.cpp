// Acceptance suite: one test per release criterion, each printing its own
// pass/fail line. Tolerances are fixed here, not tuned at runtime.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <thread>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "qdec/qdec.hpp"

using namespace qdec;
namespace fs = std::filesystem;

namespace {

int hw_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(n, 1u, 8u));
}

BitVec random_bits(std::mt19937_64& eng, int n, bool force_nonzero = false) {
  BitVec v(n);
  for (int i = 0; i < n; ++i) v.set(i, eng() & 1);
  if (force_nonzero && !v.any()) v.set(static_cast<int>(eng() % n), true);
  return v;
}

double fd_loss_gradient(const AnsatzConfig& cfg, const ParameterSet& params, bool is_theta,
                        std::size_t j, const BitVec& syndrome, const BitVec& label) {
  const double h = 1e-5;
  auto loss_at = [&](double delta) {
    ParameterSet p = params;
    (is_theta ? p.theta : p.phi)[j] += delta;
    return loss_and_gradient(cfg, p, syndrome, label).loss;
  };
  return (loss_at(h) - loss_at(-h)) / (2.0 * h);
}

}  // namespace

// Criterion 1: adjoint gradients match central finite differences (step
// 1e-5) to relative error 1e-5 on 200 random instances with Q <= 4, B <= 3,
// m <= 5 (absolute floor 1e-8 for near-zero entries).
TEST(Acceptance, C1_GradientCorrectness) {
  std::mt19937_64 eng(0xC1);
  int instances = 0;
  std::size_t coords_checked = 0;
  while (instances < 200) {
    int q = 1 + static_cast<int>(eng() % 4);
    int b = 1 + static_cast<int>(eng() % 3);
    int m = 1 + static_cast<int>(eng() % 5);
    int l = 1 + static_cast<int>(eng() % q);
    AnsatzConfig cfg = make_ansatz_config(q, b, m, l,
                                          (eng() & 1) ? Entangler::CzChain : Entangler::CnotChain);
    ParameterSet params = init_params(cfg, 1.0, eng());
    BitVec syndrome = random_bits(eng, m, true);
    BitVec label = random_bits(eng, l);
    LossGrad lg = loss_and_gradient(cfg, params, syndrome, label);
    // Near-zero label probabilities make the finite-difference oracle
    // itself ill-conditioned; redraw the instance instead of loosening the
    // tolerance.
    if (lg.label_prob < 1e-2) continue;
    ++instances;
    for (std::size_t j = 0; j < params.theta.size(); ++j) {
      for (bool is_theta : {true, false}) {
        double analytic = is_theta ? lg.grad.theta[j] : lg.grad.phi[j];
        double numeric = fd_loss_gradient(cfg, params, is_theta, j, syndrome, label);
        double tol = 1e-5 * std::max(std::abs(analytic), std::abs(numeric)) + 1e-8;
        ASSERT_NEAR(analytic, numeric, tol)
            << "instance " << instances << " coord " << j << (is_theta ? " theta" : " phi");
        ++coords_checked;
      }
    }
  }
  ASSERT_GE(coords_checked, 400u);
}

// Criterion 2: on 50 random DEMs with <= 10 mechanisms, (a) the sampler's
// joint (gamma, beta) distribution matches exhaustive enumeration within TV
// distance 0.01 at 200k shots; (b) MWPM is never better than MLD on the
// exact syndrome distribution; (c) subset-DP matching equals brute-force
// matching enumeration.
TEST(Acceptance, C2_OracleEquivalence) {
  std::mt19937_64 eng(0xC2);
  const int workers = hw_workers();
  for (int rep = 0; rep < 50; ++rep) {
    // Probabilities in the decoder-realistic range keep the joint support
    // small enough that 200k shots can resolve it to TV 0.01.
    DetectorErrorModel model = oracles::random_graphlike_dem(eng, 6, 10, 1, 0.01, 0.10);
    auto exact = oracles::exact_joint_distribution(model);

    // (a) sampler total-variation distance at 200k shots.
    const std::size_t n = 200000;
    ShotSet shots = sample_shots(model, n, 0xC2000 + rep, workers);
    std::map<oracles::JointKey, double> empirical;
    for (const Shot& s : shots.shots)
      empirical[{s.syndrome.to01(), s.label.to01()}] += 1.0 / static_cast<double>(n);
    double tv = 0.0;
    for (const auto& [key, p] : exact) {
      auto it = empirical.find(key);
      tv += std::abs(p - (it == empirical.end() ? 0.0 : it->second));
    }
    for (const auto& [key, p] : empirical)
      if (!exact.count(key)) tv += p;
    tv *= 0.5;
    ASSERT_LT(tv, 0.01) << "rep " << rep;

    // (b) MLD optimality against MWPM on the exact distribution.
    MldDecoder mld(model);
    MatchingGraph graph = extract_matching_graph(model);
    double mld_err = 0.0, mwpm_err = 0.0;
    for (const auto& [key, prob] : exact) {
      BitVec syndrome = BitVec::from01(key.syndrome);
      BitVec label = BitVec::from01(key.label);
      if (!(mld.decode(syndrome) == label)) mld_err += prob;
      if (!(mwpm_decode(graph, syndrome) == label)) mwpm_err += prob;
    }
    ASSERT_GE(mwpm_err, mld_err - 1e-12) << "rep " << rep;

    // (c) subset-DP equals brute-force matching enumeration.
    int checked = 0;
    while (checked < 5) {
      BitVec syndrome(model.num_detectors);
      for (const auto& mech : model.mechanisms)
        if (eng() & 1)
          for (int d : mech.detectors) syndrome.flip(d);
      std::vector<int> fired;
      for (int i = 0; i < model.num_detectors; ++i)
        if (syndrome.get(i)) fired.push_back(i);
      if (fired.empty() || fired.size() > 8) {
        if (!syndrome.any()) break;  // all-zero stays all-zero; move on
        continue;
      }
      ++checked;
      MwpmResult dp = mwpm_decode_full(graph, syndrome);
      std::vector<int> nodes = fired;
      if (nodes.size() % 2 == 1) nodes.push_back(graph.boundary());
      std::vector<std::vector<double>> dist(nodes.size(), std::vector<double>(nodes.size()));
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto paths = qdec::detail::shortest_paths(graph, nodes[i]);
        for (std::size_t j = 0; j < nodes.size(); ++j) dist[i][j] = paths[nodes[j]].dist;
      }
      ASSERT_NEAR(dp.weight, oracles::brute_force_matching(dist), 1e-9) << "rep " << rep;
    }
  }
}

// Criterion 3: for 100 random parameter sets, q(beta=0 | gamma=0) = 1
// within 1e-10 and predict(gamma=0) = 0.
TEST(Acceptance, C3_ZeroSyndromeInvariant) {
  std::mt19937_64 eng(0xC3);
  for (int rep = 0; rep < 100; ++rep) {
    int q = 1 + static_cast<int>(eng() % 4);
    int b = 1 + static_cast<int>(eng() % 4);
    int m = 1 + static_cast<int>(eng() % 6);
    int l = 1 + static_cast<int>(eng() % q);
    AnsatzConfig cfg = make_ansatz_config(q, b, m, l,
                                          (eng() & 1) ? Entangler::CzChain : Entangler::CnotChain);
    ParameterSet params = init_params(cfg, 2.0, eng());
    StateVector state = run(build_plan(cfg, params, BitVec(m)), cfg.num_qubits);
    ASSERT_NEAR(label_probability(state, cfg.readout, BitVec(l)), 1.0, 1e-10) << "rep " << rep;
    ASSERT_FALSE(predict(params, cfg, BitVec(m)).any()) << "rep " << rep;
  }
}

// Criterion 4: distance-3, 2-round repetition code at p = 0.05, Q = 3,
// B = 10, 20k train / 10k test shots, <= 500 epochs: the trained test LER
// lands within 2 binomial sigma of the exact-MLD LER on the same shots.
TEST(Acceptance, C4_RepetitionTrainingReachesMld) {
  CodeSpec spec;
  spec.family = CodeFamily::Repetition;
  spec.distance = 3;
  spec.rounds = 2;
  spec.p = 0.05;
  DetectorErrorModel model = build_repetition_dem(spec);

  ShotSet train_shots = sample_shots(model, 20000, 41, hw_workers());
  ShotSet test_shots = sample_shots(model, 10000, 42, hw_workers());

  AnsatzConfig ansatz = make_ansatz_config(3, 10, model.num_detectors, 1);
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.eval_every = 25;
  cfg.seed = 4;
  cfg.workers = hw_workers();
  TrainResult result = train(model, ansatz, train_shots, test_shots, cfg);

  MldDecoder mld(model);
  std::size_t mld_errors = 0;
  for (const Shot& s : test_shots.shots) mld_errors += !(mld.decode(s.syndrome) == s.label);
  double mld_ler = static_cast<double>(mld_errors) / static_cast<double>(test_shots.shots.size());
  double sigma = std::sqrt(mld_ler * (1 - mld_ler) / static_cast<double>(test_shots.shots.size()));

  std::printf("[ acceptance ] C4: trained test LER %.5f, MLD %.5f, 2 sigma %.5f\n",
              result.best_test_ler, mld_ler, 2 * sigma);
  ASSERT_LE(result.best_test_ler, mld_ler + 2 * sigma);
}

// Criterion 5: on the checked-in distance-3, 4-round, p = 0.001 depolarizing
// circuit-level DEM fixture, with Q = 3, B = 10, 50k train / 50k test shots
// and >= 2000 epochs, the trained test LER is within 2 binomial sigma of
// MWPM on the same test shots. The full-scale protocol (10^4 epochs, 200k
// shots) stays behind the CLI's --paper-scale flag.
TEST(Acceptance, C5_SurfaceCodeParityWithMwpm) {
  const std::string fixture = std::string(QDEC_DATA_DIR) + "/surface_d3_r4_p001.dem";
  std::ifstream in(fixture, std::ios::binary);
  ASSERT_TRUE(in) << "missing fixture " << fixture;
  DetectorErrorModel model = parse_dem(in);

  const int workers = hw_workers();
  ShotSet train_shots = sample_shots(model, 50000, 51, workers);
  ShotSet test_shots = sample_shots(model, 50000, 52, workers);

  MatchingGraph graph = extract_matching_graph(model);
  std::unordered_map<BitVec, BitVec, BitVecHash> memo;
  std::size_t mwpm_errors = 0, mwpm_failures = 0;
  for (const Shot& s : test_shots.shots) {
    auto it = memo.find(s.syndrome);
    if (it == memo.end()) {
      BitVec label(model.num_observables);
      try {
        label = mwpm_decode(graph, s.syndrome);
      } catch (const MatchingError&) {
        ++mwpm_failures;
      }
      it = memo.emplace(s.syndrome, std::move(label)).first;
    }
    if (!(it->second == s.label)) ++mwpm_errors;
  }
  double mwpm_ler =
      static_cast<double>(mwpm_errors) / static_cast<double>(test_shots.shots.size());
  double sigma =
      std::sqrt(mwpm_ler * (1 - mwpm_ler) / static_cast<double>(test_shots.shots.size()));

  AnsatzConfig ansatz = make_ansatz_config(3, 10, model.num_detectors, model.num_observables);
  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.eval_every = 100;
  cfg.seed = 5;
  cfg.workers = workers;
  TrainResult result = train(model, ansatz, train_shots, test_shots, cfg);

  std::printf(
      "[ acceptance ] C5: trained test LER %.6f, MWPM %.6f (failures %zu), 2 sigma %.6f\n",
      result.best_test_ler, mwpm_ler, mwpm_failures, 2 * sigma);
  ASSERT_LE(result.best_test_ler, mwpm_ler + 2 * sigma);
}

// Criterion 6: every one of the 8 injected-error patterns gives coherent and
// classical flip probabilities equal within 1e-9; with trained parameters at
// p = 0.05 the self-corrected LER beats the raw injected flip rate by at
// least 2 sigma over 20000 trajectories.
TEST(Acceptance, C6_SelfCorrectionEquivalence) {
  const double p = 0.05;
  CodeSpec spec;
  spec.family = CodeFamily::Repetition;
  spec.distance = 3;
  spec.rounds = 1;
  spec.noise = NoiseModel::CodeCapacity;
  spec.p = p;
  DetectorErrorModel model = build_repetition_dem(spec);

  ShotSet shots = sample_shots(model, 16000, 61, hw_workers());
  auto [data, test] = split_train_test(shots, 0.75);

  AnsatzConfig classical = make_ansatz_config(2, 3, 2, 1);
  classical.readout = {1};  // the second decoding qubit drives the correction
  TrainConfig tc;
  tc.epochs = 150;
  tc.eval_every = 30;
  tc.seed = 6;
  tc.learning_rate = 0.02;
  tc.workers = hw_workers();
  TrainResult trained = train(model, classical, data, test, tc);

  SelfCorrectConfig cfg;
  cfg.decode_qubits = 2;
  cfg.blocks = 3;
  cfg.params = trained.best_params;
  cfg.control_qubit = 1;
  cfg.p = p;
  cfg.shots = 20000;
  cfg.seed = 66;

  auto rows = equivalence_check(cfg, classical, trained.best_params);
  double max_diff = 0.0;
  for (const auto& row : rows) max_diff = std::max(max_diff, row.abs_diff);
  ASSERT_LT(max_diff, 1e-9);

  TrajectoryResult result = run_selfcorrect(cfg);
  double sigma = std::sqrt(
      result.std_err * result.std_err +
      result.uncorrected_rate * (1 - result.uncorrected_rate) / static_cast<double>(cfg.shots));
  std::printf("[ acceptance ] C6: self-corrected LER %.5f vs uncorrected %.5f (2 sigma %.5f)\n",
              result.ler, result.uncorrected_rate, 2 * sigma);
  ASSERT_LT(result.ler, result.uncorrected_rate - 2 * sigma);
}

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(QDEC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// The seconds column records wall time and is the one legitimately
/// nondeterministic field; everything else must match byte for byte.
std::string mask_seconds_column(const std::string& csv) {
  return std::regex_replace(csv, std::regex(",[^,\n]*\n"), ",*\n");
}

}  // namespace

// Criterion 7: two `train` runs from identical manifests produce
// byte-identical trace CSVs (timing column aside) and byte-identical
// checkpoints, for worker counts 1 and 4.
TEST(Acceptance, C7_TrainDeterminism) {
  fs::path dir = fs::temp_directory_path() / ("qdec_accept7_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };

  ASSERT_EQ(run_cli("gen-dem --family repetition --distance 3 --rounds 2 --p 0.05 --out " +
                    p("d.dem")),
            0);
  ASSERT_EQ(run_cli("sample --dem " + p("d.dem") + " --n 2000 --seed 1 --out " + p("tr.01")), 0);
  ASSERT_EQ(run_cli("sample --dem " + p("d.dem") + " --n 1000 --seed 2 --out " + p("te.01")), 0);

  const std::string base = "train --dem " + p("d.dem") + " --train " + p("tr.01") + " --test " +
                           p("te.01") +
                           " --qubits 3 --blocks 4 --epochs 20 --eval-every 5 --seed 9 ";
  ASSERT_EQ(run_cli(base + "--workers 1 --out-prefix " + p("w1a")), 0);
  ASSERT_EQ(run_cli(base + "--workers 1 --out-prefix " + p("w1b")), 0);
  ASSERT_EQ(run_cli(base + "--workers 4 --out-prefix " + p("w4")), 0);

  EXPECT_EQ(slurp(p("w1a.best.ckpt")), slurp(p("w1b.best.ckpt")));
  EXPECT_EQ(slurp(p("w1a.final.ckpt")), slurp(p("w1b.final.ckpt")));
  EXPECT_EQ(slurp(p("w1a.best.ckpt")), slurp(p("w4.best.ckpt")));
  EXPECT_EQ(slurp(p("w1a.final.ckpt")), slurp(p("w4.final.ckpt")));

  std::string raw = slurp(p("w1a.trace.csv"));
  EXPECT_EQ(raw.rfind("epoch,train_loss,train_ler,test_ler,seconds\n", 0), 0u);
  std::string t1a = mask_seconds_column(raw);
  std::string t1b = mask_seconds_column(slurp(p("w1b.trace.csv")));
  std::string t4 = mask_seconds_column(slurp(p("w4.trace.csv")));
  EXPECT_EQ(t1a, t1b);
  EXPECT_EQ(t1a, t4);

  fs::remove_all(dir);
}
