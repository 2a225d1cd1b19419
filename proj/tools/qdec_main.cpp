// qdec: command-line workbench tying the decoder library into reproducible
// experiments. Every command resolves its options, runs, and writes a
// machine-readable run manifest next to its outputs.
//
// Exit codes: 0 success, 2 usage error, 3 fingerprint mismatch, 4 file
// error, 1 anything else.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdec/qdec.hpp"

using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFingerprint = 3;
constexpr int kExitFile = 4;

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot open for writing: " + path);
  out << data;
}

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

qdec::DetectorErrorModel load_dem(const std::string& path) {
  std::istringstream in(read_file(path));
  return qdec::parse_dem(in);
}

qdec::ShotSet load_shots(const std::string& path) {
  std::istringstream in(read_file(path));
  return qdec::read_shots(in);
}

struct ManifestWriter {
  json j;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  ManifestWriter(const std::string& command) {
    j["command"] = command;
    j["artifact_version"] = qdec::kVersion;
    j["options"] = json::object();
    j["inputs"] = json::object();
  }
  void option(const std::string& key, const json& value) { j["options"][key] = value; }
  void input(const std::string& path, const std::string& bytes) {
    j["inputs"][path] = qdec::fingerprint_hex(fnv1a(bytes));
  }
  void extra(const std::string& key, const json& value) { j[key] = value; }
  void write(const std::string& path) {
    j["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file(path, j.dump(2) + "\n");
  }
};

double binomial_stderr(double rate, std::size_t n) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

// ---------------------------------------------------------------------------

struct GenDemArgs {
  std::string family, noise, out;
  int distance = 3, rounds = 1;
  double p = 0.0;
};

int run_gen_dem(const GenDemArgs& a) {
  ManifestWriter manifest("gen-dem");
  qdec::CodeSpec spec;
  spec.family = a.family == "repetition" ? qdec::CodeFamily::Repetition
                                         : qdec::CodeFamily::RotatedSurface;
  std::string noise = a.noise;
  if (noise.empty())
    noise = a.family == "repetition" ? "circuit-level-phenomenological" : "code-capacity";
  spec.noise = noise == "code-capacity" ? qdec::NoiseModel::CodeCapacity
                                        : qdec::NoiseModel::CircuitLevelPhenomenological;
  spec.distance = a.distance;
  spec.rounds = a.rounds;
  spec.p = a.p;

  qdec::DetectorErrorModel model = qdec::build_dem(spec);
  write_file(a.out, qdec::serialize_dem(model));

  manifest.option("family", a.family);
  manifest.option("noise", noise);
  manifest.option("distance", a.distance);
  manifest.option("rounds", a.rounds);
  manifest.option("p", a.p);
  manifest.option("out", a.out);
  manifest.extra("dem_fingerprint", qdec::fingerprint_hex(qdec::dem_fingerprint(model)));
  manifest.extra("detectors", model.num_detectors);
  manifest.extra("observables", model.num_observables);
  manifest.extra("mechanisms", model.mechanisms.size());
  manifest.write(a.out + ".manifest.json");

  std::cout << "wrote " << a.out << ": m=" << model.num_detectors
            << " L=" << model.num_observables << " mechanisms=" << model.mechanisms.size()
            << "\n";
  return kExitOk;
}

struct SampleArgs {
  std::string dem, out;
  std::size_t n = 0;
  uint64_t seed = 0;
  int workers = 1;
};

int run_sample(const SampleArgs& a) {
  ManifestWriter manifest("sample");
  std::string dem_text = read_file(a.dem);
  manifest.input(a.dem, dem_text);
  std::istringstream dem_in(dem_text);
  qdec::DetectorErrorModel model = qdec::parse_dem(dem_in);

  qdec::ShotSet shots = qdec::sample_shots(model, a.n, a.seed, a.workers);
  qdec::write_shots_file(shots, a.out);

  manifest.option("dem", a.dem);
  manifest.option("n", a.n);
  manifest.option("seed", a.seed);
  manifest.option("workers", a.workers);
  manifest.option("out", a.out);
  manifest.extra("dem_fingerprint", qdec::fingerprint_hex(shots.fingerprint));
  manifest.write(a.out + ".manifest.json");
  std::cout << "wrote " << a.out << ": " << shots.shots.size() << " shots\n";
  return kExitOk;
}

struct TrainArgs {
  std::string dem, train_path, test_path, prefix, entangler = "cz-chain";
  int qubits = 3, blocks = 10;
  qdec::TrainConfig cfg;
  bool paper_scale = false;
};

int run_train(const TrainArgs& a) {
  ManifestWriter manifest("train");
  std::string dem_text = read_file(a.dem);
  std::string train_text = read_file(a.train_path);
  std::string test_text = read_file(a.test_path);
  manifest.input(a.dem, dem_text);
  manifest.input(a.train_path, train_text);
  manifest.input(a.test_path, test_text);

  std::istringstream dem_in(dem_text);
  qdec::DetectorErrorModel model = qdec::parse_dem(dem_in);
  std::istringstream train_in(train_text), test_in(test_text);
  qdec::ShotSet train_shots = qdec::read_shots(train_in);
  qdec::ShotSet test_shots = qdec::read_shots(test_in);

  qdec::TrainConfig cfg = a.cfg;
  if (a.paper_scale) cfg.epochs = 10000;

  qdec::AnsatzConfig ansatz = qdec::make_ansatz_config(
      a.qubits, a.blocks, model.num_detectors, model.num_observables,
      qdec::entangler_from_name(a.entangler));

  // Stream the trace while training runs; the final rewrite below produces
  // the same bytes.
  std::ofstream live_trace(a.prefix + ".trace.csv", std::ios::binary);
  if (!live_trace) throw FileError("cannot open for writing: " + a.prefix + ".trace.csv");
  live_trace << qdec::kTraceHeader << std::flush;
  qdec::TrainResult result =
      qdec::train(model, ansatz, train_shots, test_shots, cfg, [&](const qdec::TraceRow& row) {
        live_trace << qdec::format_trace_row(row) << std::flush;
      });
  live_trace.close();

  qdec::write_trace_csv_file(result.trace, a.prefix + ".trace.csv");
  qdec::write_checkpoint_file(ansatz, result.best_params, a.prefix + ".best.ckpt");
  qdec::write_checkpoint_file(ansatz, result.final_params, a.prefix + ".final.ckpt");

  const qdec::TraceRow& last = result.trace.rows.back();
  json summary;
  summary["final"] = {{"epoch", last.epoch},
                      {"train_loss", last.train_loss},
                      {"train_ler", last.train_ler},
                      {"test_ler", last.test_ler}};
  summary["best"] = {{"epoch", result.best_epoch}, {"test_ler", result.best_test_ler}};
  summary["hyperparameters"] = {{"qubits", a.qubits},
                                {"blocks", a.blocks},
                                {"entangler", a.entangler},
                                {"epochs", cfg.epochs},
                                {"batch_size", cfg.batch_size},
                                {"learning_rate", cfg.learning_rate},
                                {"adam_beta1", cfg.adam_beta1},
                                {"adam_beta2", cfg.adam_beta2},
                                {"adam_eps", cfg.adam_eps},
                                {"init_scale", cfg.init_scale},
                                {"eval_every", cfg.eval_every},
                                {"seed", cfg.seed},
                                {"workers", cfg.workers}};
  summary["dem_fingerprint"] = qdec::fingerprint_hex(qdec::dem_fingerprint(model));
  summary["train_shots"] = train_shots.shots.size();
  summary["test_shots"] = test_shots.shots.size();
  write_file(a.prefix + ".summary.json", summary.dump(2) + "\n");

  for (const auto& [key, value] : summary["hyperparameters"].items())
    manifest.option(key, value);
  manifest.option("dem", a.dem);
  manifest.option("train", a.train_path);
  manifest.option("test", a.test_path);
  manifest.option("out_prefix", a.prefix);
  manifest.option("paper_scale", a.paper_scale);
  manifest.extra("best_test_ler", result.best_test_ler);
  manifest.extra("best_epoch", result.best_epoch);
  manifest.write(a.prefix + ".manifest.json");

  std::cout << "train done: best test LER " << result.best_test_ler << " at epoch "
            << result.best_epoch << " (final " << last.test_ler << ")\n";
  return kExitOk;
}

struct EvalArgs {
  std::string checkpoint, shots, dem, out;
  int workers = 1;
};

int run_eval(const EvalArgs& a) {
  ManifestWriter manifest("eval");
  std::string ckpt_text = read_file(a.checkpoint);
  std::string shots_text = read_file(a.shots);
  manifest.input(a.checkpoint, ckpt_text);
  manifest.input(a.shots, shots_text);

  std::istringstream ckpt_in(ckpt_text);
  auto [ansatz, params] = qdec::read_checkpoint(ckpt_in);
  std::istringstream shots_in(shots_text);
  qdec::ShotSet shots = qdec::read_shots(shots_in);

  if (!a.dem.empty()) {
    std::string dem_text = read_file(a.dem);
    manifest.input(a.dem, dem_text);
    std::istringstream dem_in(dem_text);
    qdec::DetectorErrorModel model = qdec::parse_dem(dem_in);
    if (qdec::dem_fingerprint(model) != shots.fingerprint)
      throw qdec::FingerprintMismatch("shot file fingerprint does not match --dem");
  }

  qdec::EvalResult eval = qdec::evaluate(params, ansatz, shots, a.workers);
  double se = binomial_stderr(eval.ler, eval.shots);
  std::cout << "LER " << eval.ler << " (" << eval.errors << "/" << eval.shots << ", 95% CI +/- "
            << 1.96 * se << ")\n";

  if (!a.out.empty()) {
    json summary = {{"ler", eval.ler},
                    {"errors", eval.errors},
                    {"shots", eval.shots},
                    {"stderr", se},
                    {"loss", eval.loss}};
    write_file(a.out, summary.dump(2) + "\n");
    manifest.option("checkpoint", a.checkpoint);
    manifest.option("shots", a.shots);
    manifest.option("out", a.out);
    manifest.write(a.out + ".manifest.json");
  }
  return kExitOk;
}

struct DecodeArgs {
  std::string checkpoint, shots, out, mode = "argmax";
  uint64_t seed = 0;
  bool seed_given = false;
};

int run_decode(const DecodeArgs& a) {
  ManifestWriter manifest("decode");
  std::string ckpt_text = read_file(a.checkpoint);
  std::string shots_text = read_file(a.shots);
  manifest.input(a.checkpoint, ckpt_text);
  manifest.input(a.shots, shots_text);

  std::istringstream ckpt_in(ckpt_text);
  auto [ansatz, params] = qdec::read_checkpoint(ckpt_in);
  std::istringstream shots_in(shots_text);
  qdec::ShotSet shots = qdec::read_shots(shots_in);

  qdec::PredictMode mode =
      a.mode == "argmax" ? qdec::PredictMode::Argmax : qdec::PredictMode::Sample;
  qdec::ShotSet out_set;
  out_set.fingerprint = shots.fingerprint;
  out_set.seed = a.seed;
  for (std::size_t i = 0; i < shots.shots.size(); ++i) {
    qdec::BitVec pred = qdec::predict(params, ansatz, shots.shots[i].syndrome, mode,
                                      qdec::derive_seed(a.seed, i));
    out_set.shots.push_back({shots.shots[i].syndrome, pred});
  }
  qdec::write_shots_file(out_set, a.out);

  manifest.option("checkpoint", a.checkpoint);
  manifest.option("shots", a.shots);
  manifest.option("mode", a.mode);
  manifest.option("seed", a.seed);
  manifest.option("out", a.out);
  manifest.write(a.out + ".manifest.json");
  std::cout << "wrote " << a.out << "\n";
  return kExitOk;
}

struct BaselineArgs {
  std::string dem, shots, out, pred;
};

int run_mwpm(const BaselineArgs& a) {
  ManifestWriter manifest("mwpm");
  std::string dem_text = read_file(a.dem);
  std::string shots_text = read_file(a.shots);
  manifest.input(a.dem, dem_text);
  manifest.input(a.shots, shots_text);
  std::istringstream dem_in(dem_text);
  qdec::DetectorErrorModel model = qdec::parse_dem(dem_in);
  std::istringstream shots_in(shots_text);
  qdec::ShotSet shots = qdec::read_shots(shots_in);
  if (qdec::dem_fingerprint(model) != shots.fingerprint)
    throw qdec::FingerprintMismatch("shot file fingerprint does not match --dem");

  qdec::MatchingGraph graph = qdec::extract_matching_graph(model);
  std::unordered_map<qdec::BitVec, qdec::BitVec, qdec::BitVecHash> memo;
  qdec::ShotSet preds;
  preds.fingerprint = shots.fingerprint;
  preds.seed = shots.seed;
  std::size_t errors = 0, failures = 0;
  for (const qdec::Shot& s : shots.shots) {
    auto it = memo.find(s.syndrome);
    if (it == memo.end()) {
      qdec::BitVec label(model.num_observables);
      try {
        label = qdec::mwpm_decode(graph, s.syndrome);
      } catch (const qdec::MatchingError&) {
        ++failures;  // counted as an error below; prediction stays 0
      }
      it = memo.emplace(s.syndrome, std::move(label)).first;
    }
    if (!a.pred.empty()) preds.shots.push_back({s.syndrome, it->second});
    if (!(it->second == s.label)) ++errors;
  }
  if (!a.pred.empty()) qdec::write_shots_file(preds, a.pred);
  double ler = static_cast<double>(errors) / static_cast<double>(shots.shots.size());
  double se = binomial_stderr(ler, shots.shots.size());
  std::cout << "MWPM LER " << ler << " (" << errors << "/" << shots.shots.size()
            << ", 95% CI +/- " << 1.96 * se << ")";
  if (failures) std::cout << " [" << failures << " syndromes exceeded the matching cap]";
  std::cout << "\n";

  if (!a.out.empty()) {
    json summary = {{"ler", ler},
                    {"errors", errors},
                    {"shots", shots.shots.size()},
                    {"stderr", se},
                    {"decode_failures", failures}};
    write_file(a.out, summary.dump(2) + "\n");
    manifest.option("dem", a.dem);
    manifest.option("shots", a.shots);
    manifest.option("out", a.out);
    manifest.write(a.out + ".manifest.json");
  }
  return kExitOk;
}

int run_mld(const BaselineArgs& a) {
  ManifestWriter manifest("mld");
  std::string dem_text = read_file(a.dem);
  std::string shots_text = read_file(a.shots);
  manifest.input(a.dem, dem_text);
  manifest.input(a.shots, shots_text);
  std::istringstream dem_in(dem_text);
  qdec::DetectorErrorModel model = qdec::parse_dem(dem_in);
  std::istringstream shots_in(shots_text);
  qdec::ShotSet shots = qdec::read_shots(shots_in);
  if (qdec::dem_fingerprint(model) != shots.fingerprint)
    throw qdec::FingerprintMismatch("shot file fingerprint does not match --dem");

  qdec::MldDecoder decoder(model);
  qdec::ShotSet preds;
  preds.fingerprint = shots.fingerprint;
  preds.seed = shots.seed;
  std::size_t errors = 0, unseen_total = 0;
  for (const qdec::Shot& s : shots.shots) {
    bool unseen = false;
    qdec::BitVec label = decoder.decode(s.syndrome, &unseen);
    if (unseen) ++unseen_total;
    if (!a.pred.empty()) preds.shots.push_back({s.syndrome, label});
    if (!(label == s.label)) ++errors;
  }
  if (!a.pred.empty()) qdec::write_shots_file(preds, a.pred);
  double ler = static_cast<double>(errors) / static_cast<double>(shots.shots.size());
  double se = binomial_stderr(ler, shots.shots.size());
  std::cout << "MLD LER " << ler << " (" << errors << "/" << shots.shots.size()
            << ", 95% CI +/- " << 1.96 * se << ")";
  if (unseen_total) std::cout << " [" << unseen_total << " unseen syndromes]";
  std::cout << "\n";

  if (!a.out.empty()) {
    json summary = {{"ler", ler},
                    {"errors", errors},
                    {"shots", shots.shots.size()},
                    {"stderr", se},
                    {"unseen_syndromes", unseen_total}};
    write_file(a.out, summary.dump(2) + "\n");
    manifest.option("dem", a.dem);
    manifest.option("shots", a.shots);
    manifest.option("out", a.out);
    manifest.write(a.out + ".manifest.json");
  }
  return kExitOk;
}

struct SelfCorrectArgs {
  std::string checkpoint, report, out;
  double p = 0.05;
  std::size_t shots = 20000;
  uint64_t seed = 0;
};

int run_selfcorrect_cmd(const SelfCorrectArgs& a) {
  ManifestWriter manifest("selfcorrect");
  std::string ckpt_text = read_file(a.checkpoint);
  manifest.input(a.checkpoint, ckpt_text);
  std::istringstream ckpt_in(ckpt_text);
  auto [ansatz, params] = qdec::read_checkpoint(ckpt_in);
  if (ansatz.syndrome_length != 2 || ansatz.readout.size() != 1)
    throw std::invalid_argument(
        "selfcorrect: checkpoint must come from an m=2 single-readout decoder");

  qdec::SelfCorrectConfig cfg;
  cfg.decode_qubits = ansatz.num_qubits;
  cfg.blocks = ansatz.num_blocks;
  cfg.params = params;
  cfg.entangler = ansatz.entangler;
  cfg.control_qubit = ansatz.readout[0];
  cfg.p = a.p;
  cfg.shots = a.shots;
  cfg.seed = a.seed;

  qdec::TrajectoryResult result = qdec::run_selfcorrect(cfg);
  auto rows = qdec::equivalence_check(cfg, ansatz, params);

  std::cout << "self-corrected LER " << result.ler << " +/- " << result.std_err
            << " | uncorrected flip rate " << result.uncorrected_rate << " (" << cfg.shots
            << " trajectories)\n";
  double max_diff = 0.0;
  for (const auto& r : rows) max_diff = std::max(max_diff, r.abs_diff);
  std::cout << "deferred-measurement check: max |coherent - classical| = " << max_diff << "\n";

  if (!a.report.empty()) {
    std::ostringstream csv;
    csv << "pattern,coherent_prob,classical_prob,abs_diff\n";
    for (const auto& r : rows) {
      std::string bits;
      for (int q = 0; q < 3; ++q) bits += ((r.pattern >> q) & 1u) ? '1' : '0';
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.3g\n", bits.c_str(), r.coherent_prob,
                    r.classical_prob, r.abs_diff);
      csv << buf;
    }
    write_file(a.report, csv.str());
  }
  if (!a.out.empty()) {
    json summary = {{"ler", result.ler},
                    {"stderr", result.std_err},
                    {"uncorrected_rate", result.uncorrected_rate},
                    {"shots", cfg.shots},
                    {"p", cfg.p},
                    {"max_equivalence_diff", max_diff}};
    write_file(a.out, summary.dump(2) + "\n");
    manifest.option("checkpoint", a.checkpoint);
    manifest.option("p", a.p);
    manifest.option("shots", a.shots);
    manifest.option("seed", a.seed);
    manifest.option("out", a.out);
    manifest.write(a.out + ".manifest.json");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdec: trainable variational-circuit decoder workbench for QEC codes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qdec::kVersion);
  app.set_config("--config", "", "key = value file; command-line flags win");

  GenDemArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-dem", "generate a detector error model");
  gen_cmd->add_option("--family", gen.family)
      ->required()
      ->check(CLI::IsMember({"repetition", "rotated-surface"}));
  gen_cmd->add_option("--distance", gen.distance)->required();
  gen_cmd->add_option("--rounds", gen.rounds);
  gen_cmd->add_option("--noise", gen.noise)
      ->check(CLI::IsMember({"code-capacity", "circuit-level-phenomenological"}));
  gen_cmd->add_option("--p", gen.p)->required();
  gen_cmd->add_option("--out", gen.out)->required();

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Monte-Carlo (syndrome, label) shots");
  sample_cmd->add_option("--dem", sample.dem)->required();
  sample_cmd->add_option("--n", sample.n)->required();
  sample_cmd->add_option("--seed", sample.seed)->required();
  sample_cmd->add_option("--workers", sample.workers);
  sample_cmd->add_option("--out", sample.out)->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train the decoding circuit");
  train_cmd->add_option("--dem", train.dem)->required();
  train_cmd->add_option("--train", train.train_path)->required();
  train_cmd->add_option("--test", train.test_path)->required();
  train_cmd->add_option("--qubits", train.qubits);
  train_cmd->add_option("--blocks", train.blocks);
  train_cmd->add_option("--entangler", train.entangler)
      ->check(CLI::IsMember({"cz-chain", "cnot-chain"}));
  train_cmd->add_option("--epochs", train.cfg.epochs);
  train_cmd->add_option("--batch-size", train.cfg.batch_size);
  train_cmd->add_option("--lr", train.cfg.learning_rate);
  train_cmd->add_option("--beta1", train.cfg.adam_beta1);
  train_cmd->add_option("--beta2", train.cfg.adam_beta2);
  train_cmd->add_option("--adam-eps", train.cfg.adam_eps);
  train_cmd->add_option("--init-scale", train.cfg.init_scale);
  train_cmd->add_option("--eval-every", train.cfg.eval_every);
  train_cmd->add_option("--seed", train.cfg.seed)->required();
  train_cmd->add_option("--workers", train.cfg.workers);
  train_cmd->add_flag("--paper-scale", train.paper_scale,
                      "run the full 10^4-epoch protocol");
  train_cmd->add_option("--out-prefix", train.prefix)->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "logical error rate of a checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint)->required();
  eval_cmd->add_option("--shots", eval.shots)->required();
  eval_cmd->add_option("--dem", eval.dem);
  eval_cmd->add_option("--workers", eval.workers);
  eval_cmd->add_option("--out", eval.out);

  DecodeArgs decode;
  auto* decode_cmd = app.add_subcommand("decode", "write predicted labels in 01 format");
  decode_cmd->add_option("--checkpoint", decode.checkpoint)->required();
  decode_cmd->add_option("--shots", decode.shots)->required();
  decode_cmd->add_option("--mode", decode.mode)->check(CLI::IsMember({"argmax", "sample"}));
  auto* decode_seed = decode_cmd->add_option("--seed", decode.seed);
  decode_cmd->add_option("--out", decode.out)->required();

  BaselineArgs mwpm;
  auto* mwpm_cmd = app.add_subcommand("mwpm", "minimum-weight perfect matching baseline");
  mwpm_cmd->add_option("--dem", mwpm.dem)->required();
  mwpm_cmd->add_option("--shots", mwpm.shots)->required();
  mwpm_cmd->add_option("--out", mwpm.out);
  mwpm_cmd->add_option("--pred", mwpm.pred, "write predictions in 01 format");

  BaselineArgs mld;
  auto* mld_cmd = app.add_subcommand("mld", "exhaustive maximum-likelihood baseline");
  mld_cmd->add_option("--dem", mld.dem)->required();
  mld_cmd->add_option("--shots", mld.shots)->required();
  mld_cmd->add_option("--out", mld.out);
  mld_cmd->add_option("--pred", mld.pred, "write predictions in 01 format");

  SelfCorrectArgs sc;
  auto* sc_cmd = app.add_subcommand("selfcorrect", "coherent self-correcting circuit");
  sc_cmd->add_option("--checkpoint", sc.checkpoint)->required();
  sc_cmd->add_option("--p", sc.p)->required();
  sc_cmd->add_option("--shots", sc.shots);
  sc_cmd->add_option("--seed", sc.seed)->required();
  sc_cmd->add_option("--report", sc.report);
  sc_cmd->add_option("--out", sc.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen_dem(gen);
    if (sample_cmd->parsed()) return run_sample(sample);
    if (train_cmd->parsed()) return run_train(train);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (decode_cmd->parsed()) {
      if (decode.mode == "sample" && decode_seed->count() == 0) {
        std::cerr << "decode: --mode sample requires --seed\n";
        return kExitUsage;
      }
      return run_decode(decode);
    }
    if (mwpm_cmd->parsed()) return run_mwpm(mwpm);
    if (mld_cmd->parsed()) return run_mld(mld);
    if (sc_cmd->parsed()) return run_selfcorrect_cmd(sc);
  } catch (const qdec::FingerprintMismatch& e) {
    std::cerr << "fingerprint mismatch: " << e.what() << "\n";
    return kExitFingerprint;
  } catch (const FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kExitFile;
  } catch (const qdec::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    if (std::strncmp(e.what(), "cannot open", 11) == 0) {
      std::cerr << "file error: " << e.what() << "\n";
      return kExitFile;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
