#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdec/bitvec.hpp"
#include "qdec/dem.hpp"
#include "qdec/parallel.hpp"
#include "qdec/rng.hpp"

namespace qdec {

struct Shot {
  BitVec syndrome;  // gamma, length m
  BitVec label;     // beta, length L

  bool operator==(const Shot& o) const { return syndrome == o.syndrome && label == o.label; }
};

struct ShotSet {
  uint64_t fingerprint = 0;  // of the source model's canonical serialization
  uint64_t seed = 0;
  std::vector<Shot> shots;
};

/// Monte-Carlo shot generation: each mechanism fires independently with its
/// probability, XOR-ing its detector/observable flips into the shot. Shot i
/// uses an engine seeded from (seed, i), so the result is a function of
/// (model, n, seed) alone, regardless of worker count.
inline ShotSet sample_shots(const DetectorErrorModel& model, std::size_t n, uint64_t seed,
                            int workers = 1) {
  if (n < 1) throw std::invalid_argument("sample_shots: n must be >= 1");
  CompiledMechanisms mechs = compile_mechanisms(model);
  ShotSet set;
  set.fingerprint = dem_fingerprint(model);
  set.seed = seed;
  set.shots.assign(n, Shot{BitVec(model.num_detectors), BitVec(model.num_observables)});

  parallel_for(n, workers, [&](std::size_t i) {
    std::mt19937_64 eng = make_engine(seed, i);
    Shot& shot = set.shots[i];
    for (std::size_t k = 0; k < mechs.probabilities.size(); ++k) {
      if (uniform01(eng) < mechs.probabilities[k]) {
        shot.syndrome ^= mechs.detector_masks[k];
        shot.label ^= mechs.observable_masks[k];
      }
    }
  });
  return set;
}

/// Order-preserving prefix/suffix split; the train side gets
/// floor(fraction * n) shots.
inline std::pair<ShotSet, ShotSet> split_train_test(const ShotSet& set, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("split_train_test: fraction must lie in (0, 1)");
  std::size_t cut = static_cast<std::size_t>(fraction * static_cast<double>(set.shots.size()));
  ShotSet train{set.fingerprint, set.seed, {set.shots.begin(), set.shots.begin() + cut}};
  ShotSet test{set.fingerprint, set.seed, {set.shots.begin() + cut, set.shots.end()}};
  return {std::move(train), std::move(test)};
}

/// Shot file format "01": header `#dem-fingerprint <hex> seed <int>`, then
/// one line per shot: m syndrome characters, a space, L label characters.
inline void write_shots(const ShotSet& set, std::ostream& out) {
  out << "#dem-fingerprint " << fingerprint_hex(set.fingerprint) << " seed " << set.seed << "\n";
  for (const Shot& s : set.shots) out << s.syndrome.to01() << " " << s.label.to01() << "\n";
}

inline void write_shots_file(const ShotSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_shots(set, out);
}

inline ShotSet read_shots(std::istream& in) {
  ShotSet set;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("shot file: empty input");
  {
    std::istringstream hs(line);
    std::string tag, fp_hex, seed_word;
    uint64_t seed = 0;
    if (!(hs >> tag >> fp_hex >> seed_word >> seed) || tag != "#dem-fingerprint" ||
        seed_word != "seed")
      throw std::runtime_error("shot file: bad header line");
    set.fingerprint = std::stoull(fp_hex, nullptr, 16);
    set.seed = seed;
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t space = line.find(' ');
    if (space == std::string::npos)
      throw std::runtime_error("shot file line " + std::to_string(line_no) +
                               ": expected '<syndrome> <label>'");
    Shot s;
    s.syndrome = BitVec::from01(line.substr(0, space));
    s.label = BitVec::from01(line.substr(space + 1));
    if (!set.shots.empty() && (s.syndrome.size() != set.shots[0].syndrome.size() ||
                               s.label.size() != set.shots[0].label.size()))
      throw std::runtime_error("shot file line " + std::to_string(line_no) +
                               ": inconsistent widths");
    set.shots.push_back(std::move(s));
  }
  return set;
}

inline ShotSet read_shots_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_shots(in);
}

}  // namespace qdec
