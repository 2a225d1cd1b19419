#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdec/bitvec.hpp"
#include "qdec/dem.hpp"

namespace qdec {

struct MatchingEdge {
  int a = 0;
  int b = 0;  // may equal the boundary node index (num_detectors)
  double probability = 0.0;
  double weight = 0.0;  // ln((1-p)/p)
  BitVec observables;   // of the dominant contributor
};

/// Detector graph with one extra boundary node (index = num_detectors).
/// Immutable after extraction; decoding never mutates it.
struct MatchingGraph {
  int num_detectors = 0;
  int num_observables = 0;
  std::vector<MatchingEdge> edges;
  std::vector<std::vector<int>> adjacency;  // node -> edge indices

  int boundary() const { return num_detectors; }
  int node_count() const { return num_detectors + 1; }
};

/// Builds the matching graph from a graph-like DEM. A mechanism (or each
/// component of its decomposition) flipping detectors {a,b} contributes
/// edge (a,b); flipping {a} contributes (a, boundary); flipping nothing is
/// invisible to matching and is skipped. Parallel contributions merge with
/// p = p1(1-p2) + p2(1-p1); the merged edge keeps the observable mask of its
/// highest-probability contributor (probability ties broken toward the
/// lexicographically smaller mask, so the result is independent of
/// mechanism order).
inline MatchingGraph extract_matching_graph(const DetectorErrorModel& model) {
  MatchingGraph graph;
  graph.num_detectors = model.num_detectors;
  graph.num_observables = model.num_observables;
  const int boundary = model.num_detectors;

  struct Accum {
    double one_minus_2p = 1.0;  // prod(1 - 2 p_i); XOR-combined p = (1 - prod)/2
    double best_p = -1.0;
    BitVec best_obs;
  };
  std::map<std::pair<int, int>, Accum> accum;

  auto add_contribution = [&](const std::vector<int>& dets, const std::vector<int>& obs,
                              double p) {
    if (dets.empty()) return;
    if (dets.size() > 2)
      throw std::invalid_argument(
          "extract_matching_graph: mechanism flips more than 2 detectors and has no "
          "graph-like decomposition");
    int a = dets[0];
    int b = dets.size() == 2 ? dets[1] : boundary;
    if (a > b) std::swap(a, b);
    BitVec mask(model.num_observables);
    for (int i : obs) mask.set(i, true);
    Accum& acc = accum[{a, b}];
    acc.one_minus_2p *= 1.0 - 2.0 * p;
    if (p > acc.best_p || (p == acc.best_p && mask < acc.best_obs)) {
      acc.best_p = p;
      acc.best_obs = mask;
    }
  };

  for (const ErrorMechanism& mech : model.mechanisms) {
    if (mech.decomposition.empty() || mech.detectors.size() <= 2) {
      add_contribution(mech.detectors, mech.observables, mech.probability);
    } else {
      for (const Symptom& c : mech.decomposition)
        add_contribution(c.detectors, c.observables, mech.probability);
    }
  }

  graph.adjacency.assign(graph.node_count(), {});
  for (const auto& [key, acc] : accum) {
    MatchingEdge e;
    e.a = key.first;
    e.b = key.second;
    e.probability = 0.5 * (1.0 - acc.one_minus_2p);
    e.weight = std::log((1.0 - e.probability) / e.probability);
    e.observables = acc.best_obs;
    int idx = static_cast<int>(graph.edges.size());
    graph.edges.push_back(std::move(e));
    graph.adjacency[key.first].push_back(idx);
    graph.adjacency[key.second].push_back(idx);
  }
  return graph;
}

class MatchingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct PathInfo {
  double dist = std::numeric_limits<double>::infinity();
  BitVec obs;
  std::vector<int> nodes;  // full node sequence from the source
};

/// Single-source shortest paths by relaxation to a fixed point. Distance
/// ties resolve toward the lexicographically smallest node sequence, which
/// pins the path observable mask deterministically. Graphs here are small
/// (tens of nodes), so the quadratic loop is irrelevant.
inline std::vector<PathInfo> shortest_paths(const MatchingGraph& graph, int source) {
  constexpr double kTieEps = 1e-12;
  std::vector<PathInfo> info(graph.node_count());
  info[source].dist = 0.0;
  info[source].obs = BitVec(graph.num_observables);
  info[source].nodes = {source};

  bool changed = true;
  int guard = 0;
  while (changed) {
    changed = false;
    if (++guard > 2 * graph.node_count() + 4)
      throw MatchingError("shortest_paths: relaxation failed to converge");
    for (const MatchingEdge& e : graph.edges) {
      for (auto [u, v] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
        if (!std::isfinite(info[u].dist)) continue;
        double cand = info[u].dist + e.weight;
        bool better = cand < info[v].dist - kTieEps;
        if (!better && std::abs(cand - info[v].dist) <= kTieEps) {
          std::vector<int> cand_path = info[u].nodes;
          cand_path.push_back(v);
          better = std::lexicographical_compare(cand_path.begin(), cand_path.end(),
                                                info[v].nodes.begin(), info[v].nodes.end());
        }
        if (better) {
          info[v].dist = cand;
          info[v].obs = info[u].obs;
          info[v].obs ^= e.observables;
          info[v].nodes = info[u].nodes;
          info[v].nodes.push_back(v);
          changed = true;
        }
      }
    }
  }
  return info;
}

}  // namespace detail

inline constexpr int kMaxFiredDetectors = 16;

struct MwpmResult {
  BitVec label;
  double weight = 0.0;  // total weight of the minimum matching
};

/// Decodes by exact minimum-weight perfect matching of the fired detectors.
/// Odd parity is absorbed by the boundary node; paths may route through the
/// boundary, which lets any number of detectors terminate there. The label
/// is the XOR of path observable masks over matched pairs.
inline MwpmResult mwpm_decode_full(const MatchingGraph& graph, const BitVec& syndrome) {
  if (static_cast<int>(syndrome.size()) != graph.num_detectors)
    throw std::invalid_argument("mwpm_decode: syndrome length mismatch");

  std::vector<int> nodes;
  for (std::size_t i = 0; i < syndrome.size(); ++i)
    if (syndrome.get(i)) nodes.push_back(static_cast<int>(i));
  if (static_cast<int>(nodes.size()) > kMaxFiredDetectors)
    throw MatchingError("mwpm_decode: more than " + std::to_string(kMaxFiredDetectors) +
                        " fired detectors");

  MwpmResult result;
  result.label = BitVec(graph.num_observables);
  if (nodes.empty()) return result;
  if (nodes.size() % 2 == 1) nodes.push_back(graph.boundary());

  const int k = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> dist(k, std::vector<double>(k));
  std::vector<std::vector<BitVec>> mask(k, std::vector<BitVec>(k));
  for (int i = 0; i < k; ++i) {
    auto paths = detail::shortest_paths(graph, nodes[i]);
    for (int j = 0; j < k; ++j) {
      dist[i][j] = paths[nodes[j]].dist;
      mask[i][j] = paths[nodes[j]].obs;
    }
  }

  // dp over subsets: pair the lowest unmatched node with every candidate.
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t full = std::size_t{1} << k;
  std::vector<double> dp(full, inf);
  std::vector<int> choice(full, -1);
  dp[0] = 0.0;
  for (std::size_t s = 1; s < full; ++s) {
    int i = __builtin_ctzll(s);
    if (__builtin_popcountll(s) % 2 == 1) continue;
    for (int j = i + 1; j < k; ++j) {
      if (!(s >> j & 1)) continue;
      std::size_t rest = s & ~(std::size_t{1} << i) & ~(std::size_t{1} << j);
      double cand = dp[rest] + dist[i][j];
      if (cand < dp[s]) {
        dp[s] = cand;
        choice[s] = j;
      }
    }
  }
  if (!std::isfinite(dp[full - 1]))
    throw MatchingError("mwpm_decode: fired detectors not mutually reachable");

  result.weight = dp[full - 1];
  std::size_t s = full - 1;
  while (s) {
    int i = __builtin_ctzll(s);
    int j = choice[s];
    result.label ^= mask[i][j];
    s &= ~(std::size_t{1} << i);
    s &= ~(std::size_t{1} << j);
  }
  return result;
}

inline BitVec mwpm_decode(const MatchingGraph& graph, const BitVec& syndrome) {
  return mwpm_decode_full(graph, syndrome).label;
}

}  // namespace qdec
