// Copyright 2026 The catrep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATREP_GRAPH_HPP
#define CATREP_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "catrep/sampler.hpp"

namespace catrep::graph {

enum class EdgeKind : uint8_t { kSpace = 0, kTime = 1, kDiagonal = 2, kBoundary = 3 };
enum class Side : uint8_t { kLeft = 0, kRight = 1 };

const char *edge_kind_name(EdgeKind k);

/// A detector compares two syndrome layers of ancilla `space`.
///
/// Ordinary detectors have time == time_last. Detector time t compares
/// syndrome round t-1 with round t; time 0 compares against the initial
/// stabilizer values and time `cycles` against the final data measurements.
/// A detector spanning an erased cluster has time < time_last and compares
/// round time-1 with round time_last.
struct DetectorId {
  uint32_t space = 0;
  uint32_t time = 0;
  uint32_t time_last = 0;

  bool is_span() const { return time != time_last; }
  auto operator<=>(const DetectorId &) const = default;
};

/// Adjacency entry. `mask` holds the data qubits whose flip the edge represents.
struct Adj {
  uint32_t to;
  EdgeKind kind;
  double w;
  double p;
  uint64_t mask;
};

struct Edge {
  uint32_t u;
  uint32_t v;  // may be a boundary node
  EdgeKind kind;
  double p;
  double w;
  uint64_t mask;
};

double weight_from_prob(double p);
double prob_from_weight(double w);

/// Probability of an odd number of events among independent events p_k.
double p_odd(std::span<const double> ps);

/// Node-level view consumed by the decoder.
class DecodingGraph {
 public:
  virtual ~DecodingGraph() = default;
  virtual uint32_t num_nodes() const = 0;
  virtual std::span<const Adj> neighbors(uint32_t node) const = 0;
  virtual bool is_boundary(uint32_t node) const = 0;
  /// Side of a boundary node.
  virtual Side side(uint32_t boundary_node) const = 0;
  virtual DetectorId detector(uint32_t node) const = 0;
};

/// Detectors followed by the left and right boundary nodes.
class MatchingGraph : public DecodingGraph {
 public:
  MatchingGraph() = default;
  /// Edges reference node indices; detectors.size() and detectors.size()+1
  /// are the left and right boundaries. Throws InputError on malformed input.
  MatchingGraph(uint32_t d, uint32_t cycles, std::vector<DetectorId> detectors,
                std::vector<Edge> edges);

  /// Every allowed edge of the distance-d, `cycles`-round layout.
  /// Probabilities are filled per kind.
  static MatchingGraph repetition(uint32_t d, uint32_t cycles, double p_space, double p_time,
                                  double p_diagonal, double p_boundary);

  uint32_t distance() const { return d_; }
  uint32_t cycles() const { return cycles_; }
  uint32_t num_detectors() const { return static_cast<uint32_t>(detectors_.size()); }
  uint32_t left_boundary() const { return num_detectors(); }
  uint32_t right_boundary() const { return num_detectors() + 1; }
  uint32_t boundary_node(Side s) const { return s == Side::kLeft ? left_boundary() : right_boundary(); }
  bool regular() const { return regular_; }

  uint32_t num_nodes() const override { return num_detectors() + 2; }
  std::span<const Adj> neighbors(uint32_t node) const override;
  bool is_boundary(uint32_t node) const override { return node >= num_detectors(); }
  Side side(uint32_t node) const override { return node == left_boundary() ? Side::kLeft : Side::kRight; }
  DetectorId detector(uint32_t node) const override;

  /// Throws InputError when the detector is absent.
  uint32_t node(DetectorId id) const;
  bool contains(DetectorId id) const;
  const std::vector<Edge> &edges() const { return edges_; }
  const std::vector<DetectorId> &detectors() const { return detectors_; }
  /// Index into edges() of the edge u-v of the given kind, or -1.
  int64_t find_edge(uint32_t u, uint32_t v, EdgeKind kind) const;

  /// Returns a copy with every edge probability replaced by f(edge).
  template <class F>
  MatchingGraph with_probabilities(F &&f) const {
    std::vector<Edge> es = edges_;
    for (auto &e : es) e.p = f(e);
    return MatchingGraph(d_, cycles_, detectors_, std::move(es));
  }

  std::string to_text() const;
  static MatchingGraph from_text(const std::string &text);

 private:
  void build_index();

  uint32_t d_ = 0;
  uint32_t cycles_ = 0;
  bool regular_ = false;
  std::vector<DetectorId> detectors_;
  std::vector<Edge> edges_;
  std::vector<uint32_t> adj_start_;
  std::vector<Adj> adj_;
  std::unordered_map<uint64_t, uint32_t> lookup_;
};

/// Node index of ordinary detector (space, time) in the regular layout.
inline uint32_t regular_node(uint32_t d, uint32_t space, uint32_t time) {
  return time * (d - 1) + space;
}

/// Data qubits flipped by the mechanism behind an edge of the regular layout.
uint64_t edge_mask(uint32_t d, EdgeKind kind, DetectorId a, DetectorId b, Side side);

// ---------------------------------------------------------------------------
// Detectors.

/// Detector values, (cycles+1) rows of d-1 entries. Throws InputError if the
/// record contains an erased syndrome. In the Z basis the first and last
/// layers are zero, since the data are not stabilizer eigenstates.
std::vector<uint8_t> detectors_from_record(const sampler::SyndromeRecord &r);

/// Same as detectors_from_record but erased outcomes read as 1.
std::vector<uint8_t> flattened_detectors(const sampler::SyndromeRecord &r);

/// Syndrome rounds that detector (j, t) compares: rounds t-1 and t, where
/// round -1 is the initial layer and round `cycles` the final layer.
bool detector_involves_erasure(const sampler::SyndromeRecord &r, uint32_t j, uint32_t t);

struct ErasureCluster {
  uint32_t space;
  uint32_t first_time;  // first replaced detector time
  uint32_t last_time;   // last replaced detector time
  uint8_t value;
};

/// Detectors rebuilt around erased syndromes. `values` follows the regular
/// layout; entries covered by a cluster are 0 and `removed` is set.
struct ReconstructedDetectors {
  uint32_t d = 0;
  uint32_t cycles = 0;
  std::vector<uint8_t> values;
  std::vector<uint8_t> removed;
  std::vector<ErasureCluster> clusters;
};

ReconstructedDetectors reconstruct_detectors(const sampler::SyndromeRecord &r);

/// Nontrivial node ids of a detector value vector in the regular layout.
std::vector<uint32_t> defects_of(std::span<const uint8_t> values);

// ---------------------------------------------------------------------------
// Weighting.

struct WeightingOptions {
  double p_floor = 1e-6;
};

struct WeightingDiagnostics {
  uint64_t negative_discriminant = 0;
  uint64_t conditioning_fallbacks = 0;
  uint64_t shots = 0;
  std::vector<std::string> messages;
};

/// p_ij = 1/2 - 1/2 sqrt(1 - 4 (<x_i x_j> - <x_i><x_j>) / (1 - 2<x_i> - 2<x_j> + 4 <x_i x_j>)).
/// Returns a negative value when the square-root argument or denominator is
/// not positive.
double pair_probability(double xi, double xj, double xij);

/// Boundary probability leaving the residual of marginal xi unexplained by
/// the incident bulk edges p_k.
double boundary_residual(double xi, std::span<const double> incident);

/// Streaming sufficient statistics for correlation weighting.
///
/// Holds unconditioned counts (erased outcomes read as 1) and counts
/// restricted to shots whose detector neighbourhoods contain no erasure.
class CorrelationAccumulator {
 public:
  CorrelationAccumulator(uint32_t d, uint32_t cycles);

  void add(const sampler::SyndromeRecord &r);
  void merge(const CorrelationAccumulator &other);
  uint64_t shots() const { return shots_; }

  /// Correlation-weighted graph from unconditioned statistics.
  MatchingGraph correlation_graph(const WeightingOptions &opt = {},
                                  WeightingDiagnostics *diag = nullptr) const;
  /// No-erasure baseline: every edge u-v is estimated from shots in which no
  /// detector adjacent to u or v (or u, v themselves) involves an erasure.
  MatchingGraph baseline_graph(const WeightingOptions &opt = {},
                               WeightingDiagnostics *diag = nullptr) const;

  const MatchingGraph &layout() const { return layout_; }
  /// Unconditioned fraction of shots in which each detector fired.
  std::vector<double> detection_probabilities() const;

 private:
  MatchingGraph build(bool conditioned, const WeightingOptions &opt,
                      WeightingDiagnostics *diag) const;

  MatchingGraph layout_;
  uint64_t shots_ = 0;
  std::vector<uint64_t> single_;         // per node
  std::vector<uint64_t> pair_;           // per edge
  std::vector<uint64_t> cond_excluded_;  // per edge: shots excluded by conditioning
  std::vector<uint64_t> cond_u_;
  std::vector<uint64_t> cond_v_;
  std::vector<uint64_t> cond_uv_;
  std::vector<uint64_t> node_excluded_;  // per node
  std::vector<uint64_t> node_single_;
  // Scratch.
  std::vector<uint8_t> x_, involved_, tainted_;
  std::vector<uint32_t> edge_stamp_;
  std::vector<uint32_t> incident_start_, incident_;
  uint32_t stamp_ = 0;
};

/// Weights from the first `fraction` of the batch.
MatchingGraph correlation_weights(const sampler::ShotBatch &batch, double fraction = 0.25,
                                  const WeightingOptions &opt = {},
                                  WeightingDiagnostics *diag = nullptr);
MatchingGraph no_erasure_baseline(const sampler::ShotBatch &batch, double fraction = 0.25,
                                  const WeightingOptions &opt = {},
                                  WeightingDiagnostics *diag = nullptr);

// ---------------------------------------------------------------------------
// Per-shot erasure graphs.

struct MergeOptions {
  /// When positive, a merged edge built from more than this many parallel
  /// edges gets probability 0.5.
  uint32_t p_odd_cap_edges = 0;
};

/// A per-shot graph stored as replacement adjacency lists over a shared
/// baseline. Nodes beyond the baseline's boundaries are spanning detectors.
class ShotGraph : public DecodingGraph {
 public:
  explicit ShotGraph(const MatchingGraph &base);

  /// Re-targets the overlay to the baseline unchanged.
  void reset();

  uint32_t num_nodes() const override { return base_->num_nodes() + uint32_t(spans_.size()); }
  std::span<const Adj> neighbors(uint32_t node) const override;
  bool is_boundary(uint32_t node) const override {
    return node == base_->left_boundary() || node == base_->right_boundary();
  }
  Side side(uint32_t node) const override { return base_->side(node); }
  DetectorId detector(uint32_t node) const override;
  bool removed(uint32_t node) const;
  const MatchingGraph &base() const { return *base_; }

  /// Node id of spanning detector k.
  uint32_t span_node(size_t k) const { return base_->num_nodes() + uint32_t(k); }

  /// Copy as a standalone graph with removed detectors dropped.
  MatchingGraph materialize() const;

  /// Replaces detectors touching erased syndromes with spanning detectors
  /// and merges their parallel edges into one edge of probability p_odd.
  void apply_merge(const ReconstructedDetectors &rd, const MergeOptions &opt = {});

  /// Sets the probability of every time-like edge across an erased
  /// syndrome to 0.5.
  void apply_naive(const sampler::SyndromeRecord &r);

  /// Defects of a reconstruction, using span_node ids for clusters.
  std::vector<uint32_t> defects(const ReconstructedDetectors &rd) const;

 private:
  std::vector<Adj> &override_list(uint32_t node);
  uint32_t rep(uint32_t node) const;

  const MatchingGraph *base_;
  std::vector<DetectorId> spans_;
  std::vector<int32_t> slot_;
  std::vector<std::vector<Adj>> lists_;
  size_t used_lists_ = 0;
  std::vector<uint32_t> touched_;
  std::vector<uint32_t> span_of_;  // per base detector: span index + 1, or 0
  std::vector<uint32_t> removed_list_;
};

ShotGraph merge_edges_for_erasure(const MatchingGraph &baseline, const ReconstructedDetectors &rd,
                                  const MergeOptions &opt = {});
ShotGraph naive_erasure_graph(const MatchingGraph &baseline, const sampler::SyndromeRecord &r);

}  // namespace catrep::graph

#endif
