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

#ifndef CATREP_DECODER_HPP
#define CATREP_DECODER_HPP

#include <cstdint>
#include <span>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "catrep/graph.hpp"
#include "catrep/sampler.hpp"

namespace catrep::decoder {

/// One matched pair. `b` is a boundary node when the defect `a` is matched
/// to the boundary; otherwise a < b.
struct MatchedPair {
  uint32_t a;
  uint32_t b;
  double weight;
  uint64_t mask;
};

struct Matching {
  std::vector<MatchedPair> pairs;  // sorted by (a, b)
  double total_weight = 0.0;

  /// Data qubits flipped by the correction.
  uint64_t correction_mask() const;
};

/// Exact minimum-weight perfect matching with boundary.
///
/// Reusable scratch buffers make repeated calls allocation-free in the
/// steady state. Not thread-safe; use one instance per thread.
class Decoder {
 public:
  Matching decode(const graph::DecodingGraph &g, std::span<const uint32_t> defects);

 private:
  void shortest_paths(const graph::DecodingGraph &g, uint32_t source, double radius,
                      bool stop_at_boundary);
  void prepare(uint32_t n);

  std::vector<double> dist_;
  std::vector<uint64_t> mask_;
  std::vector<uint32_t> seen_;
  std::vector<uint32_t> settled_;
  std::vector<int32_t> defect_slot_;
  std::vector<uint32_t> reached_;
  uint32_t generation_ = 0;
  std::vector<std::pair<double, uint32_t>> heap_;
};

Matching decode(const graph::DecodingGraph &g, std::span<const uint32_t> defects);

/// Exhaustive enumeration over all pairings, shortest paths by Floyd-Warshall.
/// Throws InputError for more than 12 defects.
Matching brute_force(const graph::DecodingGraph &g, std::span<const uint32_t> defects);

/// Logical flip after correction.
///
/// X basis: final parity of data qubit 0, corrected by the matching, against
/// its initial parity. Z basis: product of final signs against the product of
/// initial signs.
uint8_t score(const sampler::SyndromeRecord &r, const Matching &m);

/// Matched pairs in the graph text format: `MATCH i1 t1 i2 t2 w`, with
/// `B L` / `B R` for boundary endpoints.
std::string matching_to_text(const graph::DecodingGraph &g, const Matching &m);

/// Maximum-weight matching on a general graph (O(n^3) blossom algorithm).
/// Edges are (i, j, weight). When max_cardinality is set, only maximum
/// cardinality matchings are considered. Returns mate[i] or -1.
std::vector<int64_t> max_weight_matching(int64_t num_vertices,
                                         const std::vector<std::tuple<int64_t, int64_t, int64_t>> &edges,
                                         bool max_cardinality);

}  // namespace catrep::decoder

#endif
