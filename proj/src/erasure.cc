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

#include <algorithm>

#include "catrep/errors.hpp"
#include "catrep/graph.hpp"

namespace catrep::graph {

ShotGraph::ShotGraph(const MatchingGraph &base) : base_(&base) {
  slot_.assign(base.num_nodes(), -1);
  span_of_.assign(base.num_detectors(), 0);
}

void ShotGraph::reset() {
  for (uint32_t u : touched_) {
    if (u < slot_.size()) slot_[u] = -1;
  }
  touched_.clear();
  for (uint32_t u : removed_list_) span_of_[u] = 0;
  removed_list_.clear();
  spans_.clear();
  used_lists_ = 0;
  slot_.resize(base_->num_nodes());
}

bool ShotGraph::removed(uint32_t node) const {
  return node < span_of_.size() && span_of_[node] != 0;
}

uint32_t ShotGraph::rep(uint32_t node) const {
  if (node < span_of_.size() && span_of_[node]) return base_->num_nodes() + span_of_[node] - 1;
  return node;
}

std::span<const Adj> ShotGraph::neighbors(uint32_t node) const {
  if (node < slot_.size() && slot_[node] >= 0) {
    const auto &l = lists_[size_t(slot_[node])];
    return {l.data(), l.size()};
  }
  if (node < base_->num_nodes()) return base_->neighbors(node);
  if (node < num_nodes()) return {};
  throw InputError("node out of range");
}

DetectorId ShotGraph::detector(uint32_t node) const {
  if (node < base_->num_detectors()) return base_->detector(node);
  if (node >= base_->num_nodes() && node < num_nodes()) return spans_[node - base_->num_nodes()];
  throw InputError("node is not a detector");
}

std::vector<Adj> &ShotGraph::override_list(uint32_t node) {
  if (node >= slot_.size()) slot_.resize(node + 1, -1);
  if (slot_[node] < 0) {
    if (used_lists_ == lists_.size()) lists_.emplace_back();
    auto &l = lists_[used_lists_];
    l.clear();
    if (node < base_->num_nodes()) {
      auto nb = base_->neighbors(node);
      l.assign(nb.begin(), nb.end());
    }
    slot_[node] = int32_t(used_lists_++);
    touched_.push_back(node);
  }
  return lists_[size_t(slot_[node])];
}

void ShotGraph::apply_merge(const ReconstructedDetectors &rd, const MergeOptions &opt) {
  if (!base_->regular() || rd.d != base_->distance() || rd.cycles != base_->cycles()) {
    throw InputError("apply_merge: reconstruction does not match the baseline layout");
  }
  if (rd.clusters.empty()) return;
  const uint32_t n = base_->num_detectors();
  const uint32_t nb = base_->num_nodes();
  const uint32_t first_span = uint32_t(spans_.size());
  for (size_t k = 0; k < rd.clusters.size(); ++k) {
    const auto &c = rd.clusters[k];
    spans_.push_back({c.space, c.first_time, c.last_time});
    for (uint32_t t = c.first_time; t <= c.last_time; ++t) {
      uint32_t u = regular_node(rd.d, c.space, t);
      if (span_of_[u]) throw InputError("apply_merge: overlapping clusters");
      span_of_[u] = first_span + uint32_t(k) + 1;
      removed_list_.push_back(u);
    }
  }
  slot_.resize(num_nodes(), -1);

  struct Item {
    uint32_t target;
    double p;
    uint64_t mask;
  };
  std::vector<Item> items;
  std::vector<double> ps;
  std::vector<std::pair<uint32_t, Adj>> reverse;
  for (size_t k = 0; k < rd.clusters.size(); ++k) {
    const auto &c = rd.clusters[k];
    const uint32_t self = nb + first_span + uint32_t(k);
    items.clear();
    for (uint32_t t = c.first_time; t <= c.last_time; ++t) {
      uint32_t u = regular_node(rd.d, c.space, t);
      for (const Adj &e : base_->neighbors(u)) {
        uint32_t tgt = e.to < n ? rep(e.to) : e.to;
        if (tgt == self) continue;
        items.push_back({tgt, e.p, e.mask});
      }
    }
    std::stable_sort(items.begin(), items.end(), [](const Item &x, const Item &y) { return x.target < y.target; });
    auto &own = override_list(self);
    own.clear();
    for (size_t lo = 0; lo < items.size();) {
      size_t hi = lo;
      ps.clear();
      while (hi < items.size() && items[hi].target == items[lo].target) ps.push_back(items[hi++].p);
      const uint32_t tgt = items[lo].target;
      double p = p_odd(ps);
      if (opt.p_odd_cap_edges > 0 && ps.size() > opt.p_odd_cap_edges) p = 0.5;
      p = std::clamp(p, 1e-300, 0.5);
      EdgeKind kind;
      if (tgt >= n && tgt < nb) {
        kind = EdgeKind::kBoundary;
      } else {
        DetectorId other = tgt < n ? base_->detector(tgt) : spans_[tgt - nb];
        kind = other.space == c.space ? EdgeKind::kTime : EdgeKind::kSpace;
      }
      Adj adj{tgt, kind, weight_from_prob(p), p, items[lo].mask};
      own.push_back(adj);
      if (tgt < n) reverse.push_back({tgt, Adj{self, kind, adj.w, p, adj.mask}});
      lo = hi;
    }
  }
  for (auto &[ext, adj] : reverse) {
    auto &l = override_list(ext);
    l.erase(std::remove_if(l.begin(), l.end(), [&](const Adj &a) { return a.to < n && removed(a.to); }), l.end());
    l.push_back(adj);
  }
}

void ShotGraph::apply_naive(const sampler::SyndromeRecord &r) {
  if (!base_->regular() || r.d != base_->distance() || r.cycles != base_->cycles()) {
    throw InputError("apply_naive: record does not match the baseline layout");
  }
  const uint32_t a = r.d - 1;
  for (size_t k = 0; k < r.syndromes.size(); ++k) {
    if (r.syndromes[k] != sampler::kErased) continue;
    uint32_t t = uint32_t(k / a), j = uint32_t(k % a);
    uint32_t u = regular_node(r.d, j, t), v = regular_node(r.d, j, t + 1);
    for (auto [x, y] : {std::pair{u, v}, std::pair{v, u}}) {
      for (Adj &e : override_list(x)) {
        if (e.to == y && e.kind == EdgeKind::kTime) {
          e.p = 0.5;
          e.w = 0.0;
        }
      }
    }
  }
}

std::vector<uint32_t> ShotGraph::defects(const ReconstructedDetectors &rd) const {
  std::vector<uint32_t> out;
  for (uint32_t u = 0; u < rd.values.size(); ++u) {
    if (rd.values[u] && !rd.removed[u]) out.push_back(u);
  }
  // Spans are appended in cluster order by apply_merge.
  const uint32_t nb = base_->num_nodes();
  for (size_t k = 0; k < rd.clusters.size(); ++k) {
    if (rd.clusters[k].value) out.push_back(nb + uint32_t(k));
  }
  return out;
}

MatchingGraph ShotGraph::materialize() const {
  const uint32_t n = base_->num_detectors();
  const uint32_t nb = base_->num_nodes();
  std::vector<uint32_t> new_id(num_nodes(), UINT32_MAX);
  std::vector<DetectorId> dets;
  std::vector<uint32_t> old_of;
  for (uint32_t u = 0; u < n; ++u) {
    if (removed(u)) continue;
    new_id[u] = uint32_t(dets.size());
    dets.push_back(base_->detector(u));
    old_of.push_back(u);
  }
  for (uint32_t k = 0; k < spans_.size(); ++k) {
    new_id[nb + k] = uint32_t(dets.size());
    dets.push_back(spans_[k]);
    old_of.push_back(nb + k);
  }
  const uint32_t m = uint32_t(dets.size());
  new_id[n] = m;
  new_id[n + 1] = m + 1;
  std::vector<Edge> edges;
  for (uint32_t k = 0; k < m; ++k) {
    for (const Adj &e : neighbors(old_of[k])) {
      uint32_t v = new_id[e.to];
      if (v == UINT32_MAX) continue;
      if (v < m && v <= k) continue;
      edges.push_back(Edge{k, v, e.kind, e.p, 0.0, e.mask});
    }
  }
  return MatchingGraph(base_->distance(), base_->cycles(), std::move(dets), std::move(edges));
}

ShotGraph merge_edges_for_erasure(const MatchingGraph &baseline, const ReconstructedDetectors &rd,
                                  const MergeOptions &opt) {
  ShotGraph g(baseline);
  g.apply_merge(rd, opt);
  return g;
}

ShotGraph naive_erasure_graph(const MatchingGraph &baseline, const sampler::SyndromeRecord &r) {
  ShotGraph g(baseline);
  g.apply_naive(r);
  return g;
}

}  // namespace catrep::graph
