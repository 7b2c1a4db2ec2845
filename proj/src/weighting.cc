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
#include <cmath>

#include "catrep/errors.hpp"
#include "catrep/graph.hpp"

namespace catrep::graph {

using sampler::kErased;
using sampler::SyndromeRecord;

// For independent mechanisms, detectors i and j are XORs of disjoint sets of
// events plus the shared edge event e. Write a = P(i's other events odd),
// b = P(j's other events odd) and p = P(e). Then
//   <x_i> = a + p - 2ap,   <x_j> = b + p - 2bp,
//   <x_i x_j> = p (1-a)(1-b) + (1-p) a b.
// Eliminating a and b gives a quadratic in p whose root in [0, 1/2] is
//   p = 1/2 - 1/2 sqrt(1 - 4 (<x_i x_j> - <x_i><x_j>) / (1 - 2<x_i> - 2<x_j> + 4<x_i x_j>)).

CorrelationAccumulator::CorrelationAccumulator(uint32_t d, uint32_t cycles)
    : layout_(MatchingGraph::repetition(d, cycles, 0.5, 0.5, 0.5, 0.5)) {
  const uint32_t n = layout_.num_detectors();
  const size_t m = layout_.edges().size();
  single_.assign(n, 0);
  node_excluded_.assign(n, 0);
  node_single_.assign(n, 0);
  pair_.assign(m, 0);
  cond_excluded_.assign(m, 0);
  cond_u_.assign(m, 0);
  cond_v_.assign(m, 0);
  cond_uv_.assign(m, 0);
  edge_stamp_.assign(m, 0);
  x_.assign(n, 0);
  involved_.assign(n, 0);
  tainted_.assign(n, 0);
  std::vector<uint32_t> deg(n, 0);
  for (const auto &e : layout_.edges()) {
    if (e.kind == EdgeKind::kBoundary) continue;
    deg[e.u]++;
    deg[e.v]++;
  }
  incident_start_.assign(n + 1, 0);
  for (uint32_t k = 0; k < n; ++k) incident_start_[k + 1] = incident_start_[k] + deg[k];
  incident_.resize(incident_start_.back());
  std::vector<uint32_t> fill(incident_start_.begin(), incident_start_.end() - 1);
  for (uint32_t k = 0; k < m; ++k) {
    const auto &e = layout_.edges()[k];
    if (e.kind == EdgeKind::kBoundary) continue;
    incident_[fill[e.u]++] = k;
    incident_[fill[e.v]++] = k;
  }
}

void CorrelationAccumulator::add(const SyndromeRecord &r) {
  if (r.d != layout_.distance() || r.cycles != layout_.cycles()) {
    throw InputError("CorrelationAccumulator: record shape does not match");
  }
  const uint32_t a = r.d - 1;
  const uint32_t n = layout_.num_detectors();
  const auto &edges = layout_.edges();
  x_ = flattened_detectors(r);
  ++shots_;

  std::vector<uint32_t> involved;
  for (size_t k = 0; k < r.syndromes.size(); ++k) {
    if (r.syndromes[k] != kErased) continue;
    uint32_t t = uint32_t(k / a), j = uint32_t(k % a);
    involved.push_back(regular_node(r.d, j, t));
    involved.push_back(regular_node(r.d, j, t + 1));
  }

  std::vector<uint32_t> tainted;
  if (!involved.empty()) {
    ++stamp_;
    if (stamp_ == 0) {
      std::fill(edge_stamp_.begin(), edge_stamp_.end(), 0);
      stamp_ = 1;
    }
    auto taint = [&](uint32_t v) {
      if (!tainted_[v]) {
        tainted_[v] = 1;
        tainted.push_back(v);
      }
    };
    for (uint32_t u : involved) {
      taint(u);
      for (uint32_t k = incident_start_[u]; k < incident_start_[u + 1]; ++k) {
        const auto &e = edges[incident_[k]];
        taint(e.u == u ? e.v : e.u);
      }
    }
    for (uint32_t v : tainted) {
      node_excluded_[v]++;
      for (uint32_t k = incident_start_[v]; k < incident_start_[v + 1]; ++k) {
        uint32_t ei = incident_[k];
        if (edge_stamp_[ei] != stamp_) {
          edge_stamp_[ei] = stamp_;
          cond_excluded_[ei]++;
        }
      }
    }
  }
  const bool any = !involved.empty();

  for (uint32_t u = 0; u < n; ++u) {
    if (!x_[u]) continue;
    single_[u]++;
    const bool clean_u = !tainted_[u];
    if (clean_u) node_single_[u]++;
    for (uint32_t k = incident_start_[u]; k < incident_start_[u + 1]; ++k) {
      uint32_t ei = incident_[k];
      const auto &e = edges[ei];
      const bool first = e.u == u;
      const uint32_t other = first ? e.v : e.u;
      if (first && x_[other]) pair_[ei]++;
      if (!clean_u || (any && edge_stamp_[ei] == stamp_)) continue;
      if (first) {
        cond_u_[ei]++;
        if (x_[other]) cond_uv_[ei]++;
      } else {
        cond_v_[ei]++;
      }
    }
  }
  for (uint32_t v : tainted) tainted_[v] = 0;
}

void CorrelationAccumulator::merge(const CorrelationAccumulator &o) {
  if (o.layout_.distance() != layout_.distance() || o.layout_.cycles() != layout_.cycles()) {
    throw InputError("CorrelationAccumulator::merge: shape mismatch");
  }
  shots_ += o.shots_;
  auto add = [](std::vector<uint64_t> &a, const std::vector<uint64_t> &b) {
    for (size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  };
  add(single_, o.single_);
  add(pair_, o.pair_);
  add(cond_excluded_, o.cond_excluded_);
  add(cond_u_, o.cond_u_);
  add(cond_v_, o.cond_v_);
  add(cond_uv_, o.cond_uv_);
  add(node_excluded_, o.node_excluded_);
  add(node_single_, o.node_single_);
}

std::vector<double> CorrelationAccumulator::detection_probabilities() const {
  std::vector<double> out(single_.size(), 0.0);
  if (shots_ == 0) return out;
  for (size_t k = 0; k < out.size(); ++k) out[k] = double(single_[k]) / double(shots_);
  return out;
}

MatchingGraph CorrelationAccumulator::build(bool conditioned, const WeightingOptions &opt,
                                            WeightingDiagnostics *diag) const {
  if (shots_ == 0) throw InputError("correlation weighting needs at least one shot");
  const double floor = opt.p_floor;
  const auto &edges = layout_.edges();
  const uint32_t n = layout_.num_detectors();
  std::vector<double> p(edges.size(), 0.5);
  WeightingDiagnostics local;
  local.shots = shots_;
  const double N = double(shots_);
  auto clamp = [&](double v) { return std::clamp(v, floor, 0.5); };

  for (size_t k = 0; k < edges.size(); ++k) {
    const auto &e = edges[k];
    if (e.kind == EdgeKind::kBoundary) continue;
    double xi = single_[e.u] / N, xj = single_[e.v] / N, xij = pair_[k] / N;
    if (conditioned) {
      uint64_t m = shots_ - cond_excluded_[k];
      if (m == 0) {
        local.conditioning_fallbacks++;
        local.messages.push_back("edge " + std::to_string(k) + ": no erasure-free shots, using all shots");
      } else {
        double M = double(m);
        xi = cond_u_[k] / M;
        xj = cond_v_[k] / M;
        xij = cond_uv_[k] / M;
      }
    }
    double q = pair_probability(xi, xj, xij);
    if (q < 0.0) {
      local.negative_discriminant++;
      q = floor;
    }
    p[k] = clamp(q);
  }

  std::vector<std::vector<size_t>> boundary_edges(n);
  for (size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].kind == EdgeKind::kBoundary) boundary_edges[edges[k].u].push_back(k);
  }
  std::vector<double> incident;
  for (uint32_t u = 0; u < n; ++u) {
    if (boundary_edges[u].empty()) continue;
    double xi = single_[u] / N;
    if (conditioned) {
      uint64_t m = shots_ - node_excluded_[u];
      if (m == 0) {
        local.conditioning_fallbacks++;
      } else {
        xi = node_single_[u] / double(m);
      }
    }
    incident.clear();
    for (uint32_t k = incident_start_[u]; k < incident_start_[u + 1]; ++k) incident.push_back(p[incident_[k]]);
    double pb = boundary_residual(xi, incident);
    if (boundary_edges[u].size() == 2) pb = 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - 2.0 * std::min(pb, 0.5))));
    for (size_t k : boundary_edges[u]) p[k] = clamp(pb);
  }

  if (diag) {
    diag->shots += local.shots;
    diag->negative_discriminant += local.negative_discriminant;
    diag->conditioning_fallbacks += local.conditioning_fallbacks;
    for (auto &m : local.messages) diag->messages.push_back(std::move(m));
  }
  size_t idx = 0;
  return layout_.with_probabilities([&](const Edge &) { return p[idx++]; });
}

MatchingGraph CorrelationAccumulator::correlation_graph(const WeightingOptions &opt,
                                                        WeightingDiagnostics *diag) const {
  return build(false, opt, diag);
}

MatchingGraph CorrelationAccumulator::baseline_graph(const WeightingOptions &opt,
                                                     WeightingDiagnostics *diag) const {
  return build(true, opt, diag);
}

namespace {

CorrelationAccumulator accumulate(const sampler::ShotBatch &batch, double fraction) {
  if (batch.records.empty()) throw InputError("weighting: empty batch");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("weighting: fraction must lie in (0, 1]");
  size_t count = std::max<size_t>(1, size_t(std::floor(double(batch.records.size()) * fraction)));
  CorrelationAccumulator acc(batch.d, batch.cycles);
  for (size_t k = 0; k < count; ++k) acc.add(batch.records[k]);
  return acc;
}

}  // namespace

MatchingGraph correlation_weights(const sampler::ShotBatch &batch, double fraction,
                                  const WeightingOptions &opt, WeightingDiagnostics *diag) {
  return accumulate(batch, fraction).correlation_graph(opt, diag);
}

MatchingGraph no_erasure_baseline(const sampler::ShotBatch &batch, double fraction,
                                  const WeightingOptions &opt, WeightingDiagnostics *diag) {
  return accumulate(batch, fraction).baseline_graph(opt, diag);
}

}  // namespace catrep::graph
