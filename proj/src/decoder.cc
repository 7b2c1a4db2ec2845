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

#include "catrep/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "catrep/errors.hpp"

namespace catrep::decoder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PairCandidate {
  uint32_t i, j;
  double w;
  uint64_t mask;
};

struct BoundaryPath {
  double w = kInf;
  uint32_t node = 0;
  uint64_t mask = 0;
};

uint32_t find_root(std::vector<uint32_t> &parent, uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void sort_pairs(Matching &m) {
  std::sort(m.pairs.begin(), m.pairs.end(),
            [](const MatchedPair &x, const MatchedPair &y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
}

}  // namespace

uint64_t Matching::correction_mask() const {
  uint64_t m = 0;
  for (const auto &p : pairs) m ^= p.mask;
  return m;
}

void Decoder::prepare(uint32_t n) {
  if (dist_.size() < n) {
    dist_.resize(n);
    mask_.resize(n);
    seen_.resize(n, 0);
    settled_.resize(n, 0);
    defect_slot_.resize(n, -1);
  }
}

void Decoder::shortest_paths(const graph::DecodingGraph &g, uint32_t source, double radius,
                             bool stop_at_boundary) {
  if (++generation_ == 0) {
    std::fill(seen_.begin(), seen_.end(), 0);
    std::fill(settled_.begin(), settled_.end(), 0);
    generation_ = 1;
  }
  const uint32_t gen = generation_;
  auto cmp = std::greater<std::pair<double, uint32_t>>();
  reached_.clear();
  heap_.clear();
  seen_[source] = gen;
  dist_[source] = 0.0;
  mask_[source] = 0;
  heap_.push_back({0.0, source});
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), cmp);
    auto [d, u] = heap_.back();
    heap_.pop_back();
    if (settled_[u] == gen) continue;
    if (d > radius) break;
    settled_[u] = gen;
    reached_.push_back(u);
    if (g.is_boundary(u)) {
      if (stop_at_boundary) break;
      continue;
    }
    for (const auto &e : g.neighbors(u)) {
      const double nd = d + e.w;
      if (seen_[e.to] != gen || nd < dist_[e.to]) {
        seen_[e.to] = gen;
        dist_[e.to] = nd;
        mask_[e.to] = mask_[u] ^ e.mask;
        heap_.push_back({nd, e.to});
        std::push_heap(heap_.begin(), heap_.end(), cmp);
      }
    }
  }
}

Matching Decoder::decode(const graph::DecodingGraph &g, std::span<const uint32_t> defects) {
  Matching out;
  const uint32_t k = uint32_t(defects.size());
  if (k == 0) return out;
  const uint32_t n = g.num_nodes();
  prepare(n);
  for (uint32_t i = 0; i < k; ++i) {
    uint32_t a = defects[i];
    if (a >= n || g.is_boundary(a)) throw InputError("decode: defect is not a detector node");
    if (defect_slot_[a] >= 0) {
      for (uint32_t j = 0; j < i; ++j) defect_slot_[defects[j]] = -1;
      throw InputError("decode: repeated defect");
    }
    defect_slot_[a] = int32_t(i);
  }
  struct SlotGuard {
    std::vector<int32_t> &slots;
    std::span<const uint32_t> defects;
    ~SlotGuard() {
      for (uint32_t a : defects) slots[a] = -1;
    }
  } guard{defect_slot_, defects};

  std::vector<BoundaryPath> bnd(k);
  double max_b = 0.0;
  for (uint32_t i = 0; i < k; ++i) {
    shortest_paths(g, defects[i], kInf, true);
    if (!reached_.empty() && g.is_boundary(reached_.back())) {
      uint32_t b = reached_.back();
      bnd[i] = {dist_[b], b, mask_[b]};
      max_b = std::max(max_b, dist_[b]);
    }
  }

  std::vector<PairCandidate> cands;
  for (uint32_t i = 0; i < k; ++i) {
    shortest_paths(g, defects[i], bnd[i].w + max_b, false);
    for (uint32_t u : reached_) {
      int32_t j = defect_slot_[u];
      if (j <= int32_t(i)) continue;
      if (dist_[u] < bnd[i].w + bnd[size_t(j)].w) cands.push_back({i, uint32_t(j), dist_[u], mask_[u]});
    }
  }

  std::vector<uint32_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0u);
  for (const auto &c : cands) parent[find_root(parent, c.i)] = find_root(parent, c.j);
  std::vector<std::vector<uint32_t>> members(k);
  for (uint32_t i = 0; i < k; ++i) members[find_root(parent, i)].push_back(i);
  std::vector<std::vector<uint32_t>> comp_cands(k);
  for (uint32_t c = 0; c < cands.size(); ++c) comp_cands[find_root(parent, cands[c].i)].push_back(c);

  auto match_boundary = [&](uint32_t i) {
    if (!std::isfinite(bnd[i].w)) throw NumericError("decode: defect cannot reach a boundary");
    out.pairs.push_back({defects[i], bnd[i].node, bnd[i].w, bnd[i].mask});
  };
  auto match_pair = [&](const PairCandidate &c) {
    uint32_t a = defects[c.i], b = defects[c.j];
    out.pairs.push_back({std::min(a, b), std::max(a, b), c.w, c.mask});
  };

  std::vector<int32_t> local(k, -1);
  for (uint32_t r = 0; r < k; ++r) {
    const auto &mem = members[r];
    if (mem.empty()) continue;
    if (mem.size() == 1) {
      match_boundary(mem[0]);
      continue;
    }
    const auto &cc = comp_cands[r];
    if (mem.size() == 2 && cc.size() == 1) {
      match_pair(cands[cc[0]]);
      continue;
    }
    const int64_t m = int64_t(mem.size());
    for (int64_t x = 0; x < m; ++x) local[mem[size_t(x)]] = int32_t(x);
    double max_cost = 0.0;
    for (uint32_t i : mem) {
      if (std::isfinite(bnd[i].w)) max_cost = std::max(max_cost, bnd[i].w);
    }
    for (uint32_t c : cc) max_cost = std::max(max_cost, cands[c].w);
    const double big = max_cost + 1.0;
    const double scale = std::min(1e9, 1e15 / big);
    auto iw = [&](double cost) { return 2 * std::llround((big - cost) * scale); };
    std::vector<std::tuple<int64_t, int64_t, int64_t>> edges;
    edges.reserve(cc.size() + size_t(m * (m + 1) / 2));
    for (uint32_t c : cc) edges.emplace_back(local[cands[c].i], local[cands[c].j], iw(cands[c].w));
    for (int64_t x = 0; x < m; ++x) {
      uint32_t i = mem[size_t(x)];
      if (std::isfinite(bnd[i].w)) edges.emplace_back(x, m + x, iw(bnd[i].w));
      for (int64_t y = x + 1; y < m; ++y) edges.emplace_back(m + x, m + y, iw(0.0));
    }
    auto mate = max_weight_matching(2 * m, edges, true);
    for (int64_t x = 0; x < m; ++x) {
      int64_t y = mate[size_t(x)];
      if (y < 0) throw NumericError("decode: no perfect matching exists");
      uint32_t i = mem[size_t(x)];
      if (y == m + x) {
        match_boundary(i);
      } else if (y < m && x < y) {
        uint32_t j = mem[size_t(y)];
        for (uint32_t c : cc) {
          if ((cands[c].i == i && cands[c].j == j) || (cands[c].i == j && cands[c].j == i)) {
            match_pair(cands[c]);
            break;
          }
        }
      } else if (y >= m && y != m + x) {
        throw NumericError("decode: inconsistent matching");
      }
    }
  }
  sort_pairs(out);
  for (const auto &p : out.pairs) out.total_weight += p.weight;
  return out;
}

Matching decode(const graph::DecodingGraph &g, std::span<const uint32_t> defects) {
  Decoder dec;
  return dec.decode(g, defects);
}

Matching brute_force(const graph::DecodingGraph &g, std::span<const uint32_t> defects) {
  const size_t k = defects.size();
  if (k > 12) throw InputError("brute_force: at most 12 defects");
  const uint32_t n = g.num_nodes();
  std::vector<double> dist(size_t(n) * n, kInf);
  std::vector<uint64_t> mask(size_t(n) * n, 0);
  auto at = [n](uint32_t i, uint32_t j) { return size_t(i) * n + j; };
  for (uint32_t u = 0; u < n; ++u) {
    dist[at(u, u)] = 0.0;
    for (const auto &e : g.neighbors(u)) {
      if (e.w < dist[at(u, e.to)]) {
        dist[at(u, e.to)] = e.w;
        mask[at(u, e.to)] = e.mask;
      }
      if (e.w < dist[at(e.to, u)]) {
        dist[at(e.to, u)] = e.w;
        mask[at(e.to, u)] = e.mask;
      }
    }
  }
  for (uint32_t m = 0; m < n; ++m) {
    if (g.is_boundary(m)) continue;
    for (uint32_t i = 0; i < n; ++i) {
      const double dim = dist[at(i, m)];
      if (!std::isfinite(dim)) continue;
      for (uint32_t j = 0; j < n; ++j) {
        const double c = dim + dist[at(m, j)];
        if (c < dist[at(i, j)]) {
          dist[at(i, j)] = c;
          mask[at(i, j)] = mask[at(i, m)] ^ mask[at(m, j)];
        }
      }
    }
  }
  std::vector<uint32_t> bnodes;
  for (uint32_t u = 0; u < n; ++u) {
    if (g.is_boundary(u)) bnodes.push_back(u);
  }
  std::vector<uint32_t> best_b(k);
  std::vector<double> bw(k, kInf);
  for (size_t i = 0; i < k; ++i) {
    for (uint32_t b : bnodes) {
      if (dist[at(defects[i], b)] < bw[i]) {
        bw[i] = dist[at(defects[i], b)];
        best_b[i] = b;
      }
    }
  }

  std::vector<int> partner(k, -2), best_partner;
  double best = kInf;
  std::function<void(double)> rec = [&](double acc) {
    if (acc >= best) return;
    size_t i = 0;
    while (i < k && partner[i] != -2) ++i;
    if (i == k) {
      best = acc;
      best_partner = partner;
      return;
    }
    partner[i] = -1;
    if (std::isfinite(bw[i])) rec(acc + bw[i]);
    for (size_t j = i + 1; j < k; ++j) {
      if (partner[j] != -2) continue;
      double w = dist[at(defects[i], defects[j])];
      if (!std::isfinite(w)) continue;
      partner[i] = int(j);
      partner[j] = int(i);
      rec(acc + w);
      partner[j] = -2;
    }
    partner[i] = -2;
  };
  rec(0.0);
  Matching out;
  if (k == 0) return out;
  if (best_partner.empty()) throw NumericError("brute_force: no perfect matching exists");
  for (size_t i = 0; i < k; ++i) {
    int p = best_partner[i];
    if (p == -1) {
      out.pairs.push_back({defects[i], best_b[i], bw[i], mask[at(defects[i], best_b[i])]});
    } else if (size_t(p) > i) {
      uint32_t a = defects[i], b = defects[size_t(p)];
      out.pairs.push_back({std::min(a, b), std::max(a, b), dist[at(a, b)], mask[at(a, b)]});
    }
  }
  sort_pairs(out);
  for (const auto &p : out.pairs) out.total_weight += p.weight;
  return out;
}

uint8_t score(const sampler::SyndromeRecord &r, const Matching &m) {
  if (r.basis == sampler::Basis::X) {
    return uint8_t((r.finals.at(0) ^ r.initial_state.at(0) ^ (m.correction_mask() & 1u)) & 1u);
  }
  uint8_t parity = 0;
  for (size_t i = 0; i < r.finals.size(); ++i) parity ^= uint8_t(r.finals[i] ^ r.initial_state[i]);
  return uint8_t(parity & 1u);
}

std::string matching_to_text(const graph::DecodingGraph &g, const Matching &m) {
  auto endpoint = [&](std::ostringstream &os, uint32_t node) {
    if (g.is_boundary(node)) {
      os << "B " << (g.side(node) == graph::Side::kLeft ? "L" : "R");
      return;
    }
    auto id = g.detector(node);
    os << id.space << " " << id.time;
    if (id.is_span()) os << ":" << id.time_last;
  };
  std::ostringstream os;
  os.precision(17);
  for (const auto &p : m.pairs) {
    os << "MATCH ";
    endpoint(os, p.a);
    os << " ";
    endpoint(os, p.b);
    os << " " << p.weight << "\n";
  }
  return os.str();
}

}  // namespace catrep::decoder
