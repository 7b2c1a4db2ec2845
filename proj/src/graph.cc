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

#include "catrep/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "catrep/errors.hpp"

namespace catrep::graph {

using sampler::Basis;
using sampler::kErased;
using sampler::SyndromeRecord;

const char *edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::kSpace:
      return "SPACE";
    case EdgeKind::kTime:
      return "TIME";
    case EdgeKind::kDiagonal:
      return "DIAGONAL";
    case EdgeKind::kBoundary:
      return "BOUNDARY";
  }
  return "?";
}

double weight_from_prob(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("weight_from_prob: p must lie in (0, 1)");
  return std::log((1.0 - p) / p);
}

double prob_from_weight(double w) { return 1.0 / (1.0 + std::exp(w)); }

double p_odd(std::span<const double> ps) {
  double prod = 1.0;
  for (double p : ps) prod *= 1.0 - 2.0 * p;
  return 0.5 * (1.0 - prod);
}

uint64_t edge_mask(uint32_t d, EdgeKind kind, DetectorId a, DetectorId b, Side side) {
  switch (kind) {
    case EdgeKind::kTime:
      return 0;
    case EdgeKind::kSpace:
    case EdgeKind::kDiagonal:
      return uint64_t(1) << std::max(a.space, b.space);
    case EdgeKind::kBoundary:
      return side == Side::kLeft ? 1 : uint64_t(1) << (d - 1);
  }
  return 0;
}

namespace {

uint64_t detector_key(DetectorId id) {
  return (uint64_t(id.space) << 42) | (uint64_t(id.time) << 21) | uint64_t(id.time_last);
}

}  // namespace

MatchingGraph::MatchingGraph(uint32_t d, uint32_t cycles, std::vector<DetectorId> detectors,
                             std::vector<Edge> edges)
    : d_(d), cycles_(cycles), detectors_(std::move(detectors)), edges_(std::move(edges)) {
  if (d_ < 2 || d_ > 64) throw InputError("graph distance must lie in [2, 64]");
  const uint32_t n = num_detectors();
  for (auto &e : edges_) {
    if (e.u >= n) throw InputError("edge endpoint u must be a detector");
    if (e.v >= n + 2) throw InputError("edge endpoint out of range");
    if (e.u == e.v) throw InputError("self-loop edge");
    if ((e.kind == EdgeKind::kBoundary) != (e.v >= n)) {
      throw InputError("boundary edges must end on a boundary node and vice versa");
    }
    if (!(e.p > 0.0 && e.p <= 0.5)) {
      throw InputError("edge probability must lie in (0, 0.5], got " + std::to_string(e.p));
    }
    e.w = weight_from_prob(e.p);
  }
  build_index();
}

void MatchingGraph::build_index() {
  const uint32_t n = num_detectors();
  lookup_.clear();
  lookup_.reserve(n * 2);
  regular_ = detectors_.size() == size_t(cycles_ + 1) * (d_ - 1);
  for (uint32_t k = 0; k < n; ++k) {
    const auto &id = detectors_[k];
    if (!lookup_.emplace(detector_key(id), k).second) throw InputError("duplicate detector");
    if (regular_ && (id.is_span() || regular_node(d_, id.space, id.time) != k)) regular_ = false;
  }
  std::vector<uint32_t> deg(n + 2, 0);
  for (const auto &e : edges_) {
    deg[e.u]++;
    deg[e.v]++;
  }
  adj_start_.assign(n + 3, 0);
  for (uint32_t k = 0; k < n + 2; ++k) adj_start_[k + 1] = adj_start_[k] + deg[k];
  adj_.resize(adj_start_.back());
  std::vector<uint32_t> fill(adj_start_.begin(), adj_start_.end() - 1);
  for (const auto &e : edges_) {
    adj_[fill[e.u]++] = Adj{e.v, e.kind, e.w, e.p, e.mask};
    adj_[fill[e.v]++] = Adj{e.u, e.kind, e.w, e.p, e.mask};
  }
}

std::span<const Adj> MatchingGraph::neighbors(uint32_t node) const {
  if (node >= num_nodes()) throw InputError("node out of range");
  return {adj_.data() + adj_start_[node], adj_.data() + adj_start_[node + 1]};
}

DetectorId MatchingGraph::detector(uint32_t node) const {
  if (node >= num_detectors()) throw InputError("node is not a detector");
  return detectors_[node];
}

uint32_t MatchingGraph::node(DetectorId id) const {
  auto it = lookup_.find(detector_key(id));
  if (it == lookup_.end()) {
    throw InputError("detector (" + std::to_string(id.space) + ", " + std::to_string(id.time) +
                     ") not in graph");
  }
  return it->second;
}

bool MatchingGraph::contains(DetectorId id) const { return lookup_.count(detector_key(id)) > 0; }

int64_t MatchingGraph::find_edge(uint32_t u, uint32_t v, EdgeKind kind) const {
  for (size_t k = 0; k < edges_.size(); ++k) {
    const auto &e = edges_[k];
    if (e.kind == kind && ((e.u == u && e.v == v) || (e.u == v && e.v == u))) return int64_t(k);
  }
  return -1;
}

MatchingGraph MatchingGraph::repetition(uint32_t d, uint32_t cycles, double p_space, double p_time,
                                        double p_diagonal, double p_boundary) {
  if (d < 2 || d > 64) throw InputError("distance must lie in [2, 64]");
  const uint32_t a = d - 1;
  std::vector<DetectorId> dets;
  dets.reserve(size_t(cycles + 1) * a);
  for (uint32_t t = 0; t <= cycles; ++t) {
    for (uint32_t j = 0; j < a; ++j) dets.push_back({j, t, t});
  }
  const uint32_t n = uint32_t(dets.size());
  const uint32_t left = n, right = n + 1;
  std::vector<Edge> edges;
  auto add = [&](uint32_t u, uint32_t v, EdgeKind k, double p, Side side = Side::kLeft) {
    DetectorId du = dets[u];
    DetectorId dv = v < n ? dets[v] : du;
    edges.push_back(Edge{u, v, k, p, 0.0, edge_mask(d, k, du, dv, side)});
  };
  for (uint32_t t = 0; t <= cycles; ++t) {
    for (uint32_t j = 0; j < a; ++j) {
      uint32_t u = regular_node(d, j, t);
      if (j + 1 < a) add(u, regular_node(d, j + 1, t), EdgeKind::kSpace, p_space);
      if (t < cycles) add(u, regular_node(d, j, t + 1), EdgeKind::kTime, p_time);
      if (t < cycles && j + 1 < a) add(u, regular_node(d, j + 1, t + 1), EdgeKind::kDiagonal, p_diagonal);
      if (j == 0) add(u, left, EdgeKind::kBoundary, p_boundary, Side::kLeft);
      if (j == a - 1) add(u, right, EdgeKind::kBoundary, p_boundary, Side::kRight);
    }
  }
  return MatchingGraph(d, cycles, std::move(dets), std::move(edges));
}

namespace {

std::string time_text(DetectorId id) {
  if (!id.is_span()) return std::to_string(id.time);
  return std::to_string(id.time) + ":" + std::to_string(id.time_last);
}

DetectorId parse_detector(const std::string &space, const std::string &time) {
  DetectorId id;
  try {
    id.space = uint32_t(std::stoul(space));
    auto colon = time.find(':');
    if (colon == std::string::npos) {
      id.time = id.time_last = uint32_t(std::stoul(time));
    } else {
      id.time = uint32_t(std::stoul(time.substr(0, colon)));
      id.time_last = uint32_t(std::stoul(time.substr(colon + 1)));
    }
  } catch (const std::exception &) {
    throw IoError("graph text: bad detector '" + space + " " + time + "'");
  }
  return id;
}

EdgeKind parse_kind(const std::string &s) {
  if (s == "SPACE") return EdgeKind::kSpace;
  if (s == "TIME") return EdgeKind::kTime;
  if (s == "DIAGONAL") return EdgeKind::kDiagonal;
  if (s == "BOUNDARY") return EdgeKind::kBoundary;
  throw IoError("graph text: unknown edge kind '" + s + "'");
}

}  // namespace

std::string MatchingGraph::to_text() const {
  std::ostringstream out;
  out << "# catrep-graph d=" << d_ << " cycles=" << cycles_ << " layout=" << (regular_ ? "regular" : "custom")
      << "\n";
  if (!regular_) {
    for (const auto &id : detectors_) out << "DETECTOR " << id.space << " " << time_text(id) << "\n";
  }
  char pbuf[64];
  for (const auto &e : edges_) {
    std::snprintf(pbuf, sizeof(pbuf), "%.17g", e.p);
    DetectorId a = detectors_[e.u];
    out << edge_kind_name(e.kind) << " " << a.space << " " << time_text(a) << " ";
    if (e.v >= num_detectors()) {
      out << "B " << (e.v == left_boundary() ? "L" : "R");
    } else {
      DetectorId b = detectors_[e.v];
      out << b.space << " " << time_text(b);
    }
    out << " " << pbuf << "\n";
  }
  return out.str();
}

MatchingGraph MatchingGraph::from_text(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  uint32_t d = 0, cycles = 0;
  bool regular = true, have_header = false;
  std::vector<DetectorId> dets;
  struct RawEdge {
    EdgeKind kind;
    DetectorId a;
    bool boundary;
    Side side;
    DetectorId b;
    double p;
  };
  std::vector<RawEdge> raw;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "#") {
      std::string kv;
      while (ls >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        try {
          if (k == "d") d = uint32_t(std::stoul(v)), have_header = true;
          if (k == "cycles") cycles = uint32_t(std::stoul(v));
        } catch (const std::exception &) {
          throw IoError("graph text: bad header value '" + kv + "'");
        }
        if (k == "layout") regular = v == "regular";
      }
      continue;
    }
    if (tok.empty() || tok[0] == '#') continue;
    if (tok == "DETECTOR") {
      std::string s, t;
      if (!(ls >> s >> t)) throw IoError("graph text: malformed DETECTOR line");
      dets.push_back(parse_detector(s, t));
      continue;
    }
    RawEdge e{};
    e.kind = parse_kind(tok);
    std::string s1, t1, s2, t2, ps;
    if (!(ls >> s1 >> t1 >> s2 >> t2 >> ps)) throw IoError("graph text: malformed edge line: " + line);
    e.a = parse_detector(s1, t1);
    if (s2 == "B") {
      e.boundary = true;
      if (t2 != "L" && t2 != "R") throw IoError("graph text: boundary side must be L or R");
      e.side = t2 == "L" ? Side::kLeft : Side::kRight;
    } else {
      e.b = parse_detector(s2, t2);
    }
    try {
      e.p = std::stod(ps);
    } catch (const std::exception &) {
      throw IoError("graph text: bad probability '" + ps + "'");
    }
    raw.push_back(e);
  }
  if (!have_header) throw IoError("graph text: missing '# catrep-graph d=...' header");
  if (regular) {
    dets.clear();
    for (uint32_t t = 0; t <= cycles; ++t) {
      for (uint32_t j = 0; j + 1 < d; ++j) dets.push_back({j, t, t});
    }
  }
  std::unordered_map<uint64_t, uint32_t> index;
  for (uint32_t k = 0; k < dets.size(); ++k) index[detector_key(dets[k])] = k;
  auto lookup = [&](DetectorId id) {
    auto it = index.find(detector_key(id));
    if (it == index.end()) throw IoError("graph text: edge references unknown detector");
    return it->second;
  };
  const uint32_t n = uint32_t(dets.size());
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto &r : raw) {
    Edge e{};
    e.kind = r.kind;
    e.u = lookup(r.a);
    e.p = r.p;
    if (r.boundary) {
      e.v = r.side == Side::kLeft ? n : n + 1;
      e.mask = edge_mask(d, e.kind, r.a, r.a, r.side);
    } else {
      e.v = lookup(r.b);
      e.mask = edge_mask(d, e.kind, r.a, r.b, Side::kLeft);
    }
    edges.push_back(e);
  }
  try {
    return MatchingGraph(d, cycles, std::move(dets), std::move(edges));
  } catch (const InputError &e) {
    throw IoError(std::string("graph text: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

template <class Value>
std::vector<uint8_t> compute_detectors(const SyndromeRecord &r, Value value) {
  const uint32_t a = r.d - 1, T = r.cycles;
  std::vector<uint8_t> x(size_t(T + 1) * a, 0);
  const bool xb = r.basis == Basis::X;
  for (uint32_t j = 0; j < a; ++j) {
    uint8_t init = r.initial_state[j] ^ r.initial_state[j + 1];
    uint8_t fin = r.finals[j] ^ r.finals[j + 1];
    if (T == 0) {
      x[j] = xb ? init ^ fin : 0;
      continue;
    }
    x[j] = xb ? value(0, j) ^ init : 0;
    for (uint32_t t = 1; t < T; ++t) x[size_t(t) * a + j] = value(t, j) ^ value(t - 1, j);
    x[size_t(T) * a + j] = xb ? fin ^ value(T - 1, j) : 0;
  }
  return x;
}

}  // namespace

std::vector<uint8_t> detectors_from_record(const SyndromeRecord &r) {
  if (r.has_erasure()) {
    throw InputError("detectors_from_record: record contains erased syndromes; use reconstruct_detectors");
  }
  return compute_detectors(r, [&](uint32_t t, uint32_t j) { return r.syndrome(t, j); });
}

std::vector<uint8_t> flattened_detectors(const SyndromeRecord &r) {
  return compute_detectors(r, [&](uint32_t t, uint32_t j) -> uint8_t { return r.syndrome(t, j) ? 1 : 0; });
}

bool detector_involves_erasure(const SyndromeRecord &r, uint32_t j, uint32_t t) {
  if (t >= 1 && r.syndrome(t - 1, j) == kErased) return true;
  if (t < r.cycles && r.syndrome(t, j) == kErased) return true;
  return false;
}

ReconstructedDetectors reconstruct_detectors(const SyndromeRecord &r) {
  ReconstructedDetectors rd;
  rd.d = r.d;
  rd.cycles = r.cycles;
  const uint32_t a = r.d - 1, T = r.cycles;
  const bool xb = r.basis == Basis::X;
  rd.values.assign(size_t(T + 1) * a, 0);
  rd.removed.assign(rd.values.size(), 0);
  auto round_value = [&](int64_t t, uint32_t j) -> uint8_t {
    if (t < 0) return r.initial_state[j] ^ r.initial_state[j + 1];
    if (t >= int64_t(T)) return r.finals[j] ^ r.finals[j + 1];
    return r.syndrome(uint32_t(t), j);
  };
  auto compare = [&](int64_t t0, int64_t t1, uint32_t j) -> uint8_t {
    if (!xb && (t0 < 0 || t1 >= int64_t(T))) return 0;
    return round_value(t0, j) ^ round_value(t1, j);
  };
  for (uint32_t j = 0; j < a; ++j) {
    uint32_t t = 0;
    while (t <= T) {
      bool prev_erased = t >= 1 && r.syndrome(t - 1, j) == kErased;
      bool cur_erased = t < T && r.syndrome(t, j) == kErased;
      if (!prev_erased && !cur_erased) {
        rd.values[size_t(t) * a + j] = compare(int64_t(t) - 1, t, j);
        ++t;
        continue;
      }
      // t is the first detector of a run: round t is erased, round t-1 is not.
      uint32_t t2 = t;
      while (t2 + 1 < T && r.syndrome(t2 + 1, j) == kErased) ++t2;
      ErasureCluster c{j, t, t2 + 1, compare(int64_t(t) - 1, int64_t(t2) + 1, j)};
      for (uint32_t k = c.first_time; k <= c.last_time; ++k) rd.removed[size_t(k) * a + j] = 1;
      rd.clusters.push_back(c);
      t = t2 + 2;
    }
  }
  std::sort(rd.clusters.begin(), rd.clusters.end(), [](const ErasureCluster &x, const ErasureCluster &y) {
    return std::tie(x.first_time, x.space) < std::tie(y.first_time, y.space);
  });
  return rd;
}

std::vector<uint32_t> defects_of(std::span<const uint8_t> values) {
  std::vector<uint32_t> out;
  for (uint32_t k = 0; k < values.size(); ++k) {
    if (values[k]) out.push_back(k);
  }
  return out;
}

double pair_probability(double xi, double xj, double xij) {
  double den = 1.0 - 2.0 * xi - 2.0 * xj + 4.0 * xij;
  if (!(den > 0.0)) return -1.0;
  double arg = 1.0 - 4.0 * (xij - xi * xj) / den;
  if (arg < 0.0) return -1.0;
  return 0.5 - 0.5 * std::sqrt(arg);
}

double boundary_residual(double xi, std::span<const double> incident) {
  double prod = 1.0;
  for (double p : incident) prod *= 1.0 - 2.0 * p;
  if (!(prod > 0.0)) return 0.5;
  return 0.5 * (1.0 - (1.0 - 2.0 * xi) / prod);
}

}  // namespace catrep::graph
