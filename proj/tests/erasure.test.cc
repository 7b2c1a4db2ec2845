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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "catrep/decoder.hpp"
#include "catrep/errors.hpp"
#include "catrep/graph.hpp"
#include "catrep/sampler.hpp"

namespace {

using namespace catrep;
using namespace catrep::graph;
using sampler::Basis;
using sampler::kErased;
using sampler::SyndromeRecord;

SyndromeRecord blank_record(uint32_t d, uint32_t cycles) {
  SyndromeRecord r;
  r.basis = Basis::X;
  r.d = d;
  r.cycles = cycles;
  r.initial_state.assign(d, 0);
  r.finals.assign(d, 0);
  r.syndromes.assign(size_t(cycles) * (d - 1), 0);
  return r;
}

uint8_t &syn(SyndromeRecord &r, uint32_t t, uint32_t j) { return r.syndromes[size_t(t) * (r.d - 1) + j]; }

const Adj *find_adj(const DecodingGraph &g, uint32_t from, uint32_t to) {
  const Adj *hit = nullptr;
  for (const Adj &a : g.neighbors(from)) {
    if (a.to == to) {
      EXPECT_EQ(hit, nullptr) << "parallel edges left after merging";
      hit = &a;
    }
  }
  return hit;
}

// d = 3 baseline with separate left/right boundary probabilities.
MatchingGraph baseline(uint32_t cycles, double p_space, double p_time, double p_diag, double p_left,
                       double p_right) {
  auto g = MatchingGraph::repetition(3, cycles, p_space, p_time, p_diag, p_left);
  const uint32_t right = g.right_boundary();
  return g.with_probabilities([&](const Edge &e) { return e.v == right ? p_right : e.p; });
}

TEST(Merge, TwoParallelBoundaryEdges) {
  auto base = baseline(4, 0.05, 0.01, 0.02, 0.05, 0.11);
  auto r = blank_record(3, 4);
  syn(r, 1, 1) = kErased;
  auto rd = reconstruct_detectors(r);
  auto sg = merge_edges_for_erasure(base, rd);
  ASSERT_EQ(sg.num_nodes(), base.num_nodes() + 1);
  const uint32_t span = sg.span_node(0);
  EXPECT_EQ(sg.detector(span), (DetectorId{1, 1, 2}));
  const Adj *e = find_adj(sg, span, base.right_boundary());
  ASSERT_NE(e, nullptr);
  EXPECT_NEAR(e->p, 2 * 0.11 * 0.89, 1e-15);
  EXPECT_NEAR(e->p, 0.1958, 1e-12);
  EXPECT_NEAR(e->w, std::log((1 - 0.1958) / 0.1958), 1e-12);
  EXPECT_EQ(e->kind, EdgeKind::kBoundary);
  EXPECT_EQ(e->mask, uint64_t(1) << 2);
}

TEST(Merge, ThreeParallelEdgesMatchEnumeration) {
  const double ps[3] = {0.11, 0.04, 0.23};
  auto g0 = baseline(5, 0.05, 0.01, 0.02, 0.05, 0.11);
  const uint32_t right = g0.right_boundary();
  auto base = g0.with_probabilities([&](const Edge &e) {
    if (e.v != right) return e.p;
    uint32_t t = g0.detector(e.u).time;
    return (t >= 1 && t <= 3) ? ps[t - 1] : e.p;
  });
  auto r = blank_record(3, 5);
  syn(r, 1, 1) = kErased;
  syn(r, 2, 1) = kErased;
  auto rd = reconstruct_detectors(r);
  ASSERT_EQ(rd.clusters.size(), 1u);
  auto sg = merge_edges_for_erasure(base, rd);
  double odd = 0.0;
  for (int m = 0; m < 8; ++m) {
    double pr = 1.0;
    for (int k = 0; k < 3; ++k) pr *= (m >> k & 1) ? ps[k] : 1 - ps[k];
    if (__builtin_popcount(m) & 1) odd += pr;
  }
  const Adj *e = find_adj(sg, sg.span_node(0), right);
  ASSERT_NE(e, nullptr);
  EXPECT_NEAR(e->p, odd, 1e-15);
}

TEST(Merge, SingleEdgeKeepsProbability) {
  auto base = baseline(4, 0.05, 0.01, 0.02, 0.05, 0.11);
  auto r = blank_record(3, 4);
  syn(r, 1, 1) = kErased;
  auto sg = merge_edges_for_erasure(base, reconstruct_detectors(r));
  // Time edges to the detectors before and after the cluster are single edges.
  const uint32_t span = sg.span_node(0);
  const Adj *before = find_adj(sg, span, regular_node(3, 1, 0));
  const Adj *after = find_adj(sg, span, regular_node(3, 1, 3));
  ASSERT_NE(before, nullptr);
  ASSERT_NE(after, nullptr);
  EXPECT_NEAR(before->p, 0.01, 1e-15);
  EXPECT_NEAR(after->p, 0.01, 1e-15);
  EXPECT_EQ(before->kind, EdgeKind::kTime);
  // Space neighbour (0,1) is reached through one space edge and one diagonal.
  const Adj *side = find_adj(sg, span, regular_node(3, 0, 1));
  ASSERT_NE(side, nullptr);
  EXPECT_NEAR(side->p, 0.05 + 0.02 - 2 * 0.05 * 0.02, 1e-15);
}

TEST(Merge, NoDetectorTouchesErasureAfterMerge) {
  sampler::ShotGenerator gen(noise::RepCodeNoiseModel::uniform(5, 0.05, 0.02, 0.25), 8, Basis::X, 13);
  auto base = MatchingGraph::repetition(5, 8, 0.05, 0.03, 0.02, 0.05);
  ShotGraph sg(base);
  for (uint64_t k = 0; k < 200; ++k) {
    auto r = gen.generate(k);
    auto rd = reconstruct_detectors(r);
    sg.reset();
    sg.apply_merge(rd);
    for (uint32_t u = 0; u < sg.num_nodes(); ++u) {
      if (sg.is_boundary(u)) continue;
      if (u < base.num_detectors()) {
        auto id = base.detector(u);
        EXPECT_EQ(sg.removed(u), detector_involves_erasure(r, id.space, id.time));
        if (sg.removed(u)) continue;
      }
      for (const Adj &a : sg.neighbors(u)) {
        EXPECT_FALSE(sg.removed(a.to)) << "edge into a removed detector";
        // Every edge is present in both directions.
        bool back = false;
        for (const Adj &b : sg.neighbors(a.to)) back |= b.to == u && b.p == a.p;
        if (!sg.is_boundary(a.to)) EXPECT_TRUE(back);
      }
    }
    auto mat = sg.materialize();
    for (const auto &id : mat.detectors()) {
      if (!id.is_span()) EXPECT_FALSE(detector_involves_erasure(r, id.space, id.time));
    }
    // The merged overlay and its standalone copy decode identically.
    auto defects = sg.defects(rd);
    decoder::Decoder dec;
    const double w = dec.decode(sg, defects).total_weight;
    std::vector<uint32_t> mapped;
    for (uint32_t u : defects) mapped.push_back(mat.node(sg.detector(u)));
    EXPECT_NEAR(decoder::decode(mat, mapped).total_weight, w, 1e-9);
  }
}

TEST(Merge, OrderOfParallelEdgesIsIrrelevant) {
  std::vector<double> a{0.3, 0.02, 0.11, 0.07}, b{0.07, 0.11, 0.3, 0.02};
  EXPECT_NEAR(p_odd(a), p_odd(b), 1e-16);
  std::vector<double> head{0.3, 0.02}, tail{0.11, 0.07};
  std::vector<double> nested{p_odd(head), p_odd(tail)};
  EXPECT_NEAR(p_odd(a), p_odd(nested), 1e-16);
}

TEST(Merge, CapAssignsHalf) {
  auto base = MatchingGraph::repetition(3, 8, 0.05, 0.01, 0.02, 0.05);
  auto r = blank_record(3, 8);
  for (uint32_t t = 1; t <= 6; ++t) syn(r, t, 1) = kErased;
  auto rd = reconstruct_detectors(r);
  auto capped = merge_edges_for_erasure(base, rd, MergeOptions{3});
  const Adj *e = find_adj(capped, capped.span_node(0), base.right_boundary());
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->p, 0.5);
  EXPECT_EQ(e->w, 0.0);
  auto plain = merge_edges_for_erasure(base, rd);
  EXPECT_LT(find_adj(plain, plain.span_node(0), base.right_boundary())->p, 0.5);
}

TEST(Merge, RejectsMismatchedLayout) {
  auto base = MatchingGraph::repetition(3, 4, 0.05, 0.01, 0.02, 0.05);
  auto r = blank_record(5, 4);
  syn(r, 1, 1) = kErased;
  ShotGraph sg(base);
  EXPECT_THROW(sg.apply_merge(reconstruct_detectors(r)), InputError);
  EXPECT_THROW(sg.apply_naive(r), InputError);
}

TEST(Naive, ZeroErasuresLeaveBaseline) {
  auto base = MatchingGraph::repetition(3, 4, 0.05, 0.01, 0.02, 0.05);
  auto sg = naive_erasure_graph(base, blank_record(3, 4));
  EXPECT_EQ(sg.materialize().to_text(), base.to_text());
}

TEST(Naive, ErasedTimeEdgeGetsZeroWeight) {
  auto base = MatchingGraph::repetition(3, 4, 0.05, 0.01, 0.02, 0.05);
  auto r = blank_record(3, 4);
  syn(r, 2, 0) = kErased;
  auto sg = naive_erasure_graph(base, r);
  const uint32_t u = regular_node(3, 0, 2), v = regular_node(3, 0, 3);
  for (auto [x, y] : {std::pair{u, v}, std::pair{v, u}}) {
    const Adj *e = find_adj(sg, x, y);
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->p, 0.5);
    EXPECT_EQ(e->w, 0.0);
  }
  EXPECT_DOUBLE_EQ(find_adj(sg, regular_node(3, 0, 1), u)->p, 0.01);
}

// An erasure next to a lone defect: the naive strategy pulls the defect to
// the left boundary, while merging lowers the right-boundary weight enough to
// change the matching.
TEST(Strategies, MergedAndNaiveChooseDifferentBoundaries) {
  const double p_right = 0.11;           // w = 2.09
  const double p_left = 1 / (1 + std::exp(0.9));  // w = 0.9
  auto base = baseline(4, p_left, 0.01, 1e-4, p_left, p_right);
  auto r = blank_record(3, 4);
  syn(r, 1, 1) = kErased;
  for (uint32_t t = 2; t < 4; ++t) syn(r, t, 1) = 1;
  r.finals = {0, 0, 1};

  decoder::Decoder dec;
  auto flat_defects = defects_of(flattened_detectors(r));
  ASSERT_EQ(flat_defects, std::vector<uint32_t>{regular_node(3, 1, 1)});
  auto naive = naive_erasure_graph(base, r);
  auto mn = dec.decode(naive, flat_defects);
  ASSERT_EQ(mn.pairs.size(), 1u);
  EXPECT_EQ(naive.side(mn.pairs[0].b), Side::kLeft);
  EXPECT_NEAR(mn.total_weight, 1.8, 1e-9);

  auto rd = reconstruct_detectors(r);
  auto merged = merge_edges_for_erasure(base, rd);
  auto defects = merged.defects(rd);
  ASSERT_EQ(defects, std::vector<uint32_t>{merged.span_node(0)});
  auto mm = dec.decode(merged, defects);
  ASSERT_EQ(mm.pairs.size(), 1u);
  EXPECT_TRUE(merged.is_boundary(mm.pairs[0].b));
  EXPECT_EQ(merged.side(mm.pairs[0].b), Side::kRight);
  EXPECT_NEAR(mm.total_weight, std::log((1 - 0.1958) / 0.1958), 1e-9);
}

TEST(Strategies, DisagreeOnErasureHeavyData) {
  auto m = noise::RepCodeNoiseModel::uniform(5, 0.07, 0.02, 0.15);
  sampler::ShotGenerator gen(m, 10, Basis::X, 8);
  auto base = MatchingGraph::repetition(5, 10, 0.035, 0.02, 0.035, 0.07);
  ShotGraph naive(base), merged(base);
  decoder::Decoder dec;
  int disagree = 0;
  for (uint64_t k = 0; k < 2000; ++k) {
    auto r = gen.generate(k);
    naive.reset();
    naive.apply_naive(r);
    merged.reset();
    auto rd = reconstruct_detectors(r);
    merged.apply_merge(rd);
    auto a = dec.decode(naive, defects_of(flattened_detectors(r)));
    auto b = dec.decode(merged, merged.defects(rd));
    disagree += decoder::score(r, a) != decoder::score(r, b);
  }
  EXPECT_GT(disagree, 0);
}

TEST(ShotGraphReuse, ResetRestoresBaseline) {
  auto base = MatchingGraph::repetition(3, 4, 0.05, 0.01, 0.02, 0.05);
  ShotGraph sg(base);
  auto r = blank_record(3, 4);
  syn(r, 1, 1) = kErased;
  sg.apply_merge(reconstruct_detectors(r));
  EXPECT_GT(sg.num_nodes(), base.num_nodes());
  sg.reset();
  EXPECT_EQ(sg.num_nodes(), base.num_nodes());
  EXPECT_EQ(sg.materialize().to_text(), base.to_text());
}

}  // namespace
