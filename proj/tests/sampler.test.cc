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
#include <sstream>

#include <gtest/gtest.h>

#include "catrep/catq.hpp"
#include "catrep/errors.hpp"
#include "catrep/graph.hpp"
#include "catrep/sampler.hpp"

namespace {

using namespace catrep;
using namespace catrep::sampler;
using noise::RepCodeNoiseModel;

// |observed - expected| within k binomial standard deviations.
void expect_binomial(uint64_t hits, uint64_t n, double p, double k = 4.0) {
  const double sigma = std::sqrt(p * (1.0 - p) / double(n));
  EXPECT_NEAR(double(hits) / double(n), p, k * sigma + 1e-12) << hits << "/" << n;
}

TEST(SplitPhaseFlip, OddCombinationAndRatio) {
  for (double p : {0.0, 1e-4, 0.05, 0.19, 0.5}) {
    for (double f : {0.0, 0.2, 0.5, 0.8, 1.0}) {
      auto [qe, qm] = split_phase_flip(p, f);
      EXPECT_NEAR(qe + qm - 2 * qe * qm, p, 1e-14) << p << " " << f;
      if (qe + qm > 0) EXPECT_NEAR(qm / (qe + qm), f, 1e-12);
    }
  }
}

TEST(Sampler, NoiselessShotsAreTrivial) {
  auto m = RepCodeNoiseModel::uniform(5, 0.0, 0.0, 0.0, 1e-6, 1.0);
  m.final_meas_error_z = 0.0;
  for (Basis b : {Basis::X, Basis::Z}) {
    ShotGenerator gen(m, 7, b, 3);
    for (uint64_t k = 0; k < 200; ++k) {
      auto r = gen.generate(k);
      r.validate();
      EXPECT_EQ(r.true_flip, 0);
      EXPECT_EQ(r.finals, r.initial_state);
      for (uint8_t v : graph::detectors_from_record(r)) EXPECT_EQ(v, 0);
    }
  }
}

TEST(Sampler, CertainMeasurementFlipsOnlyFireOuterLayers) {
  auto m = RepCodeNoiseModel::uniform(5, 0.0, 1.0, 0.0);
  ShotGenerator gen(m, 6, Basis::X, 9);
  for (uint64_t k = 0; k < 50; ++k) {
    auto r = gen.generate(k);
    auto det = graph::detectors_from_record(r);
    for (uint32_t t = 0; t <= 6; ++t) {
      for (uint32_t j = 0; j < 4; ++j) {
        EXPECT_EQ(det[t * 4 + j], (t == 0 || t == 6) ? 1 : 0) << t << "," << j;
      }
    }
  }
}

TEST(Sampler, SingleQubitFlipFiresItsDetectorPair) {
  const double p = 0.07;
  auto m = RepCodeNoiseModel::uniform(3, 0.0, 0.0, 0.0);
  m.p_z[1] = p;
  m.mid_cycle_fraction = 0.0;
  ShotGenerator gen(m, 1, Basis::X, 21);
  const uint64_t n = 100000;
  uint64_t pair = 0;
  for (uint64_t k = 0; k < n; ++k) {
    auto det = graph::detectors_from_record(gen.generate(k));
    // Layer 0 compares the initial stabilizers with round 0.
    EXPECT_EQ(det[0], det[1]);
    EXPECT_EQ(det[2], 0);
    EXPECT_EQ(det[3], 0);
    pair += det[0] & det[1];
  }
  expect_binomial(pair, n, p);
}

TEST(Sampler, MidCycleFlipsLandDiagonally) {
  auto m = RepCodeNoiseModel::uniform(3, 0.0, 0.0, 0.0);
  m.p_z[1] = 0.2;
  m.mid_cycle_fraction = 1.0;
  ShotGenerator gen(m, 1, Basis::X, 5);
  uint64_t seen = 0;
  for (uint64_t k = 0; k < 2000; ++k) {
    auto det = graph::detectors_from_record(gen.generate(k));
    EXPECT_EQ(det[0], det[3]);  // ancilla 0 in round 0, ancilla 1 in the final layer
    EXPECT_EQ(det[1], 0);
    EXPECT_EQ(det[2], 0);
    seen += det[0];
  }
  EXPECT_GT(seen, 0u);
}

TEST(Sampler, TotalFlipProbabilityPerCycle) {
  const double p = 0.1;
  auto m = RepCodeNoiseModel::uniform(3, p, 0.0, 0.0);
  ShotGenerator gen(m, 1, Basis::X, 8);
  const uint64_t n = 100000;
  uint64_t flips = 0;
  for (uint64_t k = 0; k < n; ++k) {
    auto r = gen.generate(k);
    flips += r.finals[1] ^ r.initial_state[1];
    EXPECT_EQ(r.true_flip, r.finals[0] ^ r.initial_state[0]);
  }
  expect_binomial(flips, n, p);
}

TEST(Sampler, ErasedFractionMatchesModel) {
  auto m = RepCodeNoiseModel::uniform(5, 0.05, 0.02, 0.05);
  auto batch = sample_batch(m, 20, Basis::X, 5000, 4);
  uint64_t erased = 0, flipped_or_erased = 0, total = 0;
  for (const auto &r : batch.records) {
    for (uint8_t s : r.syndromes) {
      erased += s == kErased;
      ++total;
    }
    for (uint8_t v : r.initial_state) EXPECT_NE(v, kErased);
    for (uint8_t v : r.finals) EXPECT_NE(v, kErased);
  }
  (void)flipped_or_erased;
  expect_binomial(erased, total, 0.05);
}

TEST(Sampler, InitialParitiesFollowSteadyState) {
  const double pp = catq::steady_state_plus_population(1.0);
  EXPECT_NEAR(std::pow(pp, 5), 0.1015, 1e-4);
  auto m = RepCodeNoiseModel::uniform(5, 0.0, 0.0, 0.0, 1e-6, 1.0);
  ShotGenerator gen(m, 1, Basis::X, 77);
  const uint64_t n = 100000;
  std::vector<uint64_t> hist(6, 0);
  for (uint64_t k = 0; k < n; ++k) {
    auto r = gen.generate(k);
    int plus = 0;
    for (uint8_t v : r.initial_state) plus += v == 0;
    ++hist[plus];
  }
  for (int c = 0; c <= 5; ++c) {
    double binom = std::tgamma(6.0) / (std::tgamma(c + 1.0) * std::tgamma(6.0 - c));
    expect_binomial(hist[c], n, binom * std::pow(pp, c) * std::pow(1 - pp, 5 - c));
  }
}

TEST(Sampler, InfinitePhotonNumberGivesUniformStrings) {
  Rng rng(3);
  uint64_t ones = 0;
  const uint64_t n = 40000;
  for (uint64_t k = 0; k < n; ++k) {
    for (uint8_t v : sample_initial_x_state(3, INFINITY, rng)) ones += v;
  }
  expect_binomial(ones, 3 * n, 0.5);
}

TEST(Sampler, ShotsAreKeyedBySeedAndIndex) {
  auto m = RepCodeNoiseModel::uniform(5, 0.08, 0.03, 0.05, 1e-6, 2.0);
  ShotGenerator a(m, 9, Basis::X, 123), b(m, 9, Basis::X, 123), c(m, 9, Basis::X, 124);
  for (uint64_t k : {0ull, 1ull, 999ull, 123456789ull}) {
    EXPECT_EQ(a.generate(k), b.generate(k));
  }
  int differ = 0;
  for (uint64_t k = 0; k < 20; ++k) differ += !(a.generate(k) == c.generate(k));
  EXPECT_GT(differ, 10);

  auto one = sample_batch(m, 9, Basis::X, 300, 55, 0, 1);
  auto four = sample_batch(m, 9, Basis::X, 300, 55, 0, 4);
  EXPECT_EQ(one.records, four.records);
  auto tail = sample_batch(m, 9, Basis::X, 100, 55, 200, 3);
  for (size_t k = 0; k < 100; ++k) EXPECT_EQ(tail.records[k], one.records[200 + k]);
}

TEST(Sampler, ZBasisTruthIsBitflipParity) {
  auto m = RepCodeNoiseModel::uniform(3, 0.05, 0.01, 0.0);
  m.final_meas_error_z = 0.0;
  m.p_bitflip = {0.02, 0.03, 0.01};
  ShotGenerator gen(m, 15, Basis::Z, 4);
  uint64_t flips = 0;
  const uint64_t n = 20000;
  for (uint64_t k = 0; k < n; ++k) {
    auto r = gen.generate(k);
    uint8_t parity = 0;
    for (uint32_t i = 0; i < 3; ++i) parity ^= r.finals[i] ^ r.initial_state[i];
    EXPECT_EQ(parity, r.true_flip);
    flips += r.true_flip;
  }
  // Per-qubit odd-flip probability over 15 cycles, combined over qubits.
  double q = 0.0;
  for (double p : m.p_bitflip) {
    double qi = 0.5 * (1 - std::pow(1 - 2 * p, 15));
    q = q + qi - 2 * q * qi;
  }
  expect_binomial(flips, n, q);

  m.p_bitflip.clear();
  ShotGenerator none(m, 15, Basis::Z, 4);
  for (uint64_t k = 0; k < 500; ++k) EXPECT_EQ(none.generate(k).true_flip, 0);
}

TEST(DetectionProbabilities, ZeroNoiseStationaryAndMonotone) {
  auto zero = sample_batch(RepCodeNoiseModel::uniform(5, 0, 0, 0), 10, Basis::X, 200, 1);
  for (double v : detection_probabilities(zero)) EXPECT_EQ(v, 0.0);

  auto m = RepCodeNoiseModel::uniform(5, 0.05, 0.02, 0.0);
  auto batch = sample_batch(m, 30, Basis::X, 20000, 6);
  auto det = detection_probabilities(batch);
  ASSERT_EQ(det.size(), 31u * 4u);
  double mean = 0;
  int cnt = 0;
  for (uint32_t t = 2; t < 29; ++t) {
    for (uint32_t j = 1; j < 3; ++j) {
      mean += det[t * 4 + j];
      ++cnt;
    }
  }
  mean /= cnt;
  const double sigma = std::sqrt(mean * (1 - mean) / 20000.0);
  for (uint32_t t = 2; t < 29; ++t) {
    for (uint32_t j = 1; j < 3; ++j) EXPECT_NEAR(det[t * 4 + j], mean, 5 * sigma);
  }

  double prev = -1;
  for (double p : {0.01, 0.03, 0.06, 0.1}) {
    auto b = sample_batch(RepCodeNoiseModel::uniform(5, p, 0.01, 0.0), 10, Basis::X, 4000, 2);
    auto dp = detection_probabilities(b);
    double avg = 0;
    for (double v : dp) avg += v;
    EXPECT_GT(avg, prev);
    prev = avg;
  }
}

TEST(SyndromeIo, BinaryRoundTrip) {
  auto m = RepCodeNoiseModel::uniform(4, 0.05, 0.02, 0.05, 2.8e-6, 1.5);
  auto batch = sample_batch(m, 12, Basis::X, 250, 99, 10);
  std::stringstream ss;
  write_batch(batch, ss);
  auto back = read_batch(ss);
  EXPECT_EQ(back.records, batch.records);
  EXPECT_EQ(back.d, 4u);
  EXPECT_EQ(back.cycles, 12u);
  EXPECT_EQ(back.basis, Basis::X);
  EXPECT_EQ(back.metadata.experiment_seed, 99u);
  EXPECT_EQ(back.metadata.first_shot_index, 10u);
  EXPECT_EQ(back.metadata.model_hash, m.hash());
  EXPECT_EQ(back.model.canonical_text(), m.canonical_text());
}

TEST(SyndromeIo, CorruptInputIsRejected) {
  auto batch = sample_batch(RepCodeNoiseModel::uniform(3, 0.05, 0.02, 0.05), 4, Basis::X, 20, 1);
  std::stringstream ss;
  write_batch(batch, ss);
  std::string bytes = ss.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream a(bad_magic);
  EXPECT_THROW(read_batch(a), IoError);

  std::stringstream b(bytes.substr(0, bytes.size() - 7));
  EXPECT_THROW(read_batch(b), IoError);

  std::string bad_value = bytes;
  // Last record: u8 true_flip at the end, preceded by d finals and the syndromes.
  bad_value[bytes.size() - 1 - 3 - 1] = 7;
  std::stringstream c(bad_value);
  EXPECT_THROW(read_batch(c), std::exception);
}

TEST(SyndromeIo, TextExportMarksErasures) {
  auto batch = sample_batch(RepCodeNoiseModel::uniform(3, 0.0, 0.0, 0.5), 8, Basis::X, 10, 3);
  std::stringstream ss;
  write_batch_text(batch, ss);
  EXPECT_NE(ss.str().find('E'), std::string::npos);
}

}  // namespace
