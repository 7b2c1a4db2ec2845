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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "catrep/errors.hpp"
#include "catrep/pipeline.hpp"

namespace {

using namespace catrep;
using namespace catrep::pipeline;
using sampler::Basis;

ExperimentConfig parse(const std::string &text) { return ExperimentConfig::from_json(parse_config_text(text)); }

TEST(Config, DefaultsAndComments) {
  auto c = parse(R"({
    // distances to simulate
    "distances": [3],
    /* block comment */
    "alpha_sq": [2.0],
    "noise": {"t1_eff": 50e-6, "t_cycle": 2e-6}
  })");
  ASSERT_EQ(c.distances, std::vector<uint32_t>{3});
  EXPECT_EQ(c.decoder, DecoderKind::kMerged);
  EXPECT_FALSE(c.fit_with_offset);
  auto m = c.model(3, 2.0);
  EXPECT_NEAR(m.p_z[0], 2.0 * 2e-6 / 50e-6, 1e-15);
  EXPECT_EQ(m.p_meas, std::vector<double>(2, 0.0));
  EXPECT_EQ(m.t_cycle, 2e-6);
}

TEST(Config, NearestKeyTables) {
  auto c = parse(R"({"distances": [3], "alpha_sq": [1.2, 3.6],
    "noise": {"p_meas": {"1": [0.01], "2": [0.02, 0.025], "4": [0.03]}, "p_erase": {"1": [0.05]}}})");
  EXPECT_EQ(c.model(3, 1.2).p_meas, (std::vector<double>{0.01, 0.01}));
  EXPECT_EQ(c.model(3, 2.2).p_meas, (std::vector<double>{0.02, 0.025}));
  EXPECT_EQ(c.model(3, 3.6).p_meas, (std::vector<double>{0.03, 0.03}));
  EXPECT_EQ(c.model(3, 3.6).p_erase, (std::vector<double>{0.05, 0.05}));
}

TEST(Config, ErrorsNameTheKey) {
  auto expect_error = [](const std::string &text, const std::string &needle) {
    try {
      parse(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError &e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error(R"({"distanse": [3]})", "distanse");
  expect_error(R"({"distances": [1]})", "distances");
  expect_error(R"({"distances": "3"})", "distances");
  expect_error(R"({"alpha_sq": [0]})", "alpha_sq");
  expect_error(R"({"decoder": "fancy"})", "fancy");
  expect_error(R"({"bases": ["Y"]})", "bases");
  expect_error(R"({"noise": {"t1_eff": -1}})", "t1_eff");
  expect_error(R"({"noise": {"p_meas": {"2": [1.5]}}})", "p_meas");
  expect_error(R"({"noise": {"bitflip": {"idle_c": 1}}})", "idle_c");
  expect_error(R"({"calibration_fraction": 1.0})", "calibration_fraction");
  EXPECT_THROW(parse_config_text("{ not json"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST(Config, RoundTripKeepsHash) {
  auto c = parse(R"({"distances": [3, 5], "alpha_sq": [1, 2], "seed": 9,
    "noise": {"p_meas": {"1": [0.01]}, "p_z": 0.03}, "budget": {"d": 3}})");
  auto again = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(again.hash(), c.hash());
  EXPECT_EQ(again.to_json().dump(), c.to_json().dump());
  auto other = parse(R"({"distances": [3, 5], "alpha_sq": [1, 2], "seed": 10,
    "noise": {"p_meas": {"1": [0.01]}, "p_z": 0.03}, "budget": {"d": 3}})");
  EXPECT_NE(other.hash(), c.hash());
  EXPECT_EQ(hash_hex(0x1fULL), "000000000000001f");
}

TEST(ModelGraph, UsesSamplingProbabilities) {
  auto m = noise::RepCodeNoiseModel::uniform(3, 0.1, 0.02, 0.06);
  m.mid_cycle_fraction = 0.5;
  auto [qe, qm] = sampler::split_phase_flip(0.1, 0.5);
  auto g = model_graph(m, 4);
  for (const auto &e : g.edges()) {
    const auto a = g.detector(e.u);
    switch (e.kind) {
      case graph::EdgeKind::kTime:
        EXPECT_NEAR(e.p, 0.05, 1e-15);
        break;
      case graph::EdgeKind::kDiagonal:
        EXPECT_NEAR(e.p, qm, 1e-15);
        break;
      case graph::EdgeKind::kSpace:
        if (a.time < 4) EXPECT_NEAR(e.p, qe, 1e-15);
        break;
      default:
        break;
    }
  }
}

MemoryPointSpec small_spec(double pz, double pmeas, double perase) {
  MemoryPointSpec s;
  s.model = noise::RepCodeNoiseModel::uniform(3, pz, pmeas, perase);
  s.cycles = 6;
  s.shots = 4000;
  s.seed = 21;
  s.decoders = {DecoderKind::kNone, DecoderKind::kNaive, DecoderKind::kMerged};
  return s;
}

TEST(MemoryPoint, NoiselessRunNeverFlips) {
  auto r = run_memory_point(small_spec(0.0, 0.0, 0.0));
  EXPECT_EQ(r.calibration_shots, 1000u);
  EXPECT_EQ(r.scored_shots, 3000u);
  for (uint64_t f : r.flips) EXPECT_EQ(f, 0u);
  EXPECT_NEAR(r.observable(2).value, 1.0 - 2.0 / 3002.0, 1e-12);
}

TEST(MemoryPoint, DeterministicAcrossWorkers) {
  auto spec = small_spec(0.06, 0.02, 0.05);
  auto a = run_memory_point(spec);
  spec.workers = 3;
  auto b = run_memory_point(spec);
  EXPECT_EQ(a.flips, b.flips);
  EXPECT_EQ(a.only_first, b.only_first);
  EXPECT_EQ(a.detection, b.detection);
  EXPECT_EQ(a.mean_time_p_baseline, b.mean_time_p_baseline);
  spec.seed += 1;
  EXPECT_NE(run_memory_point(spec).flips, a.flips);
}

TEST(MemoryPoint, DisagreementCountsAreConsistent) {
  auto spec = small_spec(0.08, 0.02, 0.08);
  auto r = run_memory_point(spec);
  ASSERT_EQ(r.flips.size(), 3u);
  for (size_t a = 0; a < 3; ++a) {
    EXPECT_EQ(r.only_first[a][a], 0u);
    for (size_t b = 0; b < 3; ++b) {
      EXPECT_EQ(int64_t(r.flips[a]) - int64_t(r.flips[b]),
                int64_t(r.only_first[a][b]) - int64_t(r.only_first[b][a]));
    }
  }
  EXPECT_GT(r.flips[0], 0u);
  EXPECT_LT(r.flips[0], r.scored_shots / 2);
}

TEST(MemoryPoint, ModelWeightsSkipCalibration) {
  auto spec = small_spec(0.05, 0.01, 0.0);
  spec.weights = WeightSource::kModel;
  auto r = run_memory_point(spec);
  EXPECT_EQ(r.calibration_shots, 0u);
  EXPECT_EQ(r.scored_shots, 4000u);
}

TEST(MemoryPoint, RepetitionSuppressesErrors) {
  // One phase flip per cycle at 1%: a single cat fails at about 2% over 6 cycles,
  // the decoded d = 3 memory far less often.
  auto spec = small_spec(0.01, 0.0, 0.0);
  spec.shots = 20000;
  spec.decoders = {DecoderKind::kMerged};
  auto r = run_memory_point(spec);
  EXPECT_LT(double(r.flips[0]) / double(r.scored_shots), 0.01);
}

TEST(DecayCurve, ExactExponential) {
  std::vector<uint32_t> cycles{2, 5, 10, 20, 40};
  std::vector<analysis::Estimate> values;
  for (uint32_t n : cycles) values.push_back({0.97 * std::exp(-double(n) / 25.0), 0.001});
  auto c = fit_decay_curve(cycles, values, false);
  ASSERT_TRUE(c.fit.has_value()) << c.fit_error;
  EXPECT_NEAR(c.eps, 1.0 / 50.0, 1e-9);
  EXPECT_GT(c.eps_sigma, 0.0);
  values.pop_back();
  EXPECT_THROW(fit_decay_curve(cycles, values, false), InputError);
}

TEST(DecayCurve, FailureIsReportedNotThrown) {
  std::vector<uint32_t> cycles{1, 2, 3};
  std::vector<analysis::Estimate> values{{0.9, 0.0}, {0.8, 0.0}, {0.7, 0.0}};
  auto c = fit_decay_curve(cycles, values, false);
  EXPECT_FALSE(c.fit.has_value());
  EXPECT_FALSE(c.fit_error.empty());
}

TEST(CycleSelection, SpreadsOverTheDecay) {
  auto c = cycles_for_decay(40.0, 400);
  EXPECT_EQ(c, (std::vector<uint32_t>{4, 10, 20, 30, 40, 60}));
  auto clipped = cycles_for_decay(1000.0, 50);
  EXPECT_LE(clipped.back(), 50u);
  EXPECT_GE(clipped.size(), 4u);
  auto tiny = cycles_for_decay(0.5, 100);
  EXPECT_GE(tiny.size(), 4u);
  EXPECT_TRUE(std::is_sorted(tiny.begin(), tiny.end()));
  EXPECT_THROW(cycles_for_decay(0.0, 10), DomainError);
}

TEST(Experiment, StampedAndReproducible) {
  auto cfg = parse(R"({"distances": [3], "alpha_sq": [1.5, 2, 3], "bases": ["X", "Z"], "shots": 3000,
    "cycles": [2, 4, 8, 12], "seed": 4, "noise": {"p_meas": {"1": [0.01]}, "p_erase": {"1": [0.03]}}})");
  auto a = run_memory_experiment(cfg);
  EXPECT_EQ(a["version"], kVersion);
  EXPECT_EQ(a["config_hash"], hash_hex(cfg.hash()));
  EXPECT_EQ(a["seed"], 4);
  ASSERT_EQ(a["summary"].size(), 3u);
  for (const auto &row : a["summary"]) {
    EXPECT_TRUE(row["eps_phase"].is_number());
    EXPECT_TRUE(row["eps_bit"].is_number());
    EXPECT_GT(row["eps_phase"].get<double>(), 0.0);
  }
  EXPECT_EQ(a["points"].size(), 3u * 2u);
  EXPECT_EQ(run_memory_experiment(cfg).dump(), a.dump());
  auto higher = a["summary"][2]["eps_phase"].get<double>();
  auto lower = a["summary"][0]["eps_phase"].get<double>();
  EXPECT_GT(higher, lower);
}

TEST(Sweep, RequiresLindbladSection) {
  auto cfg = parse(R"({"distances": [3]})");
  EXPECT_THROW(run_lindblad_sweep(cfg), ConfigError);
  auto bad = parse(R"({"lindblad": {"sweep": "other", "values": [1]}})");
  EXPECT_THROW(run_lindblad_sweep(bad), ConfigError);
}

TEST(Sweep, ChiRatioRows) {
  auto cfg = parse(R"({"lindblad": {"sweep": "chi_ratio", "values": [1.0, 1.3], "alpha_sq": 2, "dim": 16}})");
  auto out = run_lindblad_sweep(cfg);
  EXPECT_EQ(out["sweep"], "chi_ratio");
  const auto &rows = out["rows"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(rows[0]["bitflip"].get<double>(), rows[1]["bitflip"].get<double>());
}

TEST(Csv, QuotesWhenNeeded) {
  EXPECT_EQ(to_csv({"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", ""}}), "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
}

TEST(Decoders, NamesRoundTrip) {
  for (auto k : {DecoderKind::kNone, DecoderKind::kNaive, DecoderKind::kMerged}) {
    EXPECT_EQ(parse_decoder(decoder_name(k)), k);
  }
  EXPECT_THROW(parse_decoder("mwpm"), ConfigError);
}

}  // namespace
