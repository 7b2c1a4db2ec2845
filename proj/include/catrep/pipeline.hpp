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

#ifndef CATREP_PIPELINE_HPP
#define CATREP_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "catrep/analysis.hpp"
#include "catrep/graph.hpp"
#include "catrep/noise.hpp"
#include "catrep/sampler.hpp"

#include "json.hpp"

namespace catrep::pipeline {

using Json = nlohmann::ordered_json;

inline constexpr const char *kVersion = "0.1.0";

enum class DecoderKind : uint8_t { kNone = 0, kNaive = 1, kMerged = 2 };

const char *decoder_name(DecoderKind k);
DecoderKind parse_decoder(const std::string &s);

/// Where edge weights come from.
enum class WeightSource : uint8_t {
  /// Correlation estimates from calibration shots.
  kCalibrated = 0,
  /// Closed-form probabilities of the sampling model.
  kModel = 1,
};

/// Edge probabilities implied by a noise model with erased outcomes read as
/// 1, in the regular layout.
graph::MatchingGraph model_graph(const noise::RepCodeNoiseModel &m, uint32_t cycles);

/// One (model, cycles, basis) memory point scored under one or more decoders.
struct MemoryPointSpec {
  noise::RepCodeNoiseModel model;
  uint32_t cycles = 1;
  sampler::Basis basis = sampler::Basis::X;
  uint64_t shots = 1000;
  uint64_t seed = 0;
  std::vector<DecoderKind> decoders{DecoderKind::kMerged};
  WeightSource weights = WeightSource::kCalibrated;
  /// Leading fraction of shots used for weighting and excluded from scoring.
  double calibration_fraction = 0.25;
  graph::WeightingOptions weighting;
  graph::MergeOptions merge;
  unsigned workers = 1;
};

struct MemoryPointResult {
  uint64_t calibration_shots = 0;
  uint64_t scored_shots = 0;
  /// Logical flips per decoder, in spec.decoders order.
  std::vector<uint64_t> flips;
  /// only_first[a][b]: shots where decoder a flipped and decoder b did not.
  std::vector<std::vector<uint64_t>> only_first;
  /// Detection probabilities over calibration shots (erasures read as 1).
  std::vector<double> detection;
  /// Mean time-like edge probability of the unconditioned and baseline graphs.
  double mean_time_p_correlation = 0.0;
  double mean_time_p_baseline = 0.0;

  analysis::BetaPosterior posterior(size_t decoder = 0) const;
  analysis::Estimate observable(size_t decoder = 0) const;
};

MemoryPointResult run_memory_point(const MemoryPointSpec &spec);

/// Logical error per cycle of a decay, from a fit over cycle counts.
struct DecayCurve {
  std::vector<uint32_t> cycles;
  std::vector<analysis::Estimate> values;
  std::optional<analysis::DecayFit> fit;
  std::string fit_error;
  double eps = 0.0;
  double eps_sigma = 0.0;
};

/// Fits value(n) = A exp(-n / T) (+ B) and converts T to eps = 1 / (2T).
DecayCurve fit_decay_curve(const std::vector<uint32_t> &cycles,
                           const std::vector<analysis::Estimate> &values, bool with_offset);

/// Cycle counts spanning a decay of roughly `decay_cycles`.
std::vector<uint32_t> cycles_for_decay(double decay_cycles, uint32_t max_cycles);

/// Rough decay time in cycles from a short pilot run.
double pilot_decay_cycles(const noise::RepCodeNoiseModel &model, DecoderKind decoder,
                          uint64_t shots, uint64_t seed, unsigned workers);

// ---------------------------------------------------------------------------
// Declarative configuration.

struct BitFlipConfig {
  double idle_a = 0.018;
  double idle_b = 1.5;
  double p_cx = 5e-4;
};

struct NoiseConfig {
  double t1_eff = 60e-6;
  double t_cycle = 2.8e-6;
  double mid_cycle_fraction = 0.5;
  /// Explicit per-cycle phase-flip probability; derived from t1_eff if unset.
  std::optional<double> p_z;
  /// Per-ancilla tables keyed by alpha_sq; the nearest key is used.
  std::map<double, std::vector<double>> p_meas;
  std::map<double, std::vector<double>> p_erase;
  double final_meas_error_x = 0.0;
  std::optional<double> final_meas_error_z;
  BitFlipConfig bitflip;
};

struct ExperimentConfig {
  std::vector<uint32_t> distances{3, 5};
  std::vector<double> alpha_sq{1.0, 2.0, 3.0};
  /// Empty means automatic selection from a pilot run.
  std::vector<uint32_t> cycles;
  uint32_t max_cycles = 400;
  uint64_t shots = 10000;
  uint64_t seed = 1;
  unsigned workers = 1;
  DecoderKind decoder = DecoderKind::kMerged;
  std::vector<sampler::Basis> bases{sampler::Basis::X, sampler::Basis::Z};
  double calibration_fraction = 0.25;
  double p_floor = 1e-6;
  uint32_t p_odd_cap_edges = 0;
  bool fit_with_offset = false;
  double gamma_min_alpha_sq = 1.5;
  NoiseConfig noise;
  /// Raw document, kept for hashing and for sections read by other runners.
  Json raw;

  /// Throws ConfigError with the offending key on schema violations.
  static ExperimentConfig from_json(const Json &j);
  static ExperimentConfig from_file(const std::string &path);
  Json to_json() const;
  uint64_t hash() const;

  noise::RepCodeNoiseModel model(uint32_t d, double alpha_sq) const;
  noise::BitFlipPhenomModel bitflip_model(uint32_t d) const;
};

/// Parses JSON text, allowing // line comments.
Json parse_config_text(const std::string &text);

std::string hash_hex(uint64_t h);

/// Full sweep: sampling, weighting, decoding, scoring and fits.
Json run_memory_experiment(const ExperimentConfig &cfg);

/// Budget of a configured point, from the "budget" section.
Json run_budget(const ExperimentConfig &cfg);

/// Sweep of CX^2 bit-flip probability over the chi ratio or the buffer
/// detuning, from the "lindblad" section.
Json run_lindblad_sweep(const ExperimentConfig &cfg);

/// Attaches version, config hash and seed to an output document.
Json stamp_output(Json payload, const ExperimentConfig &cfg);

/// Writes rows as comma-separated values with a header line.
std::string to_csv(const std::vector<std::string> &header,
                   const std::vector<std::vector<std::string>> &rows);

}  // namespace catrep::pipeline

#endif
