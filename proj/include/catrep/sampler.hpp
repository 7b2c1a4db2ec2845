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

#ifndef CATREP_SAMPLER_HPP
#define CATREP_SAMPLER_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "catrep/noise.hpp"
#include "catrep/rng.hpp"

namespace catrep::sampler {

enum class Basis : uint8_t { X = 0, Z = 1 };

/// Syndrome value marking an erased ancilla measurement.
inline constexpr uint8_t kErased = 2;

const char *basis_name(Basis b);
Basis parse_basis(const std::string &s);

/// One shot of a memory experiment.
///
/// In the X basis, initial_state[i] and finals[i] are the measured parities of
/// data qubit i (0 for |+>, 1 for |->). In the Z basis they are the measured
/// signs (0 for |alpha>, 1 for |-alpha>). syndromes is row-major with one row
/// of d-1 outcomes per cycle.
struct SyndromeRecord {
  Basis basis = Basis::X;
  uint32_t d = 0;
  uint32_t cycles = 0;
  std::vector<uint8_t> initial_state;
  std::vector<uint8_t> syndromes;
  std::vector<uint8_t> finals;
  uint64_t shot_seed = 0;
  /// Hidden truth. X basis: parity of all phase flips on data qubit 0.
  /// Z basis: parity of all injected bit flips.
  uint8_t true_flip = 0;

  uint8_t syndrome(uint32_t t, uint32_t j) const { return syndromes[size_t(t) * (d - 1) + j]; }
  bool has_erasure() const;
  /// Throws InputError when sizes or values are inconsistent.
  void validate() const;
  bool operator==(const SyndromeRecord &) const = default;
};

struct BatchMetadata {
  uint64_t experiment_seed = 0;
  uint64_t first_shot_index = 0;
  uint64_t model_hash = 0;
  std::string creator;
};

/// Homogeneous set of shots sharing basis, distance and cycle count.
struct ShotBatch {
  Basis basis = Basis::X;
  uint32_t d = 0;
  uint32_t cycles = 0;
  noise::RepCodeNoiseModel model;
  BatchMetadata metadata;
  std::vector<SyndromeRecord> records;
};

/// Each qubit independently even (0) with the steady-state |+> population.
std::vector<uint8_t> sample_initial_x_state(uint32_t d, double alpha_sq, Rng &rng);

/// Generates one shot. The model's alpha_sq sets the initial-state
/// distribution in the X basis.
SyndromeRecord sample_shot(const noise::RepCodeNoiseModel &model, uint32_t cycles, Basis basis,
                           Rng &rng);

/// Deterministic shot source: shot k is drawn from Rng(shot_seed(seed, k)).
class ShotGenerator {
 public:
  ShotGenerator(noise::RepCodeNoiseModel model, uint32_t cycles, Basis basis, uint64_t seed);

  /// Fills `out`, reusing its storage.
  void generate(uint64_t shot_index, SyndromeRecord &out) const;
  SyndromeRecord generate(uint64_t shot_index) const;

  const noise::RepCodeNoiseModel &model() const { return model_; }
  uint32_t cycles() const { return cycles_; }
  Basis basis() const { return basis_; }
  uint64_t seed() const { return seed_; }

 private:
  noise::RepCodeNoiseModel model_;
  uint32_t cycles_;
  Basis basis_;
  uint64_t seed_;
  std::vector<double> q_early_;
  std::vector<double> q_mid_;
  double p_plus_;
};

/// Independent early and mid-cycle flip probabilities (q_early, q_mid) with
/// q_mid / (q_early + q_mid) = mid_fraction whose odd-parity combination
/// equals p_z.
std::pair<double, double> split_phase_flip(double p_z, double mid_fraction);

/// Shots first_index .. first_index+shots-1 of the stream keyed by seed.
/// The result does not depend on `workers`.
ShotBatch sample_batch(const noise::RepCodeNoiseModel &model, uint32_t cycles, Basis basis,
                       uint64_t shots, uint64_t seed, uint64_t first_index = 0,
                       unsigned workers = 1);

/// Fraction of nontrivial detectors at each (time, ancilla), erased outcomes
/// read as 1. Row-major, (cycles+1) rows of d-1 entries.
std::vector<double> detection_probabilities(const ShotBatch &batch);

/// Binary syndrome file. All integers little-endian.
///
///   magic "CATREPSY" (8 bytes), u32 version = 1, u32 d, u32 cycles,
///   u8 basis, 3 bytes padding, u64 shots, u64 model hash, u64 experiment seed,
///   u64 first shot index, u32 n, n bytes of the model's canonical JSON text,
///   then per shot: u64 shot_seed, d bytes initial_state,
///   cycles*(d-1) bytes syndromes in {0,1,2}, d bytes finals, u8 true_flip.
void write_batch(const ShotBatch &batch, std::ostream &out);
ShotBatch read_batch(std::istream &in);
void write_batch_file(const ShotBatch &batch, const std::string &path);
ShotBatch read_batch_file(const std::string &path);

/// Human-readable export: one block per shot, erased outcomes printed as E.
void write_batch_text(const ShotBatch &batch, std::ostream &out);

}  // namespace catrep::sampler

#endif
