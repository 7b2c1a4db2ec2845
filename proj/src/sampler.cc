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

#include "catrep/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "catrep/catq.hpp"
#include "catrep/errors.hpp"
#include "catrep/graph.hpp"

namespace catrep::sampler {

const char *basis_name(Basis b) { return b == Basis::X ? "X" : "Z"; }

Basis parse_basis(const std::string &s) {
  if (s == "X" || s == "x") return Basis::X;
  if (s == "Z" || s == "z") return Basis::Z;
  throw InputError("unknown basis '" + s + "' (expected X or Z)");
}

bool SyndromeRecord::has_erasure() const {
  return std::find(syndromes.begin(), syndromes.end(), kErased) != syndromes.end();
}

void SyndromeRecord::validate() const {
  if (d < 2) throw InputError("record distance must be >= 2");
  if (initial_state.size() != d || finals.size() != d) throw InputError("record data size mismatch");
  if (syndromes.size() != size_t(cycles) * (d - 1)) throw InputError("record syndrome size mismatch");
  for (uint8_t v : initial_state) if (v > 1) throw InputError("initial_state entries must be 0 or 1");
  for (uint8_t v : finals) if (v > 1) throw InputError("final entries must be 0 or 1");
  for (uint8_t v : syndromes) if (v > kErased) throw InputError("syndrome entries must be 0, 1 or 2");
  if (true_flip > 1) throw InputError("true_flip must be 0 or 1");
}

std::pair<double, double> split_phase_flip(double p_z, double mid_fraction) {
  double f = mid_fraction;
  double c = f * (1.0 - f);
  double s;
  if (c < 1e-15) {
    s = p_z;
  } else {
    s = (1.0 - std::sqrt(std::max(0.0, 1.0 - 8.0 * c * p_z))) / (4.0 * c);
  }
  return {(1.0 - f) * s, f * s};
}

std::vector<uint8_t> sample_initial_x_state(uint32_t d, double alpha_sq, Rng &rng) {
  double p_plus = std::isinf(alpha_sq) ? 0.5 : catq::steady_state_plus_population(alpha_sq);
  std::vector<uint8_t> out(d);
  for (auto &b : out) b = rng.uniform() < p_plus ? 0 : 1;
  return out;
}

namespace {

struct ShotParams {
  const noise::RepCodeNoiseModel *model;
  const std::vector<double> *q_early;
  const std::vector<double> *q_mid;
  double p_plus;
  uint32_t cycles;
  Basis basis;
};

void fill_shot(const ShotParams &sp, Rng &rng, SyndromeRecord &out) {
  const auto &m = *sp.model;
  const uint32_t d = m.d;
  const uint32_t a = d - 1;
  const uint32_t T = sp.cycles;
  out.basis = sp.basis;
  out.d = d;
  out.cycles = T;
  out.initial_state.assign(d, 0);
  out.finals.assign(d, 0);
  out.syndromes.assign(size_t(T) * a, 0);

  uint8_t frame[64];
  if (sp.basis == Basis::X) {
    for (uint32_t i = 0; i < d; ++i) out.initial_state[i] = rng.uniform() < sp.p_plus ? 0 : 1;
    for (uint32_t i = 0; i < d; ++i) frame[i] = out.initial_state[i];
  } else {
    for (uint32_t i = 0; i < d; ++i) out.initial_state[i] = rng.uniform() < 0.5 ? 0 : 1;
    for (uint32_t i = 0; i < d; ++i) frame[i] = rng.uniform() < 0.5 ? 0 : 1;
  }

  uint8_t *syn = out.syndromes.data();
  uint8_t parity[64] = {0};
  for (uint32_t i = 0; i < d; ++i) {
    const double qe = (*sp.q_early)[i];
    const double qm = (*sp.q_mid)[i];
    const double q_any = qe + qm - qe * qm;
    if (q_any <= 0.0) continue;
    const double p_both = qe * qm / q_any;
    const double p_early_only = qe * (1.0 - qm) / q_any;
    uint64_t t = 0;
    while (true) {
      uint64_t k = rng.geometric(q_any);
      if (k >= T - t) break;
      t += k;
      double u = rng.uniform();
      bool early = u < p_both + p_early_only;
      bool mid = u < p_both || u >= p_both + p_early_only;
      if (early) {
        if (i >= 1) syn[t * a + i - 1] ^= 1;
        if (i + 1 < d) syn[t * a + i] ^= 1;
        parity[i] ^= 1;
      }
      if (mid) {
        if (i >= 1) syn[t * a + i - 1] ^= 1;
        if (i + 1 < d && t + 1 < T) syn[(t + 1) * a + i] ^= 1;
        parity[i] ^= 1;
      }
      ++t;
      if (t >= T) break;
    }
  }
  for (uint32_t t = 1; t < T; ++t) {
    uint8_t *row = syn + size_t(t) * a;
    const uint8_t *prev = row - a;
    for (uint32_t j = 0; j < a; ++j) row[j] ^= prev[j];
  }
  if (T > 0) {
    for (uint32_t j = 0; j < a; ++j) {
      uint8_t b = frame[j] ^ frame[j + 1];
      if (!b) continue;
      for (uint32_t t = 0; t < T; ++t) syn[size_t(t) * a + j] ^= 1;
    }
  }

  uint8_t bitflip[64] = {0};
  if (sp.basis == Basis::Z && !m.p_bitflip.empty()) {
    for (uint32_t i = 0; i < d; ++i) {
      double p = m.p_bitflip[i];
      if (p <= 0.0) continue;
      uint64_t t = 0;
      while (true) {
        uint64_t k = rng.geometric(p);
        if (k >= T - t) break;
        t += k + 1;
        bitflip[i] ^= 1;
        if (t >= T) break;
      }
    }
  }

  for (uint32_t j = 0; j < a; ++j) {
    const double pm = m.p_meas[j] + m.p_erase[j];
    if (pm <= 0.0) continue;
    const double pe = m.p_erase[j];
    uint64_t t = 0;
    while (true) {
      uint64_t k = rng.geometric(pm);
      if (k >= T - t) break;
      t += k;
      uint8_t &s = syn[t * a + j];
      if (rng.uniform() * pm < pe) {
        s = kErased;
      } else {
        s ^= 1;
      }
      ++t;
      if (t >= T) break;
    }
  }

  uint8_t truth = 0;
  if (sp.basis == Basis::X) {
    for (uint32_t i = 0; i < d; ++i) {
      uint8_t err = rng.uniform() < m.final_meas_error_x ? 1 : 0;
      out.finals[i] = out.initial_state[i] ^ parity[i] ^ err;
    }
    truth = parity[0];
  } else {
    for (uint32_t i = 0; i < d; ++i) {
      uint8_t err = rng.uniform() < m.final_meas_error_z ? 1 : 0;
      out.finals[i] = out.initial_state[i] ^ bitflip[i] ^ err;
      truth ^= bitflip[i];
    }
  }
  out.true_flip = truth;
}

double plus_probability(const noise::RepCodeNoiseModel &m) {
  return std::isinf(m.alpha_sq) ? 0.5 : catq::steady_state_plus_population(m.alpha_sq);
}

void split_all(const noise::RepCodeNoiseModel &m, std::vector<double> &qe, std::vector<double> &qm) {
  qe.resize(m.d);
  qm.resize(m.d);
  for (uint32_t i = 0; i < m.d; ++i) {
    auto [e, mid] = split_phase_flip(m.p_z[i], m.mid_cycle_fraction);
    qe[i] = e;
    qm[i] = mid;
  }
}

}  // namespace

SyndromeRecord sample_shot(const noise::RepCodeNoiseModel &model, uint32_t cycles, Basis basis,
                           Rng &rng) {
  model.validate();
  std::vector<double> qe, qm;
  split_all(model, qe, qm);
  ShotParams sp{&model, &qe, &qm, plus_probability(model), cycles, basis};
  SyndromeRecord r;
  fill_shot(sp, rng, r);
  return r;
}

ShotGenerator::ShotGenerator(noise::RepCodeNoiseModel model, uint32_t cycles, Basis basis,
                             uint64_t seed)
    : model_(std::move(model)), cycles_(cycles), basis_(basis), seed_(seed) {
  model_.validate();
  if (cycles_ == 0) throw InputError("cycles must be >= 1");
  split_all(model_, q_early_, q_mid_);
  p_plus_ = plus_probability(model_);
}

void ShotGenerator::generate(uint64_t shot_index, SyndromeRecord &out) const {
  uint64_t s = shot_seed(seed_, shot_index);
  Rng rng(s);
  ShotParams sp{&model_, &q_early_, &q_mid_, p_plus_, cycles_, basis_};
  fill_shot(sp, rng, out);
  out.shot_seed = s;
}

SyndromeRecord ShotGenerator::generate(uint64_t shot_index) const {
  SyndromeRecord r;
  generate(shot_index, r);
  return r;
}

ShotBatch sample_batch(const noise::RepCodeNoiseModel &model, uint32_t cycles, Basis basis,
                       uint64_t shots, uint64_t seed, uint64_t first_index, unsigned workers) {
  ShotGenerator gen(model, cycles, basis, seed);
  ShotBatch b;
  b.basis = basis;
  b.d = model.d;
  b.cycles = cycles;
  b.model = model;
  b.metadata.experiment_seed = seed;
  b.metadata.first_shot_index = first_index;
  b.metadata.model_hash = model.hash();
  b.metadata.creator = "catrep sample_batch";
  b.records.resize(shots);
  unsigned w = std::max(1u, std::min<unsigned>(workers, unsigned(std::max<uint64_t>(1, shots))));
  auto work = [&](unsigned k) {
    uint64_t lo = shots * k / w, hi = shots * (k + 1) / w;
    for (uint64_t i = lo; i < hi; ++i) gen.generate(first_index + i, b.records[i]);
  };
  if (w == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned k = 0; k < w; ++k) threads.emplace_back(work, k);
    for (auto &t : threads) t.join();
  }
  return b;
}

std::vector<double> detection_probabilities(const ShotBatch &batch) {
  if (batch.records.empty()) throw InputError("detection_probabilities: empty batch");
  size_t n = size_t(batch.cycles + 1) * (batch.d - 1);
  std::vector<uint64_t> counts(n, 0);
  for (const auto &r : batch.records) {
    auto x = graph::flattened_detectors(r);
    for (size_t k = 0; k < n; ++k) counts[k] += x[k];
  }
  std::vector<double> out(n);
  for (size_t k = 0; k < n; ++k) out[k] = double(counts[k]) / double(batch.records.size());
  return out;
}

}  // namespace catrep::sampler
