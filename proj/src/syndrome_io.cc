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

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "catrep/errors.hpp"
#include "catrep/sampler.hpp"

namespace catrep::sampler {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'T', 'R', 'E', 'P', 'S', 'Y'};
constexpr uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream &out, T v) {
  unsigned char buf[sizeof(T)];
  for (size_t k = 0; k < sizeof(T); ++k) buf[k] = static_cast<unsigned char>((uint64_t(v) >> (8 * k)) & 0xFF);
  out.write(reinterpret_cast<const char *>(buf), sizeof(T));
}

template <class T>
T get(std::istream &in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char *>(buf), sizeof(T))) throw IoError("syndrome file truncated");
  uint64_t v = 0;
  for (size_t k = 0; k < sizeof(T); ++k) v |= uint64_t(buf[k]) << (8 * k);
  return static_cast<T>(v);
}

void get_bytes(std::istream &in, std::vector<uint8_t> &dst, size_t n) {
  dst.resize(n);
  if (n && !in.read(reinterpret_cast<char *>(dst.data()), std::streamsize(n))) {
    throw IoError("syndrome file truncated");
  }
}

}  // namespace

void write_batch(const ShotBatch &batch, std::ostream &out) {
  out.write(kMagic, sizeof(kMagic));
  put<uint32_t>(out, kFormatVersion);
  put<uint32_t>(out, batch.d);
  put<uint32_t>(out, batch.cycles);
  put<uint8_t>(out, static_cast<uint8_t>(batch.basis));
  put<uint8_t>(out, 0);
  put<uint8_t>(out, 0);
  put<uint8_t>(out, 0);
  put<uint64_t>(out, batch.records.size());
  put<uint64_t>(out, batch.metadata.model_hash);
  put<uint64_t>(out, batch.metadata.experiment_seed);
  put<uint64_t>(out, batch.metadata.first_shot_index);
  std::string model_text = batch.model.canonical_text();
  put<uint32_t>(out, uint32_t(model_text.size()));
  out.write(model_text.data(), std::streamsize(model_text.size()));
  for (const auto &r : batch.records) {
    if (r.d != batch.d || r.cycles != batch.cycles || r.basis != batch.basis) {
      throw InputError("write_batch: heterogeneous batch");
    }
    put<uint64_t>(out, r.shot_seed);
    out.write(reinterpret_cast<const char *>(r.initial_state.data()), r.d);
    out.write(reinterpret_cast<const char *>(r.syndromes.data()), std::streamsize(r.syndromes.size()));
    out.write(reinterpret_cast<const char *>(r.finals.data()), r.d);
    put<uint8_t>(out, r.true_flip);
  }
  if (!out) throw IoError("write_batch: stream error");
}

ShotBatch read_batch(std::istream &in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a syndrome file (bad magic)");
  uint32_t version = get<uint32_t>(in);
  if (version != kFormatVersion) throw IoError("unsupported syndrome file version " + std::to_string(version));
  ShotBatch b;
  b.d = get<uint32_t>(in);
  b.cycles = get<uint32_t>(in);
  uint8_t basis = get<uint8_t>(in);
  if (basis > 1) throw IoError("syndrome file: bad basis byte");
  b.basis = static_cast<Basis>(basis);
  get<uint8_t>(in);
  get<uint8_t>(in);
  get<uint8_t>(in);
  uint64_t shots = get<uint64_t>(in);
  b.metadata.model_hash = get<uint64_t>(in);
  b.metadata.experiment_seed = get<uint64_t>(in);
  b.metadata.first_shot_index = get<uint64_t>(in);
  uint32_t n = get<uint32_t>(in);
  std::string text(n, '\0');
  if (n && !in.read(text.data(), n)) throw IoError("syndrome file truncated");
  try {
    b.model = noise::RepCodeNoiseModel::from_canonical_text(text);
  } catch (const std::exception &e) {
    throw IoError(std::string("syndrome file: ") + e.what());
  }
  if (b.model.hash() != b.metadata.model_hash) throw IoError("syndrome file: model hash mismatch");
  if (b.d < 2 || b.d != b.model.d) throw IoError("syndrome file: inconsistent distance");
  b.metadata.creator = "catrep read_batch";
  b.records.resize(shots);
  for (auto &r : b.records) {
    r.basis = b.basis;
    r.d = b.d;
    r.cycles = b.cycles;
    r.shot_seed = get<uint64_t>(in);
    get_bytes(in, r.initial_state, b.d);
    get_bytes(in, r.syndromes, size_t(b.cycles) * (b.d - 1));
    get_bytes(in, r.finals, b.d);
    r.true_flip = get<uint8_t>(in);
    try {
      r.validate();
    } catch (const InputError &e) {
      throw IoError(std::string("syndrome file: ") + e.what());
    }
  }
  return b;
}

void write_batch_file(const ShotBatch &batch, const std::string &path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_batch(batch, f);
}

ShotBatch read_batch_file(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  return read_batch(f);
}

void write_batch_text(const ShotBatch &batch, std::ostream &out) {
  out << "# catrep syndromes d=" << batch.d << " cycles=" << batch.cycles
      << " basis=" << basis_name(batch.basis) << " shots=" << batch.records.size() << "\n";
  auto bits = [&](const std::vector<uint8_t> &v) {
    std::string s;
    for (uint8_t x : v) s.push_back(x == kErased ? 'E' : char('0' + x));
    return s;
  };
  for (size_t k = 0; k < batch.records.size(); ++k) {
    const auto &r = batch.records[k];
    out << "shot " << k << " seed " << r.shot_seed << "\n";
    out << "  initial " << bits(r.initial_state) << "\n";
    for (uint32_t t = 0; t < r.cycles; ++t) {
      std::vector<uint8_t> row(r.syndromes.begin() + size_t(t) * (r.d - 1),
                               r.syndromes.begin() + size_t(t + 1) * (r.d - 1));
      out << "  s" << t << " " << bits(row) << "\n";
    }
    out << "  final " << bits(r.finals) << "\n";
  }
}

}  // namespace catrep::sampler
