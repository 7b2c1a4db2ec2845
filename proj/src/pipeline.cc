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

#include "catrep/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "catrep/decoder.hpp"
#include "catrep/errors.hpp"

namespace catrep::pipeline {

using graph::EdgeKind;
using sampler::Basis;

const char *decoder_name(DecoderKind k) {
  switch (k) {
    case DecoderKind::kNone:
      return "none";
    case DecoderKind::kNaive:
      return "naive";
    case DecoderKind::kMerged:
      return "merged";
  }
  return "?";
}

DecoderKind parse_decoder(const std::string &s) {
  if (s == "none") return DecoderKind::kNone;
  if (s == "naive") return DecoderKind::kNaive;
  if (s == "merged") return DecoderKind::kMerged;
  throw ConfigError("unknown decoder '" + s + "' (expected none, naive or merged)");
}

graph::MatchingGraph model_graph(const noise::RepCodeNoiseModel &m, uint32_t cycles) {
  m.validate();
  const uint32_t d = m.d;
  std::vector<double> qe(d), qm(d);
  for (uint32_t i = 0; i < d; ++i) std::tie(qe[i], qm[i]) = sampler::split_phase_flip(m.p_z[i], m.mid_cycle_fraction);
  const double f = m.final_meas_error_x;
  auto odd2 = [](double a, double b) { return a + b - 2 * a * b; };
  auto layout = graph::MatchingGraph::repetition(d, cycles, 0.5, 0.5, 0.5, 0.5);
  return layout.with_probabilities([&](const graph::Edge &e) {
    const auto a = layout.detector(e.u);
    double p = 0.0;
    switch (e.kind) {
      case EdgeKind::kSpace:
        p = a.time < cycles ? qe[a.space + 1] : f;
        break;
      case EdgeKind::kDiagonal:
        p = qm[a.space + 1];
        break;
      case EdgeKind::kTime:
        p = m.p_meas[a.space] + 0.5 * m.p_erase[a.space];
        break;
      case EdgeKind::kBoundary:
        if (e.v == layout.left_boundary()) {
          const double early = a.time < cycles ? qe[0] : f;
          const double mid = a.time > 0 ? qm[0] : 0.0;
          p = odd2(early, mid);
        } else {
          p = a.time < cycles ? odd2(qe[d - 1], qm[d - 1]) : f;
        }
        break;
    }
    return std::clamp(p, 1e-12, 0.5);
  });
}

analysis::BetaPosterior MemoryPointResult::posterior(size_t k) const {
  const double mu = scored_shots ? double(flips.at(k)) / double(scored_shots) : 0.0;
  return analysis::beta_posterior(scored_shots, mu);
}

analysis::Estimate MemoryPointResult::observable(size_t k) const {
  return analysis::observable_estimate(posterior(k));
}

namespace {

template <class F>
void parallel_chunks(unsigned workers, uint64_t begin, uint64_t end, F &&fn) {
  const uint64_t n = end - begin;
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2 * uint64_t(workers)) {
    fn(0u, begin, end);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const uint64_t lo = begin + n * w / workers, hi = begin + n * (w + 1) / workers;
    threads.emplace_back([&, w, lo, hi] {
      try {
        fn(w, lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : threads) t.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double mean_time_p(const graph::MatchingGraph &g) {
  double s = 0.0;
  size_t n = 0;
  for (const auto &e : g.edges()) {
    if (e.kind != EdgeKind::kTime) continue;
    s += e.p;
    ++n;
  }
  return n ? s / double(n) : 0.0;
}

}  // namespace

MemoryPointResult run_memory_point(const MemoryPointSpec &spec) {
  spec.model.validate();
  if (spec.cycles == 0) throw DomainError("run_memory_point: cycles must be positive");
  if (spec.decoders.empty()) throw DomainError("run_memory_point: no decoder selected");
  if (!(spec.calibration_fraction >= 0.0 && spec.calibration_fraction < 1.0)) {
    throw DomainError("run_memory_point: calibration_fraction must lie in [0, 1)");
  }
  const sampler::ShotGenerator gen(spec.model, spec.cycles, spec.basis, spec.seed);
  const size_t nd = spec.decoders.size();
  MemoryPointResult res;
  res.flips.assign(nd, 0);
  res.only_first.assign(nd, std::vector<uint64_t>(nd, 0));

  const bool decode = spec.basis == Basis::X;
  const bool calibrate = spec.weights == WeightSource::kCalibrated;
  const uint64_t n_cal = calibrate ? uint64_t(std::floor(double(spec.shots) * spec.calibration_fraction)) : 0;
  res.calibration_shots = n_cal;
  res.scored_shots = spec.shots - n_cal;

  graph::MatchingGraph flat, conditioned;
  if (calibrate) {
    std::vector<graph::CorrelationAccumulator> accs;
    const unsigned workers = std::max(1u, spec.workers);
    for (unsigned w = 0; w < workers; ++w) accs.emplace_back(spec.model.d, spec.cycles);
    parallel_chunks(workers, 0, n_cal, [&](unsigned w, uint64_t lo, uint64_t hi) {
      sampler::SyndromeRecord r;
      for (uint64_t k = lo; k < hi; ++k) {
        gen.generate(k, r);
        accs[w].add(r);
      }
    });
    for (unsigned w = 1; w < workers; ++w) accs[0].merge(accs[w]);
    res.detection = accs[0].detection_probabilities();
    if (n_cal > 0) {
      flat = accs[0].correlation_graph(spec.weighting);
      conditioned = accs[0].baseline_graph(spec.weighting);
      res.mean_time_p_correlation = mean_time_p(flat);
      res.mean_time_p_baseline = mean_time_p(conditioned);
    } else if (decode) {
      throw DomainError("run_memory_point: no calibration shots for correlation weighting");
    }
  } else {
    flat = model_graph(spec.model, spec.cycles);
    auto clean = spec.model;
    std::fill(clean.p_erase.begin(), clean.p_erase.end(), 0.0);
    conditioned = model_graph(clean, spec.cycles);
  }

  const unsigned workers = std::max(1u, spec.workers);
  std::vector<std::vector<uint64_t>> flips(workers, std::vector<uint64_t>(nd, 0));
  std::vector<std::vector<uint64_t>> only(workers, std::vector<uint64_t>(nd * nd, 0));
  parallel_chunks(workers, n_cal, spec.shots, [&](unsigned w, uint64_t lo, uint64_t hi) {
    sampler::SyndromeRecord r;
    decoder::Decoder dec;
    std::optional<graph::ShotGraph> overlay;
    if (decode) overlay.emplace(conditioned);
    std::vector<uint8_t> out(nd);
    const decoder::Matching empty;
    for (uint64_t k = lo; k < hi; ++k) {
      gen.generate(k, r);
      for (size_t i = 0; i < nd; ++i) {
        if (!decode) {
          out[i] = decoder::score(r, empty);
          continue;
        }
        switch (spec.decoders[i]) {
          case DecoderKind::kNone: {
            auto defects = graph::defects_of(graph::flattened_detectors(r));
            out[i] = decoder::score(r, dec.decode(flat, defects));
            break;
          }
          case DecoderKind::kNaive: {
            overlay->reset();
            overlay->apply_naive(r);
            auto defects = graph::defects_of(graph::flattened_detectors(r));
            out[i] = decoder::score(r, dec.decode(*overlay, defects));
            break;
          }
          case DecoderKind::kMerged: {
            overlay->reset();
            auto rd = graph::reconstruct_detectors(r);
            overlay->apply_merge(rd, spec.merge);
            auto defects = overlay->defects(rd);
            out[i] = decoder::score(r, dec.decode(*overlay, defects));
            break;
          }
        }
      }
      for (size_t i = 0; i < nd; ++i) {
        flips[w][i] += out[i];
        for (size_t j = 0; j < nd; ++j) only[w][i * nd + j] += (out[i] && !out[j]);
      }
    }
  });
  for (unsigned w = 0; w < workers; ++w) {
    for (size_t i = 0; i < nd; ++i) {
      res.flips[i] += flips[w][i];
      for (size_t j = 0; j < nd; ++j) res.only_first[i][j] += only[w][i * nd + j];
    }
  }
  return res;
}

DecayCurve fit_decay_curve(const std::vector<uint32_t> &cycles, const std::vector<analysis::Estimate> &values,
                           bool with_offset) {
  if (cycles.size() != values.size()) throw InputError("fit_decay_curve: size mismatch");
  DecayCurve c;
  c.cycles = cycles;
  c.values = values;
  std::vector<analysis::DecayPoint> pts;
  for (size_t i = 0; i < cycles.size(); ++i) pts.push_back({double(cycles[i]), values[i].value, values[i].sigma});
  try {
    auto fit = analysis::fit_exponential(pts, with_offset);
    c.eps = 1.0 / (2.0 * fit.decay_time);
    c.eps_sigma = fit.decay_time_sigma() / (2.0 * fit.decay_time * fit.decay_time);
    c.fit = std::move(fit);
  } catch (const std::exception &e) {
    c.fit_error = e.what();
  }
  return c;
}

std::vector<uint32_t> cycles_for_decay(double decay_cycles, uint32_t max_cycles) {
  if (!(decay_cycles > 0)) throw DomainError("cycles_for_decay: decay must be positive");
  std::vector<uint32_t> out;
  for (double f : {0.1, 0.25, 0.5, 0.75, 1.0, 1.5}) {
    double c = std::round(f * decay_cycles);
    uint32_t n = uint32_t(std::clamp(c, 1.0, double(std::max<uint32_t>(1, max_cycles))));
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  for (uint32_t n = 1; out.size() < 4 && n <= max_cycles; ++n) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    std::sort(out.begin(), out.end());
  }
  return out;
}

double pilot_decay_cycles(const noise::RepCodeNoiseModel &model, DecoderKind decoder, uint64_t shots,
                          uint64_t seed, unsigned workers) {
  constexpr uint32_t kPilotCycles = 10;
  MemoryPointSpec spec;
  spec.model = model;
  spec.cycles = kPilotCycles;
  spec.basis = Basis::X;
  spec.shots = shots;
  spec.seed = seed;
  spec.decoders = {decoder};
  spec.weights = WeightSource::kModel;
  spec.workers = workers;
  auto r = run_memory_point(spec);
  const double v = r.observable(0).value;
  if (!(v > 0.0)) return kPilotCycles / 2.0;
  if (v >= 1.0) return 1e9;
  return std::max(1.0, -double(kPilotCycles) / std::log(v));
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json stamp_output(Json payload, const ExperimentConfig &cfg) {
  Json out;
  out["version"] = kVersion;
  out["config_hash"] = hash_hex(cfg.hash());
  out["seed"] = cfg.seed;
  for (auto it = payload.begin(); it != payload.end(); ++it) out[it.key()] = it.value();
  return out;
}

std::string to_csv(const std::vector<std::string> &header, const std::vector<std::vector<std::string>> &rows) {
  auto field = [](const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << field(header[i]);
  os << "\n";
  for (const auto &r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << field(r[i]);
    os << "\n";
  }
  return os.str();
}

namespace {

Json fit_json(const DecayCurve &c) {
  Json j;
  j["cycles"] = c.cycles;
  Json vals = Json::array(), sig = Json::array();
  for (const auto &e : c.values) {
    vals.push_back(e.value);
    sig.push_back(e.sigma);
  }
  j["values"] = vals;
  j["sigmas"] = sig;
  if (c.fit) {
    const auto &f = *c.fit;
    j["fit"] = {{"amplitude", f.amplitude},       {"amplitude_sigma", f.amplitude_sigma()},
                {"decay_time", f.decay_time},     {"decay_time_sigma", f.decay_time_sigma()},
                {"offset", f.offset},             {"offset_sigma", f.offset_sigma()},
                {"with_offset", f.with_offset},   {"chi2", f.chi2},
                {"residuals", f.residuals}};
    j["eps"] = c.eps;
    j["eps_sigma"] = c.eps_sigma;
  } else {
    j["fit"] = nullptr;
    j["fit_error"] = c.fit_error;
    j["eps"] = nullptr;
    j["eps_sigma"] = nullptr;
  }
  return j;
}

}  // namespace

Json run_memory_experiment(const ExperimentConfig &cfg) {
  Json points = Json::array();
  Json summary = Json::array();
  Json gammas = Json::array();
  Json detection = Json::array();
  for (uint32_t d : cfg.distances) {
    std::vector<analysis::PowerLawPoint> phase_points;
    for (double x : cfg.alpha_sq) {
      const auto model = cfg.model(d, x);
      std::vector<uint32_t> cycles = cfg.cycles;
      if (cycles.empty()) {
        const uint64_t pilot_shots = std::max<uint64_t>(200, cfg.shots / 10);
        double t = pilot_decay_cycles(model, cfg.decoder, pilot_shots, cfg.seed ^ 0x9e3779b97f4a7c15ULL, cfg.workers);
        cycles = cycles_for_decay(t, cfg.max_cycles);
      }
      Json row;
      row["d"] = d;
      row["alpha_sq"] = x;
      std::optional<double> eps_phase, eps_bit;
      double sig_phase = 0, sig_bit = 0;
      for (Basis b : cfg.bases) {
        std::vector<analysis::Estimate> vals;
        for (size_t ci = 0; ci < cycles.size(); ++ci) {
          MemoryPointSpec spec;
          spec.model = model;
          spec.cycles = cycles[ci];
          spec.basis = b;
          spec.shots = cfg.shots;
          spec.seed = cfg.seed + 1000003ULL * ci + (b == Basis::Z ? 7919ULL : 0ULL) + 104729ULL * d +
                      uint64_t(std::llround(x * 1e6));
          spec.decoders = {cfg.decoder};
          spec.calibration_fraction = cfg.calibration_fraction;
          spec.weighting.p_floor = cfg.p_floor;
          spec.merge.p_odd_cap_edges = cfg.p_odd_cap_edges;
          spec.workers = cfg.workers;
          auto r = run_memory_point(spec);
          vals.push_back(r.observable(0));
          if (b == Basis::X && ci + 1 == cycles.size() && !r.detection.empty()) {
            detection.push_back({{"d", d}, {"alpha_sq", x}, {"cycles", cycles[ci]}, {"probabilities", r.detection}});
          }
        }
        const bool offset = cfg.fit_with_offset && b == Basis::X;
        auto curve = fit_decay_curve(cycles, vals, offset);
        Json p = fit_json(curve);
        p["d"] = d;
        p["alpha_sq"] = x;
        p["basis"] = sampler::basis_name(b);
        p["decoder"] = decoder_name(cfg.decoder);
        points.push_back(p);
        if (curve.fit) {
          if (b == Basis::X) {
            eps_phase = curve.eps;
            sig_phase = curve.eps_sigma;
          } else {
            eps_bit = curve.eps;
            sig_bit = curve.eps_sigma;
          }
        }
      }
      row["eps_phase"] = eps_phase ? Json(*eps_phase) : Json(nullptr);
      row["eps_phase_sigma"] = eps_phase ? Json(sig_phase) : Json(nullptr);
      row["eps_bit"] = eps_bit ? Json(*eps_bit) : Json(nullptr);
      row["eps_bit_sigma"] = eps_bit ? Json(sig_bit) : Json(nullptr);
      if (eps_phase && eps_bit) {
        row["eps_L"] = 0.5 * (*eps_phase + *eps_bit);
        row["eps_L_sigma"] = 0.5 * std::hypot(sig_phase, sig_bit);
      } else {
        row["eps_L"] = nullptr;
      }
      summary.push_back(row);
      if (eps_phase && *eps_phase > 0) phase_points.push_back({x, *eps_phase, sig_phase});
    }
    Json g;
    g["d"] = d;
    try {
      auto fit = analysis::fit_power_law(phase_points, cfg.gamma_min_alpha_sq);
      g["gamma"] = fit.gamma;
      g["gamma_sigma"] = fit.gamma_sigma;
      g["num_points"] = fit.num_points;
    } catch (const std::exception &e) {
      g["gamma"] = nullptr;
      g["error"] = e.what();
    }
    gammas.push_back(g);
  }
  Json out;
  out["summary"] = summary;
  out["gamma"] = gammas;
  out["points"] = points;
  out["detection"] = detection;
  return stamp_output(out, cfg);
}

}  // namespace catrep::pipeline
