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

#include "catrep/catrep.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "catrep/catq.hpp"
#include "catrep/decoder.hpp"
#include "catrep/errors.hpp"
#include "catrep/graph.hpp"
#include "catrep/noise.hpp"
#include "catrep/pipeline.hpp"
#include "catrep/sampler.hpp"

struct catrep_noise_model {
  catrep::noise::RepCodeNoiseModel model;
};
struct catrep_batch {
  catrep::sampler::ShotBatch batch;
};
struct catrep_graph {
  catrep::graph::MatchingGraph graph;
};

namespace {

using namespace catrep;

thread_local std::string g_last_error;

catrep_status fail(catrep_status s, const std::string &msg) {
  g_last_error = msg;
  return s;
}

template <class F>
catrep_status guarded(F &&fn) {
  try {
    fn();
    g_last_error.clear();
    return CATREP_OK;
  } catch (const ConfigError &e) {
    return fail(CATREP_ERR_CONFIG, e.what());
  } catch (const NumericError &e) {
    return fail(CATREP_ERR_NUMERIC, e.what());
  } catch (const IoError &e) {
    return fail(CATREP_ERR_IO, e.what());
  } catch (const DomainError &e) {
    return fail(CATREP_ERR_DOMAIN, e.what());
  } catch (const InputError &e) {
    return fail(CATREP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::invalid_argument &e) {
    return fail(CATREP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc &) {
    return fail(CATREP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(CATREP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CATREP_ERR_INTERNAL, "unknown error");
  }
}

char *dup_string(const std::string &s) {
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class T>
void require(const T *p, const char *what) {
  if (!p) throw InputError(std::string(what) + " must not be NULL");
}

pipeline::ExperimentConfig config_from_text(const char *text) {
  require(text, "config_text");
  return pipeline::ExperimentConfig::from_json(pipeline::parse_config_text(text));
}

}  // namespace

extern "C" {

const char *catrep_version(void) { return pipeline::kVersion; }

const char *catrep_last_error(void) { return g_last_error.c_str(); }

const char *catrep_status_name(catrep_status status) {
  switch (status) {
    case CATREP_OK:
      return "ok";
    case CATREP_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case CATREP_ERR_DOMAIN:
      return "domain error";
    case CATREP_ERR_CONFIG:
      return "config error";
    case CATREP_ERR_NUMERIC:
      return "numeric failure";
    case CATREP_ERR_IO:
      return "i/o error";
    case CATREP_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void catrep_string_free(char *s) { std::free(s); }

catrep_status catrep_noise_model_uniform(uint32_t d, double p_z, double p_meas, double p_erase, double t_cycle,
                                         double alpha_sq, catrep_noise_model **out) {
  return guarded([&] {
    require(out, "out");
    auto m = noise::RepCodeNoiseModel::uniform(d, p_z, p_meas, p_erase, t_cycle, alpha_sq);
    m.validate();
    *out = new catrep_noise_model{std::move(m)};
  });
}

catrep_status catrep_noise_model_from_json(const char *text, catrep_noise_model **out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    auto m = noise::RepCodeNoiseModel::from_canonical_text(text);
    m.validate();
    *out = new catrep_noise_model{std::move(m)};
  });
}

catrep_status catrep_noise_model_from_config(const char *config_text, uint32_t d, double alpha_sq,
                                             catrep_noise_model **out) {
  return guarded([&] {
    require(out, "out");
    auto cfg = config_from_text(config_text);
    auto m = cfg.model(d, alpha_sq);
    m.validate();
    *out = new catrep_noise_model{std::move(m)};
  });
}

catrep_status catrep_noise_model_to_json(const catrep_noise_model *model, char **out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = dup_string(model->model.canonical_text());
  });
}

void catrep_noise_model_free(catrep_noise_model *model) { delete model; }

catrep_status catrep_sample(const catrep_noise_model *model, uint32_t cycles, catrep_basis basis, uint64_t shots,
                            uint64_t seed, unsigned workers, catrep_batch **out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    if (basis != CATREP_BASIS_X && basis != CATREP_BASIS_Z) throw InputError("unknown basis");
    auto b = sampler::sample_batch(model->model, cycles, sampler::Basis(basis), shots, seed, 0, workers);
    b.metadata.creator = std::string("catrep ") + pipeline::kVersion;
    *out = new catrep_batch{std::move(b)};
  });
}

catrep_status catrep_batch_read(const char *path, catrep_batch **out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new catrep_batch{sampler::read_batch_file(path)};
  });
}

catrep_status catrep_batch_write(const catrep_batch *batch, const char *path) {
  return guarded([&] {
    require(batch, "batch");
    require(path, "path");
    sampler::write_batch_file(batch->batch, path);
  });
}

catrep_status catrep_batch_write_text(const catrep_batch *batch, const char *path) {
  return guarded([&] {
    require(batch, "batch");
    require(path, "path");
    std::ofstream f(path);
    if (!f) throw IoError(std::string("cannot open '") + path + "' for writing");
    sampler::write_batch_text(batch->batch, f);
    if (!f) throw IoError(std::string("write to '") + path + "' failed");
  });
}

catrep_status catrep_batch_info(const catrep_batch *batch, uint32_t *d, uint32_t *cycles, catrep_basis *basis,
                                uint64_t *shots) {
  return guarded([&] {
    require(batch, "batch");
    if (d) *d = batch->batch.d;
    if (cycles) *cycles = batch->batch.cycles;
    if (basis) *basis = catrep_basis(batch->batch.basis);
    if (shots) *shots = batch->batch.records.size();
  });
}

catrep_status catrep_batch_detection_probabilities(const catrep_batch *batch, double *out, size_t len) {
  return guarded([&] {
    require(batch, "batch");
    require(out, "out");
    auto p = sampler::detection_probabilities(batch->batch);
    if (len != p.size()) throw InputError("detection buffer must hold (cycles + 1) * (d - 1) values");
    std::copy(p.begin(), p.end(), out);
  });
}

void catrep_batch_free(catrep_batch *batch) { delete batch; }

catrep_status catrep_weigh(const catrep_batch *batch, double fraction, double p_floor, int conditioned,
                           catrep_graph **out) {
  return guarded([&] {
    require(batch, "batch");
    require(out, "out");
    graph::WeightingOptions opt;
    opt.p_floor = p_floor;
    auto g = conditioned ? graph::no_erasure_baseline(batch->batch, fraction, opt)
                         : graph::correlation_weights(batch->batch, fraction, opt);
    *out = new catrep_graph{std::move(g)};
  });
}

catrep_status catrep_graph_from_text(const char *text, catrep_graph **out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new catrep_graph{graph::MatchingGraph::from_text(text)};
  });
}

catrep_status catrep_graph_to_text(const catrep_graph *g, char **out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    *out = dup_string(g->graph.to_text());
  });
}

catrep_status catrep_graph_num_edges(const catrep_graph *g, size_t *out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    *out = g->graph.edges().size();
  });
}

void catrep_graph_free(catrep_graph *g) { delete g; }

catrep_status catrep_decode_batch(const catrep_batch *batch, const catrep_graph *g, catrep_decoder kind,
                                  double calibration_fraction, char **summary_json, char **matchings) {
  return guarded([&] {
    require(batch, "batch");
    require(summary_json, "summary_json");
    const auto &b = batch->batch;
    if (kind != CATREP_DECODER_NONE && kind != CATREP_DECODER_NAIVE && kind != CATREP_DECODER_MERGED) {
      throw InputError("unknown decoder");
    }
    if (!(calibration_fraction >= 0 && calibration_fraction < 1)) {
      throw InputError("calibration_fraction must lie in [0, 1)");
    }
    size_t first = 0;
    graph::MatchingGraph flat, conditioned;
    if (g) {
      if (g->graph.distance() != b.d || g->graph.cycles() != b.cycles || !g->graph.regular()) {
        throw InputError("graph does not match the batch layout");
      }
      flat = conditioned = g->graph;
    } else {
      first = size_t(std::floor(double(b.records.size()) * calibration_fraction));
      if (b.basis == sampler::Basis::X) {
        if (first == 0) throw InputError("no calibration shots; pass a graph or a larger fraction");
        graph::CorrelationAccumulator acc(b.d, b.cycles);
        for (size_t k = 0; k < first; ++k) acc.add(b.records[k]);
        flat = acc.correlation_graph();
        conditioned = acc.baseline_graph();
      }
    }
    uint64_t flips = 0, truth_agree = 0;
    std::ostringstream text;
    decoder::Decoder dec;
    std::optional<graph::ShotGraph> overlay;
    if (b.basis == sampler::Basis::X) overlay.emplace(conditioned);
    for (size_t k = first; k < b.records.size(); ++k) {
      const auto &r = b.records[k];
      decoder::Matching m;
      const graph::DecodingGraph *view = &flat;
      if (b.basis == sampler::Basis::X) {
        if (kind == CATREP_DECODER_NONE) {
          m = dec.decode(flat, graph::defects_of(graph::flattened_detectors(r)));
        } else if (kind == CATREP_DECODER_NAIVE) {
          overlay->reset();
          overlay->apply_naive(r);
          m = dec.decode(*overlay, graph::defects_of(graph::flattened_detectors(r)));
          view = &*overlay;
        } else {
          overlay->reset();
          auto rd = graph::reconstruct_detectors(r);
          overlay->apply_merge(rd);
          m = dec.decode(*overlay, overlay->defects(rd));
          view = &*overlay;
        }
      }
      const uint8_t flip = decoder::score(r, m);
      flips += flip;
      truth_agree += (flip == r.true_flip);
      if (matchings) {
        text << "SHOT " << k << " flip " << int(flip) << "\n";
        if (b.basis == sampler::Basis::X) text << decoder::matching_to_text(*view, m);
      }
    }
    const uint64_t scored = b.records.size() - first;
    pipeline::Json j;
    j["version"] = pipeline::kVersion;
    j["decoder"] = pipeline::decoder_name(pipeline::DecoderKind(kind));
    j["basis"] = sampler::basis_name(b.basis);
    j["d"] = b.d;
    j["cycles"] = b.cycles;
    j["seed"] = b.metadata.experiment_seed;
    j["model_hash"] = pipeline::hash_hex(b.metadata.model_hash);
    j["calibration_shots"] = first;
    j["scored_shots"] = scored;
    j["logical_flips"] = flips;
    j["agrees_with_truth"] = truth_agree;
    if (scored > 0) {
      auto post = analysis::beta_posterior(scored, double(flips) / double(scored));
      auto obs = analysis::observable_estimate(post);
      j["flip_probability"] = post.mean();
      j["flip_probability_sigma"] = post.stddev();
      j["observable"] = obs.value;
      j["observable_sigma"] = obs.sigma;
    }
    std::string summary = j.dump(2);
    char *s = dup_string(summary);
    if (matchings) {
      try {
        *matchings = dup_string(text.str());
      } catch (...) {
        std::free(s);
        throw;
      }
    }
    *summary_json = s;
  });
}

catrep_status catrep_phase_flip_rates(double alpha_sq, double kappa1, double *plus_to_minus, double *minus_to_plus) {
  return guarded([&] {
    require(plus_to_minus, "plus_to_minus");
    require(minus_to_plus, "minus_to_plus");
    catq::CatParams p;
    p.alpha_sq = alpha_sq;
    p.kappa1_eff = kappa1;
    p.t_cycle = 1.0;
    auto r = catq::phase_flip_rates(p);
    *plus_to_minus = r.gamma_plus_to_minus;
    *minus_to_plus = r.gamma_minus_to_plus;
  });
}

catrep_status catrep_p_odd(const double *ps, size_t n, double *out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) require(ps, "ps");
    for (size_t i = 0; i < n; ++i) {
      if (!(ps[i] >= 0 && ps[i] <= 1)) throw DomainError("probabilities must lie in [0, 1]");
    }
    *out = graph::p_odd(std::span<const double>(ps, n));
  });
}

catrep_status catrep_project_overhead(uint32_t d, double t_cycle, double t1, double alpha_sq, double t_z,
                                      double *eps_phase, double *eps_bit, double *eps_total) {
  return guarded([&] {
    auto r = noise::project_overhead(d, t_cycle, t1, alpha_sq, t_z);
    if (eps_phase) *eps_phase = r.eps_phase;
    if (eps_bit) *eps_bit = r.eps_bit;
    if (eps_total) *eps_total = r.eps_total;
  });
}

catrep_status catrep_fit_decay(const char *points_json, int with_offset, char **out) {
  return guarded([&] {
    require(points_json, "points_json");
    require(out, "out");
    pipeline::Json in;
    try {
      in = pipeline::Json::parse(points_json);
    } catch (const std::exception &e) {
      throw InputError(std::string("points are not valid JSON: ") + e.what());
    }
    if (!in.is_array()) throw InputError("points must be a JSON array");
    std::vector<analysis::DecayPoint> pts;
    for (const auto &p : in) {
      if (!p.is_object() || !p.contains("t") || !p.contains("value") || !p.contains("sigma")) {
        throw InputError("each point needs t, value and sigma");
      }
      pts.push_back({p["t"].get<double>(), p["value"].get<double>(), p["sigma"].get<double>()});
    }
    auto f = analysis::fit_exponential(pts, with_offset != 0);
    pipeline::Json j{{"amplitude", f.amplitude},
                     {"amplitude_sigma", f.amplitude_sigma()},
                     {"decay_time", f.decay_time},
                     {"decay_time_sigma", f.decay_time_sigma()},
                     {"offset", f.offset},
                     {"offset_sigma", f.offset_sigma()},
                     {"with_offset", f.with_offset},
                     {"chi2", f.chi2},
                     {"iterations", f.iterations},
                     {"eps_per_unit", 1.0 / (2.0 * f.decay_time)},
                     {"residuals", f.residuals}};
    *out = dup_string(j.dump(2));
  });
}

catrep_status catrep_config_check(const char *config_text, char **normalized) {
  return guarded([&] {
    auto cfg = config_from_text(config_text);
    if (normalized) {
      auto j = cfg.to_json();
      j["config_hash"] = pipeline::hash_hex(cfg.hash());
      *normalized = dup_string(j.dump(2));
    }
  });
}

catrep_status catrep_run_memory_experiment(const char *config_text, char **out) {
  return guarded([&] {
    require(out, "out");
    auto cfg = config_from_text(config_text);
    *out = dup_string(pipeline::run_memory_experiment(cfg).dump(2));
  });
}

catrep_status catrep_run_budget(const char *config_text, char **out) {
  return guarded([&] {
    require(out, "out");
    auto cfg = config_from_text(config_text);
    *out = dup_string(pipeline::run_budget(cfg).dump(2));
  });
}

catrep_status catrep_run_lindblad_sweep(const char *config_text, char **out) {
  return guarded([&] {
    require(out, "out");
    auto cfg = config_from_text(config_text);
    *out = dup_string(pipeline::run_lindblad_sweep(cfg).dump(2));
  });
}

}  // extern "C"
