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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "catrep/catq.hpp"
#include "catrep/errors.hpp"
#include "catrep/lindblad.hpp"
#include "catrep/pipeline.hpp"

namespace catrep::pipeline {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_keys(const Json &j, const std::string &where, std::initializer_list<const char *> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

std::string path(const std::string &where, const std::string &key) { return where.empty() ? key : where + "." + key; }

double get_number(const Json &j, const std::string &where, const std::string &key) {
  const Json &v = j.at(key);
  if (!v.is_number()) throw ConfigError(path(where, key) + ": expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path(where, key) + ": must be finite");
  return x;
}

double number_or(const Json &j, const std::string &where, const std::string &key, double fallback) {
  return j.contains(key) ? get_number(j, where, key) : fallback;
}

uint64_t get_uint(const Json &j, const std::string &where, const std::string &key) {
  const Json &v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<int64_t>() < 0)) {
    throw ConfigError(path(where, key) + ": expected a non-negative integer");
  }
  return v.get<uint64_t>();
}

uint64_t uint_or(const Json &j, const std::string &where, const std::string &key, uint64_t fallback) {
  return j.contains(key) ? get_uint(j, where, key) : fallback;
}

std::vector<double> number_list(const Json &j, const std::string &where) {
  std::vector<double> out;
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(where + ": expected a number or a list of numbers");
  for (const auto &v : j) {
    if (!v.is_number()) throw ConfigError(where + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::map<double, std::vector<double>> alpha_table(const Json &j, const std::string &where) {
  std::map<double, std::vector<double>> out;
  if (j.is_number() || j.is_array()) {
    out[0.0] = number_list(j, where);
    return out;
  }
  if (!j.is_object()) throw ConfigError(where + ": expected a number, list or table keyed by alpha_sq");
  for (auto it = j.begin(); it != j.end(); ++it) {
    double key;
    try {
      size_t used = 0;
      key = std::stod(it.key(), &used);
      if (used != it.key().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
      throw ConfigError(where + ": table key '" + it.key() + "' is not a number");
    }
    out[key] = number_list(it.value(), path(where, it.key()));
  }
  return out;
}

std::vector<double> lookup(const std::map<double, std::vector<double>> &table, double x, uint32_t count,
                           const std::string &where) {
  if (table.empty()) return std::vector<double>(count, 0.0);
  auto best = table.begin();
  for (auto it = table.begin(); it != table.end(); ++it) {
    if (std::abs(it->first - x) < std::abs(best->first - x)) best = it;
  }
  const auto &v = best->second;
  if (v.size() == 1) return std::vector<double>(count, v[0]);
  if (v.size() < count) {
    throw ConfigError(where + ": table for alpha_sq " + std::to_string(best->first) + " has " +
                      std::to_string(v.size()) + " entries, need " + std::to_string(count));
  }
  return std::vector<double>(v.begin(), v.begin() + count);
}

Json table_json(const std::map<double, std::vector<double>> &t) {
  Json j = Json::object();
  for (const auto &[k, v] : t) {
    std::ostringstream os;
    os << k;
    j[os.str()] = v;
  }
  return j;
}

uint64_t fnv1a(const std::string &s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Json parse_config_text(const std::string &text) {
  try {
    return Json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json(const Json &j) {
  check_keys(j, "config",
             {"distances", "alpha_sq", "cycles", "max_cycles", "shots", "seed", "workers", "decoder", "bases",
              "calibration_fraction", "p_floor", "p_odd_cap_edges", "fit_with_offset", "gamma_min_alpha_sq", "noise",
              "budget", "lindblad", "overhead", "description"});
  ExperimentConfig c;
  c.raw = j;
  try {
    if (j.contains("distances")) {
      c.distances.clear();
      for (double v : number_list(j["distances"], "distances")) {
        if (v != std::floor(v) || v < 2 || v > 64) throw ConfigError("distances: entries must be integers in [2, 64]");
        c.distances.push_back(uint32_t(v));
      }
    }
    if (j.contains("alpha_sq")) c.alpha_sq = number_list(j["alpha_sq"], "alpha_sq");
    for (double x : c.alpha_sq) {
      if (!(x > 0)) throw ConfigError("alpha_sq: entries must be positive");
    }
    if (j.contains("cycles")) {
      c.cycles.clear();
      for (double v : number_list(j["cycles"], "cycles")) {
        if (v != std::floor(v) || v < 1) throw ConfigError("cycles: entries must be positive integers");
        c.cycles.push_back(uint32_t(v));
      }
    }
    c.max_cycles = uint32_t(uint_or(j, "", "max_cycles", c.max_cycles));
    c.shots = uint_or(j, "", "shots", c.shots);
    c.seed = uint_or(j, "", "seed", c.seed);
    c.workers = unsigned(uint_or(j, "", "workers", c.workers));
    if (j.contains("decoder")) {
      if (!j["decoder"].is_string()) throw ConfigError("decoder: expected a string");
      c.decoder = parse_decoder(j["decoder"].get<std::string>());
    }
    if (j.contains("bases")) {
      c.bases.clear();
      if (!j["bases"].is_array()) throw ConfigError("bases: expected a list");
      for (const auto &b : j["bases"]) {
        if (!b.is_string()) throw ConfigError("bases: expected strings");
        try {
          c.bases.push_back(sampler::parse_basis(b.get<std::string>()));
        } catch (const std::exception &) {
          throw ConfigError("bases: unknown basis '" + b.get<std::string>() + "'");
        }
      }
    }
    c.calibration_fraction = number_or(j, "", "calibration_fraction", c.calibration_fraction);
    if (!(c.calibration_fraction > 0 && c.calibration_fraction < 1)) {
      throw ConfigError("calibration_fraction: must lie in (0, 1)");
    }
    c.p_floor = number_or(j, "", "p_floor", c.p_floor);
    if (!(c.p_floor > 0 && c.p_floor < 0.5)) throw ConfigError("p_floor: must lie in (0, 0.5)");
    c.p_odd_cap_edges = uint32_t(uint_or(j, "", "p_odd_cap_edges", c.p_odd_cap_edges));
    if (j.contains("fit_with_offset")) {
      if (!j["fit_with_offset"].is_boolean()) throw ConfigError("fit_with_offset: expected true or false");
      c.fit_with_offset = j["fit_with_offset"].get<bool>();
    }
    c.gamma_min_alpha_sq = number_or(j, "", "gamma_min_alpha_sq", c.gamma_min_alpha_sq);
    if (c.shots < 8) throw ConfigError("shots: at least 8 shots are required");
    if (c.workers == 0) throw ConfigError("workers: must be at least 1");

    if (j.contains("noise")) {
      const Json &n = j["noise"];
      check_keys(n, "noise",
                 {"t1_eff", "t_cycle", "mid_cycle_fraction", "p_z", "p_meas", "p_erase", "final_meas_error_x",
                  "final_meas_error_z", "bitflip"});
      auto &nc = c.noise;
      nc.t1_eff = number_or(n, "noise", "t1_eff", nc.t1_eff);
      nc.t_cycle = number_or(n, "noise", "t_cycle", nc.t_cycle);
      nc.mid_cycle_fraction = number_or(n, "noise", "mid_cycle_fraction", nc.mid_cycle_fraction);
      if (n.contains("p_z")) nc.p_z = get_number(n, "noise", "p_z");
      if (n.contains("p_meas")) nc.p_meas = alpha_table(n["p_meas"], "noise.p_meas");
      if (n.contains("p_erase")) nc.p_erase = alpha_table(n["p_erase"], "noise.p_erase");
      nc.final_meas_error_x = number_or(n, "noise", "final_meas_error_x", nc.final_meas_error_x);
      if (n.contains("final_meas_error_z")) nc.final_meas_error_z = get_number(n, "noise", "final_meas_error_z");
      if (n.contains("bitflip")) {
        const Json &b = n["bitflip"];
        check_keys(b, "noise.bitflip", {"idle_a", "idle_b", "p_cx"});
        nc.bitflip.idle_a = number_or(b, "noise.bitflip", "idle_a", nc.bitflip.idle_a);
        nc.bitflip.idle_b = number_or(b, "noise.bitflip", "idle_b", nc.bitflip.idle_b);
        nc.bitflip.p_cx = number_or(b, "noise.bitflip", "p_cx", nc.bitflip.p_cx);
      }
      if (!(nc.t1_eff > 0)) throw ConfigError("noise.t1_eff: must be positive");
      if (!(nc.t_cycle > 0)) throw ConfigError("noise.t_cycle: must be positive");
      if (!(nc.mid_cycle_fraction >= 0 && nc.mid_cycle_fraction <= 1)) {
        throw ConfigError("noise.mid_cycle_fraction: must lie in [0, 1]");
      }
    }
    for (uint32_t d : c.distances) {
      for (double x : c.alpha_sq) c.model(d, x).validate();
    }
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string &file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(parse_config_text(ss.str()));
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["distances"] = distances;
  j["alpha_sq"] = alpha_sq;
  j["cycles"] = cycles;
  j["max_cycles"] = max_cycles;
  j["shots"] = shots;
  j["seed"] = seed;
  j["workers"] = workers;
  j["decoder"] = decoder_name(decoder);
  Json b = Json::array();
  for (auto x : bases) b.push_back(sampler::basis_name(x));
  j["bases"] = b;
  j["calibration_fraction"] = calibration_fraction;
  j["p_floor"] = p_floor;
  j["p_odd_cap_edges"] = p_odd_cap_edges;
  j["fit_with_offset"] = fit_with_offset;
  j["gamma_min_alpha_sq"] = gamma_min_alpha_sq;
  Json n;
  n["t1_eff"] = noise.t1_eff;
  n["t_cycle"] = noise.t_cycle;
  n["mid_cycle_fraction"] = noise.mid_cycle_fraction;
  if (noise.p_z) n["p_z"] = *noise.p_z;
  n["p_meas"] = table_json(noise.p_meas);
  n["p_erase"] = table_json(noise.p_erase);
  n["final_meas_error_x"] = noise.final_meas_error_x;
  if (noise.final_meas_error_z) n["final_meas_error_z"] = *noise.final_meas_error_z;
  n["bitflip"] = {{"idle_a", noise.bitflip.idle_a}, {"idle_b", noise.bitflip.idle_b}, {"p_cx", noise.bitflip.p_cx}};
  j["noise"] = n;
  for (const char *k : {"budget", "lindblad", "overhead"}) {
    if (raw.contains(k)) j[k] = raw[k];
  }
  return j;
}

uint64_t ExperimentConfig::hash() const { return fnv1a(to_json().dump()); }

noise::BitFlipPhenomModel ExperimentConfig::bitflip_model(uint32_t d) const {
  return noise::uniform_bitflip_model(d, noise.bitflip.idle_a, noise.bitflip.idle_b, noise.bitflip.p_cx);
}

noise::RepCodeNoiseModel ExperimentConfig::model(uint32_t d, double x) const {
  const double pz = noise.p_z ? *noise.p_z : noise::pz_per_cycle(1.0 / noise.t1_eff, x, noise.t_cycle);
  auto m = noise::RepCodeNoiseModel::uniform(d, pz, 0.0, 0.0, noise.t_cycle, x);
  m.mid_cycle_fraction = noise.mid_cycle_fraction;
  m.p_meas = lookup(noise.p_meas, x, d - 1, "noise.p_meas");
  m.p_erase = lookup(noise.p_erase, x, d - 1, "noise.p_erase");
  m.final_meas_error_x = noise.final_meas_error_x;
  m.final_meas_error_z = noise.final_meas_error_z ? *noise.final_meas_error_z : catq::z_readout_error(x, 0.0, 0.0);
  m.p_bitflip = noise::per_qubit_bitflip(bitflip_model(d), x);
  return m;
}

// ---------------------------------------------------------------------------
// Error budget.

namespace {

struct BudgetSettings {
  uint32_t d = 5;
  std::vector<double> alpha_sq{1.5};
  uint32_t n1 = 10;
  uint32_t n2 = 30;
  uint64_t shots = 20000;
  analysis::BudgetOptions options;
};

BudgetSettings budget_settings(const ExperimentConfig &cfg) {
  BudgetSettings s;
  if (!cfg.raw.contains("budget")) return s;
  const Json &b = cfg.raw["budget"];
  check_keys(b, "budget", {"d", "alpha_sq", "cycles", "shots", "step_fraction", "noise_factor"});
  s.d = uint32_t(uint_or(b, "budget", "d", s.d));
  if (s.d < 2 || s.d > 64) throw ConfigError("budget.d: must lie in [2, 64]");
  if (b.contains("alpha_sq")) s.alpha_sq = number_list(b["alpha_sq"], "budget.alpha_sq");
  if (b.contains("cycles")) {
    auto c = number_list(b["cycles"], "budget.cycles");
    if (c.size() != 2 || c[0] < 1 || c[1] <= c[0] || c[0] != std::floor(c[0]) || c[1] != std::floor(c[1])) {
      throw ConfigError("budget.cycles: expected two increasing positive integers");
    }
    s.n1 = uint32_t(c[0]);
    s.n2 = uint32_t(c[1]);
  }
  s.shots = uint_or(b, "budget", "shots", s.shots);
  if (s.shots < 100) throw ConfigError("budget.shots: at least 100 shots are required");
  s.options.step_fraction = number_or(b, "budget", "step_fraction", s.options.step_fraction);
  s.options.noise_factor = number_or(b, "budget", "noise_factor", s.options.noise_factor);
  return s;
}

}  // namespace

Json run_budget(const ExperimentConfig &cfg) {
  const BudgetSettings s = budget_settings(cfg);
  const uint32_t d = s.d;
  Json results = Json::array();
  for (double x : s.alpha_sq) {
    if (!(x > 0)) throw ConfigError("budget.alpha_sq: entries must be positive");
    const auto base = cfg.model(d, x);
    std::vector<double> nominal;
    std::vector<std::string> labels, classes;
    for (uint32_t i = 0; i < d; ++i) {
      nominal.push_back(base.p_z[i]);
      labels.push_back("phase_flip_cat" + std::to_string(i));
      classes.push_back("cat phase flip");
    }
    for (uint32_t j = 0; j + 1 < d; ++j) {
      nominal.push_back(base.p_meas[j] + 0.5 * base.p_erase[j]);
      labels.push_back("measurement_anc" + std::to_string(j));
      classes.push_back("syndrome measurement");
    }
    for (uint32_t i = 0; i < d; ++i) {
      nominal.push_back(noise::idle_bitflip(cfg.noise.bitflip.idle_a, cfg.noise.bitflip.idle_b, x));
      labels.push_back("idle_bitflip_cat" + std::to_string(i));
      classes.push_back("cat idle bit flip");
    }
    for (uint32_t k = 0; k < 2 * (d - 1); ++k) {
      nominal.push_back(cfg.noise.bitflip.p_cx);
      labels.push_back("cx_bitflip_gate" + std::to_string(k));
      classes.push_back("CX bit flip");
    }

    std::map<std::vector<double>, analysis::EpsEvaluation> cache;
    auto phase_eps = [&](const std::vector<double> &v) -> analysis::EpsEvaluation {
      std::vector<double> key(v.begin(), v.begin() + (2 * d - 1));
      if (auto it = cache.find(key); it != cache.end()) return it->second;
      auto m = base;
      for (uint32_t i = 0; i < d; ++i) m.p_z[i] = v[i];
      for (uint32_t j = 0; j + 1 < d; ++j) {
        m.p_meas[j] = v[d + j];
        m.p_erase[j] = 0.0;
      }
      analysis::Estimate e[2];
      uint32_t n[2] = {s.n1, s.n2};
      for (int k = 0; k < 2; ++k) {
        MemoryPointSpec spec;
        spec.model = m;
        spec.cycles = n[k];
        spec.basis = sampler::Basis::X;
        spec.shots = s.shots;
        spec.seed = cfg.seed;
        spec.decoders = {DecoderKind::kMerged};
        spec.weights = WeightSource::kModel;
        spec.workers = cfg.workers;
        e[k] = run_memory_point(spec).observable(0);
      }
      if (!(e[0].value > 0 && e[1].value > 0)) {
        throw NumericError("budget: logical correlator decayed to zero; reduce budget.cycles");
      }
      const double dn = double(s.n2 - s.n1);
      const double r = std::pow(e[1].value / e[0].value, 1.0 / dn);
      const double rel = std::hypot(e[0].sigma / e[0].value, e[1].sigma / e[1].value);
      analysis::EpsEvaluation out{0.5 * (1.0 - r), 0.5 * r * rel / dn};
      cache[key] = out;
      return out;
    };
    auto eps_fn = [&](const std::vector<double> &v) -> analysis::EpsEvaluation {
      auto ph = phase_eps(v);
      double bit = 0.0;
      for (size_t k = 2 * d - 1; k < v.size(); ++k) bit += v[k];
      return {0.5 * (ph.value + bit), 0.5 * ph.std_error};
    };
    auto budget = analysis::error_budget(eps_fn, nominal, labels, s.options);
    const auto full_phase = phase_eps(nominal);

    Json items = Json::array();
    std::map<std::string, double> by_class;
    for (size_t k = 0; k < budget.items.size(); ++k) {
      items.push_back({{"label", budget.items[k].label},
                       {"class", classes[k]},
                       {"nominal", nominal[k]},
                       {"contribution", budget.items[k].contribution}});
      by_class[classes[k]] += budget.items[k].contribution;
    }
    Json cls = Json::object();
    for (const char *k : {"cat idle bit flip", "CX bit flip", "cat phase flip", "syndrome measurement"}) {
      cls[k] = by_class[k];
    }
    results.push_back({{"d", d},
                       {"alpha_sq", x},
                       {"eps_L", budget.nominal},
                       {"eps_phase", full_phase.value},
                       {"eps_phase_sigma", full_phase.std_error},
                       {"sum", budget.sum()},
                       {"sum_ratio", budget.sum() / budget.nominal},
                       {"classes", cls},
                       {"items", items}});
  }
  Json out;
  out["budget"] = results;
  return stamp_output(out, cfg);
}

// ---------------------------------------------------------------------------
// Master-equation sweeps.

Json run_lindblad_sweep(const ExperimentConfig &cfg) {
  if (!cfg.raw.contains("lindblad")) throw ConfigError("lindblad: section missing");
  const Json &l = cfg.raw["lindblad"];
  check_keys(l, "lindblad",
             {"sweep", "values", "alpha_sq", "dim", "gate_time", "ancilla_decay_fe", "ancilla_decay_eg",
              "prep_error_e", "kappa2_hz", "dissipation_time", "g2_hz", "kappa_b_hz", "beta", "t_relax"});
  if (!l.contains("sweep") || !l["sweep"].is_string()) throw ConfigError("lindblad.sweep: expected a string");
  const std::string kind = l["sweep"].get<std::string>();
  if (!l.contains("values")) throw ConfigError("lindblad.values: missing");
  const auto values = number_list(l["values"], "lindblad.values");
  const double x = number_or(l, "lindblad", "alpha_sq", 4.0);
  if (!(x > 0)) throw ConfigError("lindblad.alpha_sq: must be positive");
  const uint32_t dim = uint32_t(uint_or(l, "lindblad", "dim", lindblad::FockSpace::recommended_dim(x)));
  if (dim < 2) throw ConfigError("lindblad.dim: must be at least 2");
  lindblad::FockSpace space{dim};

  Json rows = Json::array();
  if (kind == "chi_ratio") {
    lindblad::CxModel m;
    m.gate_time = number_or(l, "lindblad", "gate_time", 800e-9);
    m.ancilla_decay_fe = number_or(l, "lindblad", "ancilla_decay_fe", 2.0 * 0.05 / 1.25e-6);
    m.ancilla_decay_eg = number_or(l, "lindblad", "ancilla_decay_eg", m.ancilla_decay_fe);
    m.prep_error_e = number_or(l, "lindblad", "prep_error_e", 0.01);
    m.kappa2 = kTwoPi * number_or(l, "lindblad", "kappa2_hz", 50e3);
    m.dissipation_time = number_or(l, "lindblad", "dissipation_time", 10.0 / m.kappa2);
    m.alpha_sq = x;
    if (!(m.gate_time > 0)) throw ConfigError("lindblad.gate_time: must be positive");
    m.chi_gf = kTwoPi / m.gate_time;
    for (double ratio : values) {
      m.chi_ge = ratio * m.chi_gf;
      Json row{{"chi_ratio", ratio}};
      try {
        row["bitflip"] = lindblad::cx2_bitflip_probability(m, space);
      } catch (const std::exception &e) {
        row["bitflip"] = nullptr;
        row["error"] = e.what();
      }
      rows.push_back(row);
    }
  } else if (kind == "buffer_detuning") {
    const double g2 = kTwoPi * number_or(l, "lindblad", "g2_hz", 350e3);
    const double kb = kTwoPi * number_or(l, "lindblad", "kappa_b_hz", 10e6);
    lindblad::cplx beta(0.0, std::sqrt(x));
    if (l.contains("beta")) {
      auto b = number_list(l["beta"], "lindblad.beta");
      if (b.size() != 2) throw ConfigError("lindblad.beta: expected [re, im]");
      beta = {b[0], b[1]};
    }
    const lindblad::cplx alpha = std::sqrt(x);
    for (double db_hz : values) {
      Json row{{"delta_b_hz", db_hz}};
      try {
        auto g = lindblad::detuned_stabilization_generator(g2, kTwoPi * db_hz, kb, alpha, space);
        const double t = number_or(l, "lindblad", "t_relax", 10.0 / g.stabilization_rate);
        auto p = lindblad::dissipative_map(beta, g, t);
        row["p_plus"] = p.p_plus;
        row["p_minus"] = p.p_minus;
        if (!g.warnings.empty()) row["warnings"] = g.warnings;
      } catch (const std::exception &e) {
        row["p_plus"] = nullptr;
        row["p_minus"] = nullptr;
        row["error"] = e.what();
      }
      rows.push_back(row);
    }
  } else {
    throw ConfigError("lindblad.sweep: expected chi_ratio or buffer_detuning");
  }
  Json out;
  out["sweep"] = kind;
  out["alpha_sq"] = x;
  out["dim"] = dim;
  out["rows"] = rows;
  return stamp_output(out, cfg);
}

}  // namespace catrep::pipeline
