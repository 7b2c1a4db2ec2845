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

#include "catrep/noise.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "catrep/catq.hpp"
#include "catrep/errors.hpp"
#include "json.hpp"

namespace catrep::noise {

namespace {

void check_prob(double p, double hi, const std::string &name) {
  if (!(p >= 0.0 && p <= hi)) {
    throw DomainError(name + " must lie in [0, " + std::to_string(hi) + "], got " + std::to_string(p));
  }
}

uint64_t fnv1a(const std::string &s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

RepCodeNoiseModel RepCodeNoiseModel::uniform(uint32_t d, double p_z, double p_meas, double p_erase,
                                             double t_cycle, double alpha_sq) {
  RepCodeNoiseModel m;
  m.d = d;
  m.p_z.assign(d, p_z);
  m.p_meas.assign(d >= 1 ? d - 1 : 0, p_meas);
  m.p_erase.assign(d >= 1 ? d - 1 : 0, p_erase);
  m.t_cycle = t_cycle;
  m.p_bitflip.assign(d, 0.0);
  if (alpha_sq > 0.0) {
    m.alpha_sq = alpha_sq;
    m.final_meas_error_z = catq::z_readout_error(alpha_sq, 0.0, 0.0);
  }
  return m;
}

void RepCodeNoiseModel::validate() const {
  if (d < 2 || d > 64) throw DomainError("distance must lie in [2, 64], got " + std::to_string(d));
  if (p_z.size() != d) throw DomainError("p_z must have d entries");
  if (p_meas.size() != d - 1) throw DomainError("p_meas must have d-1 entries");
  if (p_erase.size() != d - 1) throw DomainError("p_erase must have d-1 entries");
  if (!p_bitflip.empty() && p_bitflip.size() != d) throw DomainError("p_bitflip must have d entries");
  for (double p : p_z) check_prob(p, 0.5, "p_z");
  for (double p : p_bitflip) check_prob(p, 0.5, "p_bitflip");
  for (uint32_t j = 0; j + 1 < d; ++j) {
    check_prob(p_meas[j], 1.0, "p_meas");
    check_prob(p_erase[j], 1.0, "p_erase");
    if (p_meas[j] + p_erase[j] > 1.0 + 1e-12) throw DomainError("p_meas + p_erase must not exceed 1");
  }
  check_prob(mid_cycle_fraction, 1.0, "mid_cycle_fraction");
  check_prob(final_meas_error_x, 1.0, "final_meas_error_x");
  check_prob(final_meas_error_z, 1.0, "final_meas_error_z");
  if (!(t_cycle > 0.0)) throw DomainError("t_cycle must be > 0");
  if (!(alpha_sq >= 0.0)) throw DomainError("alpha_sq must be >= 0");
}

std::string RepCodeNoiseModel::canonical_text() const {
  nlohmann::ordered_json j;
  j["d"] = d;
  j["p_z"] = p_z;
  j["mid_cycle_fraction"] = mid_cycle_fraction;
  j["p_meas"] = p_meas;
  j["p_erase"] = p_erase;
  j["t_cycle"] = t_cycle;
  j["final_meas_error_x"] = final_meas_error_x;
  j["final_meas_error_z"] = final_meas_error_z;
  j["p_bitflip"] = p_bitflip;
  if (std::isfinite(alpha_sq)) {
    j["alpha_sq"] = alpha_sq;
  } else {
    j["alpha_sq"] = nullptr;
  }
  return j.dump();
}

RepCodeNoiseModel RepCodeNoiseModel::from_canonical_text(const std::string &text) {
  RepCodeNoiseModel m;
  try {
    auto j = nlohmann::json::parse(text);
    m.d = j.at("d").get<uint32_t>();
    m.p_z = j.at("p_z").get<std::vector<double>>();
    m.mid_cycle_fraction = j.at("mid_cycle_fraction").get<double>();
    m.p_meas = j.at("p_meas").get<std::vector<double>>();
    m.p_erase = j.at("p_erase").get<std::vector<double>>();
    m.t_cycle = j.at("t_cycle").get<double>();
    m.final_meas_error_x = j.at("final_meas_error_x").get<double>();
    m.final_meas_error_z = j.at("final_meas_error_z").get<double>();
    m.p_bitflip = j.at("p_bitflip").get<std::vector<double>>();
    const auto &a = j.at("alpha_sq");
    m.alpha_sq = a.is_null() ? std::numeric_limits<double>::infinity() : a.get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw InputError(std::string("malformed noise model text: ") + e.what());
  }
  m.validate();
  return m;
}

uint64_t RepCodeNoiseModel::hash() const { return fnv1a(canonical_text()); }

void BitFlipPhenomModel::validate() const {
  if (idle_a.size() != idle_b.size()) throw DomainError("idle_a and idle_b sizes differ");
  if (p_cx_g.size() != p_cx_f.size()) throw DomainError("p_cx_g and p_cx_f sizes differ");
  for (double v : idle_a) if (!(v >= 0.0)) throw DomainError("idle A must be >= 0");
  for (double v : idle_b) if (!(v >= 0.0)) throw DomainError("idle B must be >= 0");
  for (double v : p_cx_g) if (!(v >= 0.0)) throw DomainError("p_cx must be >= 0");
  for (double v : p_cx_f) if (!(v >= 0.0)) throw DomainError("p_cx must be >= 0");
}

double pz_per_cycle(double kappa1_eff, double alpha_sq, double t_cycle) {
  if (kappa1_eff < 0.0 || alpha_sq < 0.0 || t_cycle < 0.0) {
    throw DomainError("pz_per_cycle: inputs must be nonnegative");
  }
  double p = kappa1_eff * alpha_sq * t_cycle;
  if (p > 0.5) throw DomainError("pz_per_cycle: probability " + std::to_string(p) + " exceeds 0.5");
  return p;
}

double idle_bitflip(double a, double b, double alpha_sq) { return a * std::exp(-b * alpha_sq); }

IdleFit fit_idle_bitflip(const std::vector<std::pair<double, double>> &points) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, p] : points) {
    if (!(p > 0.0)) continue;
    double y = std::log(p);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (n < 2 || !(std::abs(den) > 0.0)) throw NumericError("fit_idle_bitflip: need two distinct points");
  double slope = (n * sxy - sx * sy) / den;
  double intercept = (sy - slope * sx) / n;
  return {std::exp(intercept), -slope};
}

CxFit fit_cx_phenom(const std::vector<std::pair<double, double>> &cx2_probs, IdleFit idle,
                    double fit_range_min) {
  std::vector<double> r;
  for (auto [x, p] : cx2_probs) {
    if (x >= fit_range_min) r.push_back(0.5 * (p - idle_bitflip(idle.a, idle.b, x)));
  }
  if (r.size() < 2) {
    throw NumericError("fit_cx_phenom: fewer than 2 points with alpha_sq >= " +
                       std::to_string(fit_range_min));
  }
  double mean = std::accumulate(r.begin(), r.end(), 0.0) / double(r.size());
  double ss = 0.0;
  for (double v : r) ss += (v - mean) * (v - mean);
  double se = std::sqrt(ss / double(r.size() - 1) / double(r.size()));
  return {mean, se, int(r.size())};
}

double logical_bitflip_per_cycle(const BitFlipPhenomModel &m, double alpha_sq) {
  m.validate();
  double total = 0.0;
  for (size_t i = 0; i < m.idle_a.size(); ++i) total += idle_bitflip(m.idle_a[i], m.idle_b[i], alpha_sq);
  for (size_t j = 0; j < m.p_cx_g.size(); ++j) total += 0.5 * (m.p_cx_g[j] + m.p_cx_f[j]);
  return total;
}

std::vector<double> per_qubit_bitflip(const BitFlipPhenomModel &m, double alpha_sq) {
  m.validate();
  size_t d = m.idle_a.size();
  if (m.p_cx_g.size() != 2 * (d > 0 ? d - 1 : 0)) {
    throw DomainError("per_qubit_bitflip: expected 2(d-1) CX gates");
  }
  std::vector<double> out(d);
  for (size_t i = 0; i < d; ++i) out[i] = idle_bitflip(m.idle_a[i], m.idle_b[i], alpha_sq);
  for (size_t j = 0; j < m.p_cx_g.size(); ++j) {
    out[j / 2 + (j % 2)] += 0.5 * (m.p_cx_g[j] + m.p_cx_f[j]);
  }
  return out;
}

BitFlipPhenomModel uniform_bitflip_model(uint32_t d, double a, double b, double p_cx) {
  BitFlipPhenomModel m;
  m.idle_a.assign(d, a);
  m.idle_b.assign(d, b);
  m.p_cx_g.assign(2 * (d - 1), p_cx);
  m.p_cx_f.assign(2 * (d - 1), p_cx);
  return m;
}

OverheadProjection project_overhead(uint32_t d, double t_cycle, double t1, double alpha_sq,
                                    double t_z, double a_fit, double p_th) {
  if (!(t1 > 0.0)) throw DomainError("project_overhead: T1 must be > 0");
  if (!(t_z > 0.0)) throw DomainError("project_overhead: T_Z must be > 0");
  if (!(p_th > 0.0)) throw DomainError("project_overhead: p_th must be > 0");
  double p_z = alpha_sq * t_cycle / t1;
  OverheadProjection r;
  r.eps_phase = a_fit * std::pow(p_z / p_th, 0.5 * (double(d) + 1.0));
  r.eps_bit = std::isinf(t_z) ? 0.0 : double(d) * t_cycle / (2.0 * t_z);
  r.eps_total = 0.5 * (r.eps_phase + r.eps_bit);
  return r;
}

}  // namespace catrep::noise
