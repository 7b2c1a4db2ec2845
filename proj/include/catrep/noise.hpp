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

#ifndef CATREP_NOISE_HPP
#define CATREP_NOISE_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace catrep::noise {

/// Simplified circuit-level noise for a distance-d phase-flip repetition code.
///
/// Data qubits are indexed 0..d-1 and ancillas 0..d-2; ancilla j measures
/// X_j X_{j+1}. Each cycle, data qubit i suffers a phase flip with total
/// probability p_z[i]; a fraction mid_cycle_fraction of that probability is
/// placed between the two CX layers. Each syndrome outcome is independently
/// correct, flipped (p_meas[j]) or erased (p_erase[j]).
struct RepCodeNoiseModel {
  uint32_t d = 3;
  std::vector<double> p_z;
  double mid_cycle_fraction = 0.5;
  std::vector<double> p_meas;
  std::vector<double> p_erase;
  double t_cycle = 1e-6;
  /// Flip probability of each final data measurement, per basis.
  double final_meas_error_x = 0.0;
  double final_meas_error_z = 0.0;
  /// Per-qubit, per-cycle bit-flip probability; only used in the Z basis.
  std::vector<double> p_bitflip;
  /// Mean photon number behind the model. Sets the X-basis initial-state
  /// distribution; infinity gives unbiased initial parities.
  double alpha_sq = std::numeric_limits<double>::infinity();

  /// Same probabilities on every qubit / ancilla. final_meas_error_z is set
  /// to the intrinsic POVM error at alpha_sq (or 0 when alpha_sq <= 0).
  static RepCodeNoiseModel uniform(uint32_t d, double p_z, double p_meas, double p_erase,
                                   double t_cycle = 1e-6, double alpha_sq = 0.0);

  /// Throws DomainError when an invariant is violated.
  void validate() const;

  /// FNV-1a hash of the canonical text form.
  uint64_t hash() const;
  /// Compact JSON with a fixed key order.
  std::string canonical_text() const;
  static RepCodeNoiseModel from_canonical_text(const std::string &text);
};

/// Phenomenological bit-flip model: per-cat idle A e^{-B |alpha|^2} plus an
/// additive probability for each CX gate, averaged over the g and f
/// ancilla branches.
struct BitFlipPhenomModel {
  std::vector<double> idle_a;
  std::vector<double> idle_b;
  std::vector<double> p_cx_g;
  std::vector<double> p_cx_f;

  void validate() const;
};

struct OverheadProjection {
  double eps_phase;
  double eps_bit;
  double eps_total;
};

struct IdleFit {
  double a;
  double b;
};

struct CxFit {
  double p_cx;
  double std_error;
  int num_points;
};

/// kappa1 |alpha|^2 t_cycle; throws DomainError if the result exceeds 0.5.
double pz_per_cycle(double kappa1_eff, double alpha_sq, double t_cycle);

double idle_bitflip(double a, double b, double alpha_sq);

/// Log-linear least squares for p = A e^{-B x}. Needs two or more points with p > 0.
IdleFit fit_idle_bitflip(const std::vector<std::pair<double, double>> &points);

/// Least-squares constant p_cx in p_CX2(x) = p_idle(x) + 2 p_cx, using the
/// points with x >= fit_range_min.
CxFit fit_cx_phenom(const std::vector<std::pair<double, double>> &cx2_probs, IdleFit idle,
                    double fit_range_min = 3.0);

/// Sum over cats of the idle probability plus half of p_g + p_f for every CX.
double logical_bitflip_per_cycle(const BitFlipPhenomModel &m, double alpha_sq);

/// Per-data-qubit bit-flip probability per cycle. CX gate 2j acts on data
/// j and CX gate 2j+1 on data j+1. Sums to logical_bitflip_per_cycle.
std::vector<double> per_qubit_bitflip(const BitFlipPhenomModel &m, double alpha_sq);

/// A model with uniform parameters over d cats and 2(d-1) CX gates.
BitFlipPhenomModel uniform_bitflip_model(uint32_t d, double a, double b, double p_cx);

OverheadProjection project_overhead(uint32_t d, double t_cycle, double t1, double alpha_sq,
                                    double t_z, double a_fit = 0.1, double p_th = 0.1);

}  // namespace catrep::noise

#endif
