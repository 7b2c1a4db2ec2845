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

#include "catrep/catq.hpp"

#include <cmath>
#include <string>

#include "catrep/errors.hpp"

namespace catrep::catq {

void CatParams::validate() const {
  if (!(alpha_sq > 0.0)) throw DomainError("alpha_sq must be > 0, got " + std::to_string(alpha_sq));
  if (!(kappa1_eff >= 0.0)) throw DomainError("kappa1_eff must be >= 0");
  if (!(t_cycle > 0.0)) throw DomainError("t_cycle must be > 0");
}

PhaseFlipRates phase_flip_rates(const CatParams &p) {
  if (p.alpha_sq == 0.0) {
    throw DomainError("phase_flip_rates: alpha_sq = 0 is degenerate (coth diverges)");
  }
  p.validate();
  double x = p.alpha_sq;
  double t = std::tanh(x);
  double base = p.kappa1_eff * x;
  return {base * t, base / t};
}

double steady_state_plus_population(double alpha_sq) {
  if (alpha_sq < 0.0) throw DomainError("steady_state_plus_population: alpha_sq < 0");
  double e2 = std::exp(-2.0 * alpha_sq);
  double e4 = e2 * e2;
  return (1.0 + e2) * (1.0 + e2) / (2.0 * (1.0 + e4));
}

ZReadoutPOVM z_readout_povm(double alpha_sq, double p_ge, double p_eg) {
  if (alpha_sq < 0.0) throw DomainError("z_readout_povm: alpha_sq < 0");
  if (!(p_ge >= 0.0 && p_ge <= 1.0 && p_eg >= 0.0 && p_eg <= 1.0)) {
    throw DomainError("z_readout_povm: confusion probabilities must lie in [0, 1]");
  }
  double contrast = std::sqrt(-std::expm1(-4.0 * alpha_sq)) * (1.0 - 0.5 * (p_ge + p_eg));
  double hi = 0.5 * (1.0 + contrast);
  double lo = 0.5 * (1.0 - contrast);
  return {{hi, lo}, {lo, hi}};
}

double z_readout_error(double alpha_sq, double p_ge, double p_eg) {
  return z_readout_povm(alpha_sq, p_ge, p_eg).f0_diag[1];
}

double error_per_cycle(double decay_time, double t_cycle) {
  if (!(decay_time > 0.0)) throw DomainError("error_per_cycle: decay_time must be > 0");
  if (std::isinf(decay_time)) return 0.0;
  return t_cycle / (2.0 * decay_time);
}

double decay_time_from_error(double eps, double t_cycle) {
  if (!(eps > 0.0)) throw DomainError("decay_time_from_error: eps must be > 0");
  return t_cycle / (2.0 * eps);
}

}  // namespace catrep::catq
