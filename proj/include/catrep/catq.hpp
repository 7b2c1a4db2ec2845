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

#ifndef CATREP_CATQ_HPP
#define CATREP_CATQ_HPP

#include <array>

namespace catrep::catq {

/// Physical knobs of one cat qubit.
struct CatParams {
  double alpha_sq;    // mean photon number |alpha|^2
  double kappa1_eff;  // effective single-photon loss rate (1/s)
  double t_cycle;     // error-correction cycle time (s)

  void validate() const;
};

struct PhaseFlipRates {
  double gamma_plus_to_minus;  // 1/s
  double gamma_minus_to_plus;  // 1/s
};

/// Diagonal Z-basis measurement operators F0 and F1.
///
/// Entry k of each array is the weight on |k><k| of the computational basis,
/// where |0> ~ |alpha> and |1> ~ |-alpha>.
struct ZReadoutPOVM {
  std::array<double, 2> f0_diag;
  std::array<double, 2> f1_diag;
};

/// Loss-induced parity flip rates of a stabilized cat.
///
/// gamma_{+->-} = kappa1 |alpha|^2 tanh|alpha|^2 and
/// gamma_{-->+} = kappa1 |alpha|^2 coth|alpha|^2.
/// Throws DomainError for alpha_sq == 0, where coth diverges.
PhaseFlipRates phase_flip_rates(const CatParams &p);

/// Steady-state population of the even cat |C+> under loss plus two-photon
/// stabilization: (1 + e^{-2x})^2 / (2 (1 + e^{-4x})).
double steady_state_plus_population(double alpha_sq);

/// Symmetrized single-shot Z readout including ancilla confusion p_ge, p_eg.
ZReadoutPOVM z_readout_povm(double alpha_sq, double p_ge, double p_eg);

/// Intrinsic readout error f0_diag[1] of the POVM.
double z_readout_error(double alpha_sq, double p_ge, double p_eg);

/// t_cycle / (2 decay_time).
double error_per_cycle(double decay_time, double t_cycle);

/// Inverse of error_per_cycle: t_cycle / (2 eps).
double decay_time_from_error(double eps, double t_cycle);

}  // namespace catrep::catq

#endif
