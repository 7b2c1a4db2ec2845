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

#ifndef CATREP_LINDBLAD_HPP
#define CATREP_LINDBLAD_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace catrep::lindblad {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

struct FockSpace {
  uint32_t dim = 2;

  /// Truncation recommended for a cat of size alpha_sq: 4 |alpha|^2 + 10.
  static uint32_t recommended_dim(double alpha_sq);
  bool adequate_for(double alpha_sq) const { return dim >= recommended_dim(alpha_sq); }
};

struct JumpOperator {
  SparseMatrix op;
  double rate;
  std::string label;
};

/// drho/dt = -i[H, rho] + sum_k rate_k D[L_k] rho.
struct Generator {
  SparseMatrix hamiltonian;
  std::vector<JumpOperator> jumps;
  /// Amplitude of the stabilized cat manifold, when the generator has one.
  cplx alpha{0.0, 0.0};
  /// Rate of the stabilizing jump, used for convergence checks.
  double stabilization_rate = 0.0;
  std::vector<std::string> warnings;

  Eigen::Index dim() const { return hamiltonian.rows(); }
  /// Throws DomainError on non-Hermitian H, negative rates or size mismatch.
  void validate() const;
};

/// Sum of two generators on the same space.
Generator operator+(const Generator &a, const Generator &b);

SparseMatrix annihilation(uint32_t dim);
SparseMatrix number_operator(uint32_t dim);
SparseMatrix identity(uint32_t dim);
/// Kronecker product A (x) B for a composite space.
SparseMatrix kron(const SparseMatrix &a, const SparseMatrix &b);

/// Truncated coherent state, renormalized.
Vector coherent_state(cplx alpha, uint32_t dim);
/// Normalized cat state |alpha> + parity |-alpha>, parity = +1 or -1.
Vector cat_state(cplx alpha, int parity, uint32_t dim);
Matrix projector(const Vector &psi);
Matrix fock_projector(uint32_t n, uint32_t dim);

/// kappa2 D[a^2 - alpha^2] with zero Hamiltonian.
Generator two_photon_generator(cplx alpha, double kappa2, FockSpace space);
/// kappa1 D[a].
Generator loss_generator(double kappa1, FockSpace space);
/// kappa_phi D[a^dag a].
Generator dephasing_generator(double kappa_phi, FockSpace space);

struct DetunedCoefficients {
  /// Coefficient of (a^dag^2 - alpha*^2)(a^2 - alpha^2) in H (rad/s).
  double kerr;
  /// Rate of the a^2 - alpha^2 jump (1/s).
  double rate;
};

/// kerr = -g2^2 delta_b / (delta_b^2 + (kappa_b/2)^2) and
/// rate = kappa_b g2^2 / (delta_b^2 + (kappa_b/2)^2).
DetunedCoefficients detuned_coefficients(double g2, double delta_b, double kappa_b);

/// Adiabatically eliminated buffer at detuning delta_b. Adds a warning when
/// |delta_b| is not small compared with kappa_b.
Generator detuned_stabilization_generator(double g2, double delta_b, double kappa_b, cplx alpha,
                                          FockSpace space);

struct EvolveStats {
  uint64_t steps = 0;
  double step = 0.0;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
};

/// Fixed-step RK4 with step <= 1/(50 max rate), further limited by the
/// generator norm. Throws NumericError with diagnostics on non-finite values
/// or trace/Hermiticity drift beyond 1e-8 / 1e-10.
Matrix evolve(const Matrix &rho0, const Generator &g, double t, EvolveStats *stats = nullptr);

/// Right-hand side of the master equation.
Matrix apply_generator(const Generator &g, const Matrix &rho);

/// Dense superoperator acting on column-stacked density matrices.
Matrix liouvillian(const Generator &g);

/// Unit-trace null vector of the Liouvillian (unique steady state assumed).
Matrix steady_state(const Generator &g);

/// Real parts of the Liouvillian eigenvalues, sorted by decreasing value
/// (0 first, then the slowest decay rates as negative numbers).
std::vector<double> relaxation_spectrum(const Generator &g);

/// <P> with P = (-1)^{a^dag a}.
double parity_expectation(const Matrix &rho);
double trace_distance(const Matrix &a, const Matrix &b);

struct CatPopulations {
  double p_plus;   // population of |alpha> after orthogonalization
  double p_minus;  // population of |-alpha>
};

/// Populations on the Lowdin-orthogonalized pair built from |alpha>, |-alpha>.
/// For the composite storage (x) ancilla space pass the reduced storage state.
CatPopulations cat_populations(const Matrix &rho, cplx alpha);

/// Relaxes |beta> under g for t_relax and returns the |+-alpha> populations.
/// Throws DomainError if t_relax < 10 / g.stabilization_rate and
/// NumericError if p_plus + p_minus < 0.99 afterwards.
CatPopulations dissipative_map(cplx beta, const Generator &g, double t_relax);

/// Partial trace over the ancilla of a storage (x) ancilla state.
Matrix trace_out_ancilla(const Matrix &rho, uint32_t storage_dim, uint32_t ancilla_dim);

/// Storage (x) three-level ancilla CX model.
struct CxModel {
  double chi_ge = 0.0;  // rad/s
  double chi_gf = 0.0;  // rad/s
  double gate_time = 0.0;
  double ancilla_decay_fe = 0.0;  // 1/s
  double ancilla_decay_eg = 0.0;  // 1/s
  double prep_error_e = 0.0;
  double alpha_sq = 4.0;
  double kappa2 = 0.0;  // 1/s
  double dissipation_time = 0.0;

  void validate() const;
};

/// Bit-flip probability of one CX^2 cycle with the ancilla prepared in |f>
/// (|e> with probability prep_error_e): dispersive evolution with ancilla
/// decay, trace over the ancilla, two-photon relaxation, then the population
/// moved from |alpha> to |-alpha>.
double cx2_bitflip_probability(const CxModel &m, FockSpace space);

/// Decay rate of the population imbalance between |alpha> and |-alpha> for a
/// cat stabilized by kappa2 under loss kappa1 and dephasing kappa_phi.
double bitflip_rate(double alpha_sq, double kappa2, double kappa1, double kappa_phi,
                    FockSpace space);

}  // namespace catrep::lindblad

#endif
