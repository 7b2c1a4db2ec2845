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

#include <cmath>
#include <vector>

#include "catrep/errors.hpp"
#include "catrep/lindblad.hpp"

namespace catrep::lindblad {

namespace {

constexpr uint32_t kAncillaDim = 3;  // |g>, |e>, |f>

SparseMatrix ancilla_op(uint32_t row, uint32_t col) {
  SparseMatrix m(kAncillaDim, kAncillaDim);
  m.insert(row, col) = 1.0;
  m.makeCompressed();
  return m;
}

// Clips the small negative eigenvalues left by the integrator.
Matrix nearest_state(const Matrix &rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  ev /= ev.sum();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

void CxModel::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(gate_time) || !finite_nonneg(dissipation_time)) {
    throw DomainError("CxModel: times must be non-negative");
  }
  if (!finite_nonneg(ancilla_decay_fe) || !finite_nonneg(ancilla_decay_eg) || !finite_nonneg(kappa2)) {
    throw DomainError("CxModel: rates must be non-negative");
  }
  if (!(prep_error_e >= 0.0 && prep_error_e <= 1.0)) throw DomainError("CxModel: prep_error_e outside [0, 1]");
  if (!(alpha_sq > 0.0) || !std::isfinite(alpha_sq)) throw DomainError("CxModel: alpha_sq must be positive");
  if (!std::isfinite(chi_ge) || !std::isfinite(chi_gf)) throw DomainError("CxModel: dispersive shifts must be finite");
  if (dissipation_time > 0 && !(kappa2 > 0)) throw DomainError("CxModel: relaxation requires kappa2 > 0");
}

double cx2_bitflip_probability(const CxModel &m, FockSpace space) {
  m.validate();
  if (space.dim < 2) throw DomainError("FockSpace: dim must be at least 2");
  const uint32_t ns = space.dim;
  const cplx alpha = std::sqrt(m.alpha_sq);

  const SparseMatrix n = number_operator(ns);
  const SparseMatrix is = identity(ns);
  Generator gate;
  gate.hamiltonian = m.chi_ge * kron(n, ancilla_op(1, 1)) + m.chi_gf * kron(n, ancilla_op(2, 2));
  gate.jumps.push_back({kron(is, ancilla_op(1, 2)), m.ancilla_decay_fe, "ancilla_fe"});
  gate.jumps.push_back({kron(is, ancilla_op(0, 1)), m.ancilla_decay_eg, "ancilla_eg"});

  Matrix storage = projector(coherent_state(alpha, ns));
  Matrix ancilla = Matrix::Zero(kAncillaDim, kAncillaDim);
  ancilla(2, 2) = 1.0 - m.prep_error_e;
  ancilla(1, 1) = m.prep_error_e;
  Matrix rho(storage.rows() * kAncillaDim, storage.cols() * kAncillaDim);
  for (Eigen::Index i = 0; i < storage.rows(); ++i) {
    for (Eigen::Index j = 0; j < storage.cols(); ++j) {
      rho.block(i * kAncillaDim, j * kAncillaDim, kAncillaDim, kAncillaDim) = storage(i, j) * ancilla;
    }
  }
  rho = evolve(rho, gate, m.gate_time);
  Matrix reduced = nearest_state(trace_out_ancilla(rho, ns, kAncillaDim));
  if (m.dissipation_time > 0) reduced = evolve(reduced, two_photon_generator(alpha, m.kappa2, space), m.dissipation_time);
  const CatPopulations p = cat_populations(reduced, alpha);
  const double total = p.p_plus + p.p_minus;
  if (!(total > 0.5)) throw NumericError("cx2_bitflip_probability: state left the cat manifold");
  return p.p_minus / total;
}

}  // namespace catrep::lindblad
