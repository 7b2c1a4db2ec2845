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

#include "catrep/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "catrep/errors.hpp"

namespace catrep::lindblad {

namespace {

using Triplet = Eigen::Triplet<cplx>;

// Largest phase advance per step for the fastest Hamiltonian frequency.
constexpr double kPhaseStep = 0.1;

double norm1(const SparseMatrix &m) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

double norm_inf(const SparseMatrix &m) {
  SparseMatrix t = m.transpose();
  return norm1(t);
}

void check_space(const FockSpace &space) {
  if (space.dim < 2) throw DomainError("FockSpace: dim must be at least 2");
}

void maybe_warn_truncation(Generator &g, cplx alpha, FockSpace space) {
  const double x = std::norm(alpha);
  if (!space.adequate_for(x)) {
    std::ostringstream os;
    os << "truncation dim " << space.dim << " is below the recommended " << FockSpace::recommended_dim(x)
       << " for |alpha|^2 = " << x;
    g.warnings.push_back(os.str());
  }
}

SparseMatrix cat_jump(cplx alpha, uint32_t dim) {
  SparseMatrix a = annihilation(dim);
  SparseMatrix l = a * a;
  SparseMatrix id = identity(dim);
  l -= alpha * alpha * id;
  l.makeCompressed();
  return l;
}

}  // namespace

uint32_t FockSpace::recommended_dim(double alpha_sq) {
  return uint32_t(std::ceil(4.0 * std::max(0.0, alpha_sq) + 10.0));
}

void Generator::validate() const {
  const Eigen::Index n = hamiltonian.rows();
  if (hamiltonian.cols() != n) throw DomainError("Generator: Hamiltonian is not square");
  SparseMatrix diff = hamiltonian - SparseMatrix(hamiltonian.adjoint());
  const double scale = std::max(1.0, norm1(hamiltonian));
  if (norm1(diff) > 1e-12 * scale) throw DomainError("Generator: Hamiltonian is not Hermitian");
  for (const auto &j : jumps) {
    if (!(j.rate >= 0.0) || !std::isfinite(j.rate)) throw DomainError("Generator: negative jump rate");
    if (j.op.rows() != n || j.op.cols() != n) throw DomainError("Generator: jump operator size mismatch");
  }
}

Generator operator+(const Generator &a, const Generator &b) {
  if (a.dim() != b.dim()) throw DomainError("Generator: adding generators on different spaces");
  Generator out;
  out.hamiltonian = a.hamiltonian + b.hamiltonian;
  out.jumps = a.jumps;
  out.jumps.insert(out.jumps.end(), b.jumps.begin(), b.jumps.end());
  out.alpha = a.stabilization_rate >= b.stabilization_rate ? a.alpha : b.alpha;
  out.stabilization_rate = std::max(a.stabilization_rate, b.stabilization_rate);
  out.warnings = a.warnings;
  out.warnings.insert(out.warnings.end(), b.warnings.begin(), b.warnings.end());
  return out;
}

SparseMatrix annihilation(uint32_t dim) {
  std::vector<Triplet> t;
  for (uint32_t n = 1; n < dim; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix number_operator(uint32_t dim) {
  std::vector<Triplet> t;
  for (uint32_t n = 1; n < dim; ++n) t.emplace_back(n, n, double(n));
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix identity(uint32_t dim) {
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return m;
}

SparseMatrix kron(const SparseMatrix &a, const SparseMatrix &b) {
  std::vector<Triplet> t;
  t.reserve(size_t(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
      for (Eigen::Index kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
        }
      }
    }
  }
  SparseMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Vector coherent_state(cplx alpha, uint32_t dim) {
  Vector v(dim);
  cplx c = 1.0;
  v(0) = c;
  for (uint32_t n = 1; n < dim; ++n) {
    c *= alpha / std::sqrt(double(n));
    v(n) = c;
  }
  return v / v.norm();
}

Vector cat_state(cplx alpha, int parity, uint32_t dim) {
  if (parity != 1 && parity != -1) throw DomainError("cat_state: parity must be +1 or -1");
  Vector v = coherent_state(alpha, dim) + double(parity) * coherent_state(-alpha, dim);
  const double n = v.norm();
  if (n < 1e-300) throw DomainError("cat_state: odd cat of vanishing amplitude");
  return v / n;
}

Matrix projector(const Vector &psi) { return psi * psi.adjoint(); }

Matrix fock_projector(uint32_t n, uint32_t dim) {
  if (n >= dim) throw DomainError("fock_projector: level outside the truncation");
  Matrix m = Matrix::Zero(dim, dim);
  m(n, n) = 1.0;
  return m;
}

Generator two_photon_generator(cplx alpha, double kappa2, FockSpace space) {
  check_space(space);
  if (!(kappa2 >= 0)) throw DomainError("two_photon_generator: kappa2 must be non-negative");
  Generator g;
  g.hamiltonian = SparseMatrix(space.dim, space.dim);
  g.jumps.push_back({cat_jump(alpha, space.dim), kappa2, "two_photon"});
  g.alpha = alpha;
  g.stabilization_rate = kappa2;
  maybe_warn_truncation(g, alpha, space);
  return g;
}

Generator loss_generator(double kappa1, FockSpace space) {
  check_space(space);
  if (!(kappa1 >= 0)) throw DomainError("loss_generator: kappa1 must be non-negative");
  Generator g;
  g.hamiltonian = SparseMatrix(space.dim, space.dim);
  g.jumps.push_back({annihilation(space.dim), kappa1, "loss"});
  return g;
}

Generator dephasing_generator(double kappa_phi, FockSpace space) {
  check_space(space);
  if (!(kappa_phi >= 0)) throw DomainError("dephasing_generator: kappa_phi must be non-negative");
  Generator g;
  g.hamiltonian = SparseMatrix(space.dim, space.dim);
  g.jumps.push_back({number_operator(space.dim), kappa_phi, "dephasing"});
  return g;
}

DetunedCoefficients detuned_coefficients(double g2, double delta_b, double kappa_b) {
  if (!(kappa_b > 0)) throw DomainError("detuned_coefficients: kappa_b must be positive");
  const double den = delta_b * delta_b + 0.25 * kappa_b * kappa_b;
  return {-g2 * g2 * delta_b / den, kappa_b * g2 * g2 / den};
}

Generator detuned_stabilization_generator(double g2, double delta_b, double kappa_b, cplx alpha,
                                          FockSpace space) {
  check_space(space);
  const auto c = detuned_coefficients(g2, delta_b, kappa_b);
  SparseMatrix l = cat_jump(alpha, space.dim);
  Generator g;
  SparseMatrix ladj = l.adjoint();
  g.hamiltonian = c.kerr * (ladj * l);
  g.jumps.push_back({l, c.rate, "two_photon"});
  g.alpha = alpha;
  g.stabilization_rate = c.rate;
  maybe_warn_truncation(g, alpha, space);
  if (std::abs(delta_b) > 0.1 * kappa_b) {
    std::ostringstream os;
    os << "buffer detuning |delta_b| = " << std::abs(delta_b) << " is not small compared with kappa_b = " << kappa_b
       << "; adiabatic elimination may be inaccurate";
    g.warnings.push_back(os.str());
  }
  return g;
}

namespace {

struct Prepared {
  SparseMatrix heff;  // H - i/2 sum_k gamma_k L_k^dag L_k
  std::vector<SparseMatrix> scaled;  // sqrt(gamma_k) L_k
};

Prepared prepare(const Generator &g) {
  Prepared p;
  p.heff = g.hamiltonian;
  for (const auto &j : g.jumps) {
    if (j.rate == 0.0) continue;
    SparseMatrix l = std::sqrt(j.rate) * j.op;
    SparseMatrix ladj = l.adjoint();
    SparseMatrix ll = ladj * l;
    p.heff -= cplx(0.0, 0.5) * ll;
    p.scaled.push_back(std::move(l));
  }
  p.heff.makeCompressed();
  return p;
}

// Assumes rho is Hermitian, which every RK4 stage preserves.
void rhs(const Prepared &p, const Matrix &rho, Matrix &out, Matrix &tmp) {
  tmp.noalias() = p.heff * rho;
  out = cplx(0.0, -1.0) * tmp;
  out += out.adjoint().eval();
  for (const auto &l : p.scaled) {
    tmp.noalias() = l * rho;
    out.noalias() += l * tmp.adjoint();
  }
}

double hermiticity_error(const Matrix &rho) { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

Matrix apply_generator(const Generator &g, const Matrix &rho) {
  Prepared p = prepare(g);
  Matrix herm = 0.5 * (rho + rho.adjoint());
  Matrix anti = rho - herm;
  Matrix out, tmp, out2;
  rhs(p, herm, out, tmp);
  // Anti-Hermitian part: i * (Hermitian matrix), and the map is linear.
  Matrix h2 = cplx(0.0, -1.0) * anti;
  rhs(p, h2, out2, tmp);
  return out + cplx(0.0, 1.0) * out2;
}

Matrix evolve(const Matrix &rho0, const Generator &g, double t, EvolveStats *stats) {
  g.validate();
  const Eigen::Index n = g.dim();
  if (rho0.rows() != n || rho0.cols() != n) throw DomainError("evolve: state and generator sizes differ");
  if (!(t >= 0) || !std::isfinite(t)) throw DomainError("evolve: time must be finite and non-negative");
  if (hermiticity_error(rho0) > 1e-10) throw DomainError("evolve: initial state is not Hermitian");
  if (std::abs(rho0.trace() - 1.0) > 1e-10) throw DomainError("evolve: initial state does not have unit trace");
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho0 + rho0.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw DomainError("evolve: initial state is not positive");
  }
  EvolveStats local;
  if (t == 0.0) {
    if (stats) *stats = local;
    return rho0;
  }
  Prepared p = prepare(g);
  const double h_norm = norm1(g.hamiltonian);
  double max_rate = 0.0, bound = 2.0 * h_norm;
  for (const auto &j : g.jumps) {
    if (j.rate == 0.0) continue;
    max_rate = std::max(max_rate, j.rate);
    SparseMatrix ladj = j.op.adjoint();
    SparseMatrix ll = ladj * j.op;
    bound += j.rate * (norm1(ll) + norm1(j.op) * norm_inf(j.op));
  }
  double h = t;
  if (max_rate > 0) h = std::min(h, 1.0 / (50.0 * max_rate));
  if (bound > 0) h = std::min(h, 2.0 / bound);
  if (h_norm > 0) h = std::min(h, kPhaseStep / h_norm);
  const uint64_t steps = uint64_t(std::ceil(t / h - 1e-9));
  h = t / double(steps);

  Matrix rho = 0.5 * (rho0 + rho0.adjoint());
  Matrix k1, k2, k3, k4, tmp, stage;
  for (uint64_t s = 0; s < steps; ++s) {
    rhs(p, rho, k1, tmp);
    stage = rho + (0.5 * h) * k1;
    rhs(p, stage, k2, tmp);
    stage = rho + (0.5 * h) * k2;
    rhs(p, stage, k3, tmp);
    stage = rho + h * k3;
    rhs(p, stage, k4, tmp);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // rhs() is only valid on Hermitian input; drop the round-off residue.
    stage = rho.adjoint();
    rho = 0.5 * (rho + stage);
    if ((s & 1023u) == 1023u || s + 1 == steps) {
      if (!rho.allFinite()) {
        std::ostringstream os;
        os << "evolve: non-finite state after " << s + 1 << " of " << steps << " steps (h = " << h << ")";
        throw NumericError(os.str());
      }
    }
  }
  local.steps = steps;
  local.step = h;
  local.trace_error = std::abs(rho.trace() - 1.0);
  local.hermiticity_error = hermiticity_error(rho);
  if (stats) *stats = local;
  if (local.trace_error > 1e-8 || local.hermiticity_error > 1e-10) {
    std::ostringstream os;
    os << "evolve: drift after " << steps << " steps of h = " << h << ": trace error " << local.trace_error
       << ", hermiticity error " << local.hermiticity_error;
    throw NumericError(os.str());
  }
  return rho;
}

Matrix liouvillian(const Generator &g) {
  g.validate();
  const Eigen::Index n = g.dim();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix h = Matrix(g.hamiltonian);
  auto kron_dense = [](const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
  };
  Matrix heff = h;
  Matrix jump_part = Matrix::Zero(n * n, n * n);
  for (const auto &j : g.jumps) {
    if (j.rate == 0.0) continue;
    const Matrix l = Matrix(j.op);
    heff -= cplx(0.0, 0.5 * j.rate) * (l.adjoint() * l);
    jump_part += j.rate * kron_dense(l.conjugate(), l);
  }
  // vec(A rho B) = (B^T (x) A) vec(rho) for column stacking.
  Matrix out = cplx(0.0, -1.0) * kron_dense(id, heff) + cplx(0.0, 1.0) * kron_dense(heff.conjugate(), id);
  out += jump_part;
  return out;
}

Matrix steady_state(const Generator &g) {
  const Eigen::Index n = g.dim();
  Matrix l = liouvillian(g);
  Vector rhs_vec = Vector::Zero(n * n);
  for (Eigen::Index c = 0; c < n * n; ++c) l(0, c) = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) l(0, i * n + i) = 1.0;
  rhs_vec(0) = 1.0;
  Eigen::PartialPivLU<Matrix> lu(l);
  Vector x = lu.solve(rhs_vec);
  if (!x.allFinite()) throw NumericError("steady_state: singular Liouvillian");
  Matrix rho = Eigen::Map<Matrix>(x.data(), n, n);
  rho = 0.5 * (rho + rho.adjoint());
  return rho / rho.trace().real();
}

std::vector<double> relaxation_spectrum(const Generator &g) {
  Eigen::ComplexEigenSolver<Matrix> es(liouvillian(g), false);
  if (es.info() != Eigen::Success) throw NumericError("relaxation_spectrum: eigensolver failed");
  std::vector<double> re(size_t(es.eigenvalues().size()));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) re[size_t(i)] = es.eigenvalues()(i).real();
  std::sort(re.begin(), re.end(), std::greater<double>());
  return re;
}

double parity_expectation(const Matrix &rho) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) s += (i % 2 == 0 ? 1.0 : -1.0) * rho(i, i).real();
  return s;
}

double trace_distance(const Matrix &a, const Matrix &b) {
  Matrix d = a - b;
  d = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

CatPopulations cat_populations(const Matrix &rho, cplx alpha) {
  const uint32_t dim = uint32_t(rho.rows());
  Vector plus = coherent_state(alpha, dim), minus = coherent_state(-alpha, dim);
  Eigen::Matrix2cd gram;
  gram(0, 0) = plus.squaredNorm();
  gram(1, 1) = minus.squaredNorm();
  gram(0, 1) = plus.dot(minus);
  gram(1, 0) = std::conj(gram(0, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(gram);
  if (es.eigenvalues().minCoeff() < 1e-14) throw NumericError("cat_populations: coherent states are degenerate");
  Eigen::Matrix2cd inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  Vector u_plus = inv_sqrt(0, 0) * plus + inv_sqrt(1, 0) * minus;
  Vector u_minus = inv_sqrt(0, 1) * plus + inv_sqrt(1, 1) * minus;
  return {u_plus.dot(rho * u_plus).real(), u_minus.dot(rho * u_minus).real()};
}

CatPopulations dissipative_map(cplx beta, const Generator &g, double t_relax) {
  if (!(g.stabilization_rate > 0)) throw DomainError("dissipative_map: generator has no stabilizing jump");
  if (t_relax < 10.0 / g.stabilization_rate) {
    throw DomainError("dissipative_map: t_relax shorter than 10 / stabilization rate");
  }
  const uint32_t dim = uint32_t(g.dim());
  Matrix rho = evolve(projector(coherent_state(beta, dim)), g, t_relax);
  CatPopulations p = cat_populations(rho, g.alpha);
  if (p.p_plus + p.p_minus < 0.99) {
    std::ostringstream os;
    os << "dissipative_map: state did not converge to the cat manifold (residual "
       << 1.0 - p.p_plus - p.p_minus << ")";
    throw NumericError(os.str());
  }
  return p;
}

Matrix trace_out_ancilla(const Matrix &rho, uint32_t storage_dim, uint32_t ancilla_dim) {
  if (rho.rows() != Eigen::Index(storage_dim) * ancilla_dim || rho.cols() != rho.rows()) {
    throw DomainError("trace_out_ancilla: size mismatch");
  }
  Matrix out = Matrix::Zero(storage_dim, storage_dim);
  for (uint32_t i = 0; i < storage_dim; ++i) {
    for (uint32_t j = 0; j < storage_dim; ++j) {
      cplx s = 0.0;
      for (uint32_t k = 0; k < ancilla_dim; ++k) s += rho(i * ancilla_dim + k, j * ancilla_dim + k);
      out(i, j) = s;
    }
  }
  return out;
}

double bitflip_rate(double alpha_sq, double kappa2, double kappa1, double kappa_phi, FockSpace space) {
  check_space(space);
  if (!(alpha_sq > 0)) throw DomainError("bitflip_rate: alpha_sq must be positive");
  const cplx alpha = std::sqrt(alpha_sq);
  Generator g = two_photon_generator(alpha, kappa2, space) + loss_generator(kappa1, space) +
                dephasing_generator(kappa_phi, space);
  const Eigen::Index n = g.dim();
  Matrix l = liouvillian(g);
  // The population imbalance between |alpha> and |-alpha> lives in the block
  // of elements |n><m| with n + m odd, which contains no steady state.
  std::vector<Eigen::Index> odd;
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      if ((r + c) % 2 == 1) odd.push_back(c * n + r);
    }
  }
  Matrix block(Eigen::Index(odd.size()), Eigen::Index(odd.size()));
  for (size_t i = 0; i < odd.size(); ++i) {
    for (size_t j = 0; j < odd.size(); ++j) block(Eigen::Index(i), Eigen::Index(j)) = l(odd[i], odd[j]);
  }
  Eigen::ComplexEigenSolver<Matrix> es(block, false);
  if (es.info() != Eigen::Success) throw NumericError("bitflip_rate: eigensolver failed");
  double slowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) slowest = std::min(slowest, -es.eigenvalues()(i).real());
  return slowest;
}

}  // namespace catrep::lindblad
