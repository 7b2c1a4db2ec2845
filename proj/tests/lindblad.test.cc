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

#include <chrono>
#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "catrep/catq.hpp"
#include "catrep/errors.hpp"
#include "catrep/lindblad.hpp"

namespace {

using namespace catrep;
using namespace catrep::lindblad;

constexpr double kTwoPi = 2.0 * M_PI;

Matrix dense_kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-stacked superoperator: vec(A X B) = (B^T (x) A) vec(X).
Matrix oracle_liouvillian(const Generator &g) {
  const Eigen::Index n = g.dim();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix h = Matrix(g.hamiltonian);
  Matrix l = cplx(0, -1) * (dense_kron(id, h) - dense_kron(h.transpose(), id));
  for (const auto &j : g.jumps) {
    const Matrix op = Matrix(j.op);
    const Matrix ll = op.adjoint() * op;
    l += j.rate * (dense_kron(op.conjugate(), op) - 0.5 * dense_kron(id, ll) - 0.5 * dense_kron(ll.transpose(), id));
  }
  return l;
}

Matrix propagate_exactly(const Generator &g, const Matrix &rho0, double t) {
  const Eigen::Index n = g.dim();
  Matrix prop = (oracle_liouvillian(g) * t).exp();
  Vector v = prop * Eigen::Map<const Vector>(rho0.data(), n * n);
  return Eigen::Map<Matrix>(v.data(), n, n);
}

double max_abs(const Matrix &m) { return m.cwiseAbs().maxCoeff(); }

TEST(Operators, LadderAndNumber) {
  const uint32_t dim = 6;
  Matrix a = Matrix(annihilation(dim));
  for (uint32_t k = 1; k < dim; ++k) EXPECT_NEAR(std::abs(a(k - 1, k) - std::sqrt(double(k))), 0.0, 1e-15);
  EXPECT_NEAR(max_abs(Matrix(a.adjoint() * a) - Matrix(number_operator(dim))), 0.0, 1e-14);
  EXPECT_NEAR(max_abs(Matrix(identity(dim)) - Matrix::Identity(dim, dim)), 0.0, 0.0);
  Matrix k = Matrix(kron(annihilation(3), identity(2)));
  EXPECT_EQ(k.rows(), 6);
  EXPECT_NEAR(max_abs(k - dense_kron(Matrix(annihilation(3)), Matrix::Identity(2, 2))), 0.0, 0.0);
}

TEST(States, CoherentAndCat) {
  const uint32_t dim = 40;
  const cplx alpha(1.2, -0.5);
  Vector c = coherent_state(alpha, dim);
  EXPECT_NEAR(c.norm(), 1.0, 1e-12);
  Matrix a = Matrix(annihilation(dim));
  EXPECT_NEAR(std::abs(c.dot(a * c) - alpha), 0.0, 1e-10);
  Matrix plus = projector(cat_state(1.5, +1, dim));
  Matrix minus = projector(cat_state(1.5, -1, dim));
  EXPECT_NEAR(parity_expectation(plus), 1.0, 1e-12);
  EXPECT_NEAR(parity_expectation(minus), -1.0, 1e-12);
  auto p = cat_populations(plus, 1.5);
  EXPECT_NEAR(p.p_plus, 0.5, 1e-10);
  EXPECT_NEAR(p.p_minus, 0.5, 1e-10);
  auto q = cat_populations(projector(coherent_state(1.5, dim)), 1.5);
  EXPECT_GT(q.p_plus, 0.999);
  EXPECT_NEAR(q.p_plus + q.p_minus, 1.0, 1e-10);
  EXPECT_THROW(fock_projector(dim, dim), DomainError);
}

TEST(Generator, ValidationRejectsBadInput) {
  Generator g = loss_generator(1.0, FockSpace{4});
  g.hamiltonian.coeffRef(0, 1) = cplx(1.0, 0.0);
  EXPECT_THROW(g.validate(), DomainError);
  EXPECT_THROW(loss_generator(-1.0, FockSpace{4}), DomainError);
  EXPECT_THROW(two_photon_generator(1.0, 1.0, FockSpace{1}), DomainError);
  EXPECT_THROW(detuned_coefficients(1.0, 0.0, 0.0), DomainError);
  Generator big = two_photon_generator(3.0, 1.0, FockSpace{12});
  EXPECT_FALSE(big.warnings.empty());
  EXPECT_TRUE(two_photon_generator(1.0, 1.0, FockSpace{20}).warnings.empty());
}

TEST(Evolve, EmptyGeneratorIsIdentity) {
  Generator g;
  g.hamiltonian = SparseMatrix(5, 5);
  Matrix rho = projector(coherent_state(0.7, 5).normalized());
  EXPECT_NEAR(max_abs(evolve(rho, g, 3.0) - rho), 0.0, 1e-15);
}

TEST(Evolve, SinglePhotonLoss) {
  const double kappa = 2.0e3, t = 4e-4;
  Matrix rho = evolve(fock_projector(1, 4), loss_generator(kappa, FockSpace{4}), t);
  EXPECT_NEAR(rho(1, 1).real(), std::exp(-kappa * t), 1e-9);
  EXPECT_NEAR(rho(0, 0).real(), 1.0 - std::exp(-kappa * t), 1e-9);
}

TEST(Evolve, RejectsInvalidStates) {
  auto g = loss_generator(1.0, FockSpace{3});
  Matrix bad = Matrix::Identity(3, 3);
  EXPECT_THROW(evolve(bad, g, 1.0), DomainError);
  Matrix neg = Matrix::Zero(3, 3);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(evolve(neg, g, 1.0), DomainError);
  EXPECT_THROW(evolve(fock_projector(0, 4), g, 1.0), DomainError);
  EXPECT_THROW(evolve(fock_projector(0, 3), g, -1.0), DomainError);
}

TEST(Evolve, AgreesWithDenseExponential) {
  const uint32_t dim = 12;
  const FockSpace space{dim};
  const double kappa2 = 1.0;
  Generator g = detuned_stabilization_generator(0.5, 0.1, 1.0, cplx(1.0, 0.2), space) +
                loss_generator(0.05 * kappa2, space) + dephasing_generator(0.02, space);
  g.hamiltonian += 0.3 * number_operator(dim);
  Matrix rho0 = 0.7 * projector(coherent_state(cplx(0.3, 0.9), dim).normalized()) + 0.3 * fock_projector(3, dim);
  for (double t : {0.2, 1.5}) {
    EvolveStats stats;
    Matrix rk = evolve(rho0, g, t, &stats);
    Matrix exact = propagate_exactly(g, rho0, t);
    EXPECT_LT(trace_distance(rk, exact), 1e-6) << "t = " << t;
    EXPECT_LT(stats.trace_error, 1e-8);
    EXPECT_LT(stats.hermiticity_error, 1e-10);
    EXPECT_GT(stats.steps, 0u);
  }
  EXPECT_LT(max_abs(liouvillian(g) - oracle_liouvillian(g)), 1e-12);
  Matrix drho = apply_generator(g, rho0);
  Vector v = oracle_liouvillian(g) * Eigen::Map<const Vector>(rho0.data(), dim * dim);
  EXPECT_LT(max_abs(drho - Eigen::Map<Matrix>(v.data(), dim, dim)), 1e-12);
}

TEST(Evolve, PreservesTraceAndHermiticityOnCatDynamics) {
  const uint32_t dim = 18;
  auto g = two_photon_generator(std::sqrt(2.0), 1.0, FockSpace{dim}) + loss_generator(0.01, FockSpace{dim});
  EvolveStats stats;
  Matrix rho = evolve(projector(coherent_state(cplx(0.5, 1.0), dim)), g, 2.0, &stats);
  EXPECT_LT(stats.trace_error, 1e-8);
  EXPECT_LT(stats.hermiticity_error, 1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-8);
}

TEST(TwoPhoton, CoherentStatesAreFixedPoints) {
  const uint32_t dim = 24;
  const cplx alpha = std::sqrt(2.0);
  auto g = two_photon_generator(alpha, 1.0, FockSpace{dim});
  for (int s : {+1, -1}) {
    Matrix rho = projector(coherent_state(double(s) * alpha, dim));
    EXPECT_LT(max_abs(apply_generator(g, rho)), 1e-6);
    EXPECT_LT(trace_distance(evolve(rho, g, 2.0), rho), 1e-6);
  }
}

TEST(TwoPhoton, PureDissipationSettlesInLowestTwoLevels) {
  const uint32_t dim = 26;
  auto g = two_photon_generator(0.0, 1.0, FockSpace{dim});
  Matrix rho = evolve(projector(coherent_state(std::sqrt(7.0), dim)), g, 30.0);
  const double low = rho(0, 0).real() + rho(1, 1).real();
  EXPECT_NEAR(low, 1.0, 1e-3);
  // Two-photon loss preserves parity, so the split follows the initial parity.
  const double even = 0.5 * (1.0 + std::exp(-2.0 * 7.0));
  EXPECT_NEAR(rho(0, 0).real(), even, 1e-3);
  EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-3);
}

TEST(TwoPhoton, ParityRelaxationMatchesClosedForm) {
  // |alpha|^2 = 2, kappa2 / 2pi = 50 kHz, small single-photon loss.
  const double x = 2.0, kappa2 = kTwoPi * 50e3, kappa1 = kappa2 / 1000.0;
  const uint32_t dim = 20;
  auto g = two_photon_generator(std::sqrt(x), kappa2, FockSpace{dim}) + loss_generator(kappa1, FockSpace{dim});
  // Slowest decay in the block of even n + m, which holds the parity.
  Matrix l = liouvillian(g);
  std::vector<Eigen::Index> even;
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r)
      if ((r + c) % 2 == 0) even.push_back(c * dim + r);
  Matrix block(even.size(), even.size());
  for (size_t i = 0; i < even.size(); ++i)
    for (size_t j = 0; j < even.size(); ++j) block(i, j) = l(even[i], even[j]);
  Eigen::ComplexEigenSolver<Matrix> es(block, false);
  std::vector<double> rates;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) rates.push_back(-es.eigenvalues()(i).real());
  std::sort(rates.begin(), rates.end());
  auto r = catq::phase_flip_rates({x, kappa1, 1e-6});
  const double want = r.gamma_plus_to_minus + r.gamma_minus_to_plus;
  EXPECT_NEAR(rates[0], 0.0, 1e-6 * kappa2);
  EXPECT_NEAR(rates[1] / want, 1.0, 0.05);
}

TEST(TwoPhoton, SteadyStateParityMatchesClosedForm) {
  const double x = 2.0;
  const uint32_t dim = 20;
  auto g = two_photon_generator(std::sqrt(x), 1.0, FockSpace{dim}) + loss_generator(1e-3, FockSpace{dim});
  Matrix rho = steady_state(g);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  EXPECT_LT(max_abs(apply_generator(g, rho)), 1e-9);
  const double p_plus = 0.5 * (1.0 + parity_expectation(rho));
  EXPECT_NEAR(p_plus, catq::steady_state_plus_population(x), 1e-3);
  auto spectrum = relaxation_spectrum(g);
  EXPECT_NEAR(spectrum.front(), 0.0, 1e-9);
  for (double v : spectrum) EXPECT_LE(v, 1e-9);
}

TEST(BitFlip, RateFallsWithPhotonNumber) {
  const uint32_t dim = 26;
  double last = INFINITY;
  for (double x : {1.0, 2.0, 3.0, 4.0}) {
    const double rate = bitflip_rate(x, 1.0, 1e-2, 2e-2, FockSpace{dim});
    EXPECT_GT(rate, 0.0);
    EXPECT_LT(rate, last) << x;
    last = rate;
  }
}

TEST(Detuned, CoefficientsMatchAdiabaticElimination) {
  // Second implementation: g2^2 / (kappa_b / 2 + i delta_b) splits into
  // half the jump rate (real part) and minus the Kerr coefficient (imaginary part).
  for (auto [g2, db, kb] : {std::tuple{kTwoPi * 350e3, -kTwoPi * 2e6, kTwoPi * 10e6},
                            std::tuple{kTwoPi * 350e3, kTwoPi * 5e6, kTwoPi * 10e6},
                            std::tuple{1.0, 0.0, 3.0}}) {
    const std::complex<double> z = g2 * g2 / std::complex<double>(0.5 * kb, db);
    auto c = detuned_coefficients(g2, db, kb);
    EXPECT_NEAR(c.rate, 2.0 * z.real(), 1e-12 * std::abs(c.rate));
    EXPECT_NEAR(c.kerr, z.imag(), 1e-12 * std::max(1.0, std::abs(c.kerr)));
  }
  auto zero = detuned_coefficients(2.0, 0.0, 5.0);
  EXPECT_EQ(zero.kerr, 0.0);
  EXPECT_NEAR(zero.rate, 4.0 * 4.0 / 5.0, 1e-15);
}

TEST(Detuned, FlippingDetuningNegatesHamiltonian) {
  const FockSpace space{10};
  auto a = detuned_stabilization_generator(1.0, 0.3, 4.0, 1.2, space);
  auto b = detuned_stabilization_generator(1.0, -0.3, 4.0, 1.2, space);
  EXPECT_LT(max_abs(Matrix(a.hamiltonian + b.hamiltonian)), 1e-15);
  EXPECT_GT(max_abs(Matrix(a.hamiltonian)), 0.0);
  EXPECT_NEAR(a.jumps[0].rate, b.jumps[0].rate, 0.0);
  auto flat = detuned_stabilization_generator(1.0, 0.0, 4.0, 1.2, space);
  EXPECT_EQ(max_abs(Matrix(flat.hamiltonian)), 0.0);
  EXPECT_NEAR(flat.jumps[0].rate, 1.0, 1e-15);
  EXPECT_FALSE(detuned_stabilization_generator(1.0, 1.0, 4.0, 1.2, space).warnings.empty());
}

class DissipativeMap : public ::testing::Test {
 protected:
  static constexpr double kG2 = kTwoPi * 350e3, kKb = kTwoPi * 10e6;
  static constexpr uint32_t kDim = 22;
  CatPopulations run(double delta_b, cplx beta, double x = 3.0, uint32_t dim = kDim) {
    auto g = detuned_stabilization_generator(kG2, delta_b, kKb, std::sqrt(x), FockSpace{dim});
    return dissipative_map(beta, g, 10.0 / g.stabilization_rate);
  }
};

TEST_F(DissipativeMap, ImaginaryAxisIsBalancedWithoutDetuning) {
  auto p = run(0.0, cplx(0.0, 1.3));
  EXPECT_NEAR(p.p_plus, 0.5, 1e-3);
  EXPECT_NEAR(p.p_minus, 0.5, 1e-3);
  EXPECT_GT(p.p_plus + p.p_minus, 0.99);
}

TEST_F(DissipativeMap, ReflectionSymmetryWithoutDetuning) {
  const cplx beta(0.6, 1.1);
  auto p = run(0.0, beta);
  auto q = run(0.0, -beta);
  EXPECT_NEAR(p.p_plus, q.p_minus, 1e-3);
  EXPECT_NEAR(p.p_minus, q.p_plus, 1e-3);
}

TEST_F(DissipativeMap, DetuningSignSetsImbalance) {
  const cplx beta(0.0, std::sqrt(3.0));
  auto neg = run(-kTwoPi * 5e6, beta);
  auto pos = run(kTwoPi * 5e6, beta);
  const double a = neg.p_plus - neg.p_minus, b = pos.p_plus - pos.p_minus;
  EXPECT_GT(std::abs(a), 0.01);
  EXPECT_LT(a * b, 0.0);
  EXPECT_NEAR(a, -b, 1e-3);
}

TEST_F(DissipativeMap, ConvergedInTruncation) {
  const cplx beta(0.4, 1.0);
  auto small = run(-kTwoPi * 2e6, beta, 2.0, 18);
  auto large = run(-kTwoPi * 2e6, beta, 2.0, 36);
  EXPECT_NEAR(small.p_plus / large.p_plus, 1.0, 0.01);
  EXPECT_NEAR(small.p_minus / large.p_minus, 1.0, 0.01);
}

TEST_F(DissipativeMap, RequiresLongRelaxation) {
  auto g = detuned_stabilization_generator(kG2, 0.0, kKb, std::sqrt(2.0), FockSpace{16});
  EXPECT_THROW(dissipative_map(1.0, g, 1.0 / g.stabilization_rate), DomainError);
}

TEST(Ancilla, PartialTraceOfProductState) {
  Matrix s = 0.25 * fock_projector(0, 3) + 0.75 * fock_projector(2, 3);
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 0.4;
  a(1, 1) = 0.6;
  a(0, 1) = a(1, 0) = 0.2;
  EXPECT_LT(max_abs(trace_out_ancilla(dense_kron(s, a), 3, 2) - s), 1e-15);
  EXPECT_THROW(trace_out_ancilla(s, 2, 2), DomainError);
}

CxModel device_scale_cx(double ratio) {
  CxModel m;
  m.gate_time = 800e-9;
  m.ancilla_decay_fe = 2.0 * 0.05 / 1.25e-6;
  m.ancilla_decay_eg = m.ancilla_decay_fe;
  m.prep_error_e = 0.01;
  m.alpha_sq = 4.0;
  m.kappa2 = kTwoPi * 50e3;
  m.dissipation_time = 10.0 / m.kappa2;
  m.chi_gf = kTwoPi / m.gate_time;
  m.chi_ge = ratio * m.chi_gf;
  return m;
}

TEST(Cx, IdealGateDoesNotFlip) {
  CxModel m = device_scale_cx(1.0);
  m.ancilla_decay_fe = m.ancilla_decay_eg = 0.0;
  m.prep_error_e = 0.0;
  EXPECT_LT(cx2_bitflip_probability(m, FockSpace{26}), 1e-6);
}

TEST(Cx, DoubleDecayEstimate) {
  // Probability of f -> e -> g within one CX is about (2 p_e T_CX / 1.25 us)^2.
  CxModel m = device_scale_cx(1.0);
  m.prep_error_e = 0.0;
  const double estimate = std::pow(2.0 * 0.05 * 400e-9 / 1.25e-6, 2);
  const double p = cx2_bitflip_probability(m, FockSpace{26});
  EXPECT_GT(p, estimate / 3.0);
  EXPECT_LT(p, estimate * 3.0);
}

TEST(Cx, MismatchPlateau) {
  const double matched = cx2_bitflip_probability(device_scale_cx(1.0), FockSpace{26});
  for (double r : {0.9, 1.1}) {
    const double p = cx2_bitflip_probability(device_scale_cx(r), FockSpace{26});
    EXPECT_LT(std::max(p, matched) / std::min(p, matched), 2.0) << r;
  }
  EXPECT_GT(cx2_bitflip_probability(device_scale_cx(1.3), FockSpace{26}), 5.0 * matched);
}

TEST(Cx, ValidatesModel) {
  CxModel m = device_scale_cx(1.0);
  m.prep_error_e = 1.5;
  EXPECT_THROW(cx2_bitflip_probability(m, FockSpace{10}), DomainError);
  m = device_scale_cx(1.0);
  m.kappa2 = 0.0;
  EXPECT_THROW(cx2_bitflip_probability(m, FockSpace{10}), DomainError);
}

}  // namespace
