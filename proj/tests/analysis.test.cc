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
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "catrep/analysis.hpp"
#include "catrep/errors.hpp"

namespace {

using namespace catrep;
using namespace catrep::analysis;

TEST(BetaPosterior, NoDataIsUniform) {
  auto p = beta_posterior(0, 0.3);
  EXPECT_EQ(p.a, 1.0);
  EXPECT_EQ(p.b, 1.0);
  EXPECT_EQ(p.mean(), 0.5);
  EXPECT_NEAR(p.stddev(), std::sqrt(1.0 / 12.0), 1e-15);
}

TEST(BetaPosterior, HundredShots) {
  auto p = beta_posterior(100, 0.1);
  EXPECT_NEAR(p.a, 11.0, 1e-12);
  EXPECT_NEAR(p.b, 91.0, 1e-12);
  EXPECT_NEAR(p.mean(), 11.0 / 102.0, 1e-15);
}

TEST(BetaPosterior, StddevMatchesSampling) {
  // Beta(a, b) as X / (X + Y) with gamma-distributed X, Y.
  std::mt19937_64 rng(42);
  std::gamma_distribution<double> ga(11.0, 1.0), gb(91.0, 1.0);
  const int n = 400000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = ga(rng), y = gb(rng);
    const double v = x / (x + y);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  auto p = beta_posterior(100, 0.1);
  EXPECT_NEAR(p.stddev() / sd, 1.0, 0.01);
  EXPECT_NEAR(p.mean(), mean, 5 * sd / std::sqrt(double(n)));
}

TEST(BetaPosterior, RejectsInvalidMean) {
  EXPECT_THROW(beta_posterior(10, -0.1), DomainError);
  EXPECT_THROW(beta_posterior(10, 1.5), DomainError);
}

TEST(ObservableEstimate, LinearInPosterior) {
  EXPECT_NEAR(observable_estimate(beta_posterior(0, 0.5)).value, 0.0, 1e-15);
  EXPECT_NEAR(observable_estimate(BetaPosterior{1e-12, 1.0}).value, 1.0, 1e-11);
  // Synthetic counts: 2000 of 10000 shots flipped.
  auto p = beta_posterior(10000, 0.2);
  auto e = observable_estimate(p);
  EXPECT_NEAR(e.value, 1.0 - 2.0 * 2001.0 / 10002.0, 1e-14);
  EXPECT_NEAR(e.sigma, 2.0 * std::sqrt(0.2 * 0.8 / 10000.0), 2e-5);
}

std::vector<DecayPoint> synthetic(double amp, double tau, double offset, int n, double dt, double sigma) {
  std::vector<DecayPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    pts.push_back({t, amp * std::exp(-t / tau) + offset, sigma});
  }
  return pts;
}

TEST(FitExponential, RecoversNoiselessDecay) {
  auto pts = synthetic(0.9, 50.0, 0.0, 12, 10.0, 0.01);
  auto f = fit_exponential(pts, false);
  EXPECT_NEAR(f.decay_time, 50.0, 50.0 * 1e-8);
  EXPECT_NEAR(f.amplitude, 0.9, 1e-8);
  EXPECT_EQ(f.offset, 0.0);
  EXPECT_LT(f.chi2, 1e-12);
}

TEST(FitExponential, RecoversOffsetWhenEnabled) {
  auto pts = synthetic(0.9, 50.0, 0.03, 20, 10.0, 0.01);
  auto f = fit_exponential(pts, true);
  EXPECT_NEAR(f.offset, 0.03, 1e-8);
  EXPECT_NEAR(f.decay_time, 50.0, 1e-6);
}

TEST(FitExponential, IgnoringOffsetOverestimatesLifetime) {
  auto pts = synthetic(0.9, 50.0, 0.03, 20, 10.0, 0.01);
  EXPECT_GT(fit_exponential(pts, false).decay_time, 50.0 * 1.01);
}

TEST(FitExponential, ScaleEquivariantInTime) {
  auto pts = synthetic(0.8, 30.0, 0.0, 10, 5.0, 0.02);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.02);
  for (auto &p : pts) p.value += noise(rng);
  auto base = fit_exponential(pts, false);
  for (auto &p : pts) p.t *= 2.8e-6;
  auto scaled = fit_exponential(pts, false);
  EXPECT_NEAR(scaled.decay_time / (base.decay_time * 2.8e-6), 1.0, 1e-8);
  EXPECT_NEAR(scaled.decay_time_sigma() / (base.decay_time_sigma() * 2.8e-6), 1.0, 1e-6);
}

TEST(FitExponential, UncertaintyIsCalibrated) {
  // Repeated noisy fits: the spread of T matches the reported sigma.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> taus, sigmas;
  for (int rep = 0; rep < 400; ++rep) {
    auto pts = synthetic(0.95, 40.0, 0.0, 10, 8.0, 0.01);
    for (auto &p : pts) p.value += noise(rng);
    auto f = fit_exponential(pts, false);
    taus.push_back(f.decay_time);
    sigmas.push_back(f.decay_time_sigma());
  }
  const double mean = std::accumulate(taus.begin(), taus.end(), 0.0) / taus.size();
  double var = 0;
  for (double t : taus) var += (t - mean) * (t - mean);
  const double spread = std::sqrt(var / (taus.size() - 1));
  const double reported = std::accumulate(sigmas.begin(), sigmas.end(), 0.0) / sigmas.size();
  EXPECT_NEAR(spread / reported, 1.0, 0.15);
  EXPECT_NEAR(mean, 40.0, 4 * spread / std::sqrt(double(taus.size())));
}

TEST(FitExponential, RejectsBadInput) {
  auto pts = synthetic(0.9, 50.0, 0.0, 3, 10.0, 0.01);
  EXPECT_THROW(fit_exponential(pts, true), InputError);
  auto ok = synthetic(0.9, 50.0, 0.0, 5, 10.0, 0.01);
  ok[2].sigma = 0.0;
  EXPECT_THROW(fit_exponential(ok, false), InputError);
}

TEST(FitPowerLaw, RecoversExponent) {
  std::vector<PowerLawPoint> pts;
  for (double x : {1.0, 1.5, 2.0, 3.0, 4.0}) pts.push_back({x, 0.002 * std::pow(x, 3.0), 0.0});
  auto f = fit_power_law(pts);
  EXPECT_NEAR(f.gamma, 3.0, 1e-12);
  EXPECT_EQ(f.num_points, 4);
  EXPECT_NEAR(f.log_prefactor, std::log(0.002), 1e-12);
  for (auto &p : pts) p.eps *= 17.0;
  EXPECT_NEAR(fit_power_law(pts).gamma, 3.0, 1e-12);
}

TEST(FitPowerLaw, WeightedSigmaFromScatter) {
  std::vector<PowerLawPoint> pts;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.02);
  for (double x = 1.5; x <= 4.0; x += 0.25) {
    const double e = 0.01 * std::pow(x, 2.3);
    pts.push_back({x, e * (1 + n(rng)), 0.02 * e});
  }
  auto f = fit_power_law(pts);
  EXPECT_NEAR(f.gamma, 2.3, 4 * f.gamma_sigma);
  EXPECT_GT(f.gamma_sigma, 0.0);
  EXPECT_LT(f.gamma_sigma, 0.1);
}

TEST(FitPowerLaw, NeedsThreePoints) {
  std::vector<PowerLawPoint> pts{{1.0, 0.1}, {2.0, 0.2}, {3.0, 0.3}};
  EXPECT_THROW(fit_power_law(pts), InputError);
  pts.push_back({4.0, -1.0});
  EXPECT_THROW(fit_power_law(pts), DomainError);
}

TEST(ErrorBudget, LinearContributions) {
  const std::vector<double> c{2.0, 0.5, 7.0};
  auto fn = [&](const std::vector<double> &x) {
    return EpsEvaluation{c[0] * x[0] + c[1] * x[1] + c[2] * x[2]};
  };
  const std::vector<double> a{0.01, 0.04, 0.002};
  auto b = error_budget(fn, a, {"one", "two", "three"});
  ASSERT_EQ(b.items.size(), 3u);
  for (size_t i = 0; i < 3; ++i) EXPECT_NEAR(b.items[i].contribution, c[i] * a[i], 1e-15);
  EXPECT_EQ(b.items[1].label, "two");
  EXPECT_NEAR(b.sum(), b.nominal, 1e-15);
}

TEST(ErrorBudget, QuadraticSumIsExact) {
  // eps(x) = b.x + x^T C x, with eps(0) = 0.
  const std::vector<double> lin{0.3, 0.0, 1.2, 0.7};
  const double C[4][4] = {{4, 1, 0, 2}, {1, 3, 0.5, 0}, {0, 0.5, 6, 1}, {2, 0, 1, 1}};
  auto fn = [&](const std::vector<double> &x) {
    double e = 0;
    for (int i = 0; i < 4; ++i) {
      e += lin[i] * x[i];
      for (int j = 0; j < 4; ++j) e += x[i] * C[i][j] * x[j];
    }
    return EpsEvaluation{e};
  };
  const std::vector<double> a{0.02, 0.05, 0.01, 0.03};
  auto b = error_budget(fn, a, {"a", "b", "c", "d"});
  EXPECT_NEAR(b.sum(), b.nominal, 1e-15);
  // Each term is a_i (b_i + (C a)_i).
  for (int i = 0; i < 4; ++i) {
    double ca = 0;
    for (int j = 0; j < 4; ++j) ca += C[i][j] * a[j];
    EXPECT_NEAR(b.items[i].contribution, a[i] * (lin[i] + ca), 1e-15);
  }
}

TEST(ErrorBudget, PermutationInvariant) {
  auto fn = [](const std::vector<double> &x) { return EpsEvaluation{x[0] * x[0] + 3 * x[1] + x[0] * x[2]}; };
  auto swapped = [](const std::vector<double> &x) { return EpsEvaluation{x[2] * x[2] + 3 * x[0] + x[2] * x[1]}; };
  auto b1 = error_budget(fn, {0.1, 0.2, 0.3}, {"p", "q", "r"});
  auto b2 = error_budget(swapped, {0.2, 0.3, 0.1}, {"q", "r", "p"});
  EXPECT_NEAR(b1.items[0].contribution, b2.items[2].contribution, 1e-15);
  EXPECT_NEAR(b1.items[1].contribution, b2.items[0].contribution, 1e-15);
  EXPECT_NEAR(b1.items[2].contribution, b2.items[1].contribution, 1e-15);
}

TEST(ErrorBudget, NoisyStepIsRejected) {
  auto fn = [](const std::vector<double> &x) { return EpsEvaluation{x[0], 0.01}; };
  EXPECT_THROW(error_budget(fn, {0.05}, {"noisy"}), NumericError);
  auto quiet = [](const std::vector<double> &x) { return EpsEvaluation{x[0], 1e-6}; };
  EXPECT_NO_THROW(error_budget(quiet, {0.05}, {"quiet"}));
}

TEST(ErrorBudget, ValidatesArguments) {
  auto fn = [](const std::vector<double> &x) { return EpsEvaluation{x[0]}; };
  EXPECT_THROW(error_budget(fn, {0.1, 0.2}, {"x"}), InputError);
  EXPECT_THROW(error_budget(fn, {0.1}, {"x"}, BudgetOptions{0.7, 5}), DomainError);
  auto b = error_budget(fn, {0.0}, {"x"});
  EXPECT_EQ(b.items[0].contribution, 0.0);
}

}  // namespace
