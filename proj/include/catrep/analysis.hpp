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

#ifndef CATREP_ANALYSIS_HPP
#define CATREP_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace catrep::analysis {

/// Posterior of a Bernoulli mean under a uniform prior.
struct BetaPosterior {
  double a = 1.0;
  double b = 1.0;

  double mean() const { return a / (a + b); }
  double stddev() const;
};

/// Beta(1 + n mu0, 1 + n - n mu0).
BetaPosterior beta_posterior(uint64_t n, double mu0);

struct Estimate {
  double value;
  double sigma;
};

/// Maps a flip probability mu to the correlator 1 - 2 mu with sigma 2 sigma_mu.
Estimate observable_estimate(const BetaPosterior &posterior);

struct DecayPoint {
  double t;
  double value;
  double sigma;
};

/// value(t) = amplitude exp(-t / decay_time) + offset.
struct DecayFit {
  double amplitude = 0.0;
  double decay_time = 0.0;
  double offset = 0.0;
  bool with_offset = false;
  /// Row-major covariance of (amplitude, decay_time, offset); the offset
  /// row and column are zero without offset.
  std::array<double, 9> covariance{};
  double chi2 = 0.0;
  int iterations = 0;
  std::vector<double> residuals;

  double decay_time_sigma() const;
  double amplitude_sigma() const;
  double offset_sigma() const;
  double operator()(double t) const;
};

/// Weighted nonlinear least squares, residuals scaled by 1/sigma.
///
/// Requires at least 3 points (4 with offset). Throws NumericError with the
/// residuals when the fit does not converge or yields decay_time <= 0.
DecayFit fit_exponential(std::span<const DecayPoint> points, bool with_offset);

struct PowerLawPoint {
  double x;
  double eps;
  /// Standard deviation of eps; zero gives unit weight in log space.
  double sigma = 0.0;
};

struct PowerLawFit {
  double gamma = 0.0;
  double gamma_sigma = 0.0;
  double log_prefactor = 0.0;
  int num_points = 0;
};

/// Weighted linear fit of log eps against log x over points with x >= min_x.
PowerLawFit fit_power_law(std::span<const PowerLawPoint> points, double min_x = 1.5);

struct BudgetItem {
  std::string label;
  double contribution;
};

struct Budget {
  std::vector<BudgetItem> items;
  double nominal = 0.0;

  double sum() const;
};

struct EpsEvaluation {
  double value;
  double std_error = 0.0;
};

using EpsFunction = std::function<EpsEvaluation(const std::vector<double> &)>;

struct BudgetOptions {
  /// Finite-difference half-step as a fraction of a_i.
  double step_fraction = 0.25;
  /// Minimum ratio between the expected change over the step and the noise.
  double noise_factor = 5.0;
};

/// Contribution a_i * d eps / d x_i, by central differences at x = a / 2.
///
/// Throws NumericError if the statistical error of a difference exceeds
/// 1/noise_factor of the change expected across the step.
Budget error_budget(const EpsFunction &eps_fn, const std::vector<double> &nominal,
                    const std::vector<std::string> &labels, const BudgetOptions &opt = {});

}  // namespace catrep::analysis

#endif
