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

#include "catrep/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "catrep/errors.hpp"

namespace catrep::analysis {

double BetaPosterior::stddev() const {
  const double s = a + b;
  return std::sqrt(a * b / (s * s * (s + 1.0)));
}

BetaPosterior beta_posterior(uint64_t n, double mu0) {
  if (!(mu0 >= 0.0 && mu0 <= 1.0)) throw DomainError("beta_posterior: mu0 outside [0, 1]");
  const double k = double(n) * mu0;
  return {1.0 + k, 1.0 + double(n) - k};
}

Estimate observable_estimate(const BetaPosterior &posterior) {
  return {1.0 - 2.0 * posterior.mean(), 2.0 * posterior.stddev()};
}

double DecayFit::decay_time_sigma() const { return std::sqrt(std::max(0.0, covariance[4])); }
double DecayFit::amplitude_sigma() const { return std::sqrt(std::max(0.0, covariance[0])); }
double DecayFit::offset_sigma() const { return std::sqrt(std::max(0.0, covariance[8])); }
double DecayFit::operator()(double t) const { return amplitude * std::exp(-t / decay_time) + offset; }

namespace {

[[noreturn]] void fit_failure(const std::string &why, const std::vector<double> &residuals) {
  std::ostringstream os;
  os << "fit_exponential: " << why << "; residuals:";
  os.precision(6);
  for (double r : residuals) os << " " << r;
  throw NumericError(os.str());
}

struct LogLinear {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_var = 0.0;
  int n = 0;
};

// Weighted least squares for y = intercept + slope x. When `absolute` is
// false the parameter variance is rescaled by the reduced chi-square.
LogLinear weighted_line(const std::vector<double> &x, const std::vector<double> &y, const std::vector<double> &w,
                        bool absolute) {
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    s += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  LogLinear out;
  out.n = int(x.size());
  if (!(det > 0)) return out;
  out.slope = (s * sxy - sx * sy) / det;
  out.intercept = (sxx * sy - sx * sxy) / det;
  out.slope_var = s / det;
  if (!absolute) {
    double chi2 = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - out.intercept - out.slope * x[i];
      chi2 += w[i] * r * r;
    }
    out.slope_var *= x.size() > 2 ? chi2 / double(x.size() - 2) : 0.0;
  }
  return out;
}

}  // namespace

DecayFit fit_exponential(std::span<const DecayPoint> points, bool with_offset) {
  const size_t n = points.size();
  const size_t np = with_offset ? 3 : 2;
  if (n < np + 1) throw InputError("fit_exponential: too few points");
  std::vector<DecayPoint> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const DecayPoint &a, const DecayPoint &b) { return a.t < b.t; });
  for (const auto &p : pts) {
    if (!(p.sigma > 0) || !std::isfinite(p.value) || !std::isfinite(p.t)) {
      throw InputError("fit_exponential: sigma must be positive and values finite");
    }
  }

  double offset = 0.0;
  if (with_offset) {
    const size_t tail = std::max<size_t>(1, n / 10);
    for (size_t i = n - tail; i < n; ++i) offset += pts[i].value;
    offset /= double(tail);
  }
  std::vector<double> lx, ly, lw;
  for (const auto &p : pts) {
    const double y = p.value - offset;
    if (y > 0) {
      lx.push_back(p.t);
      ly.push_back(std::log(y));
      lw.push_back(y * y / (p.sigma * p.sigma));
    }
  }
  const double span = pts.back().t - pts.front().t;
  double amp = pts.front().value - offset, tau = span > 0 ? span : 1.0;
  if (lx.size() >= 2) {
    auto line = weighted_line(lx, ly, lw, true);
    if (line.slope < 0) {
      tau = -1.0 / line.slope;
      amp = std::exp(line.intercept);
    }
  }
  if (with_offset && lx.size() < 2) offset = 0.0;

  // Levenberg-Marquardt on (A, log T, B); log T keeps the lifetime positive.
  Eigen::VectorXd theta(np);
  theta(0) = amp;
  theta(1) = std::log(tau);
  if (with_offset) theta(2) = offset;
  auto residuals = [&](const Eigen::VectorXd &th, Eigen::VectorXd &r, Eigen::MatrixXd *J) {
    r.resize(Eigen::Index(n));
    if (J) J->resize(Eigen::Index(n), Eigen::Index(np));
    const double T = std::exp(th(1));
    for (size_t i = 0; i < n; ++i) {
      const double e = std::exp(-pts[i].t / T);
      const double b = with_offset ? th(2) : 0.0;
      const double s = pts[i].sigma;
      r(Eigen::Index(i)) = (th(0) * e + b - pts[i].value) / s;
      if (J) {
        (*J)(Eigen::Index(i), 0) = e / s;
        (*J)(Eigen::Index(i), 1) = th(0) * e * pts[i].t / T / s;
        if (with_offset) (*J)(Eigen::Index(i), 2) = 1.0 / s;
      }
    }
  };
  Eigen::VectorXd r, rn;
  Eigen::MatrixXd J;
  residuals(theta, r, &J);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  int it = 0;
  bool converged = false;
  for (; it < 500; ++it) {
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, cost)) {
      converged = true;
      break;
    }
    bool stepped = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd M = A;
      for (Eigen::Index k = 0; k < M.rows(); ++k) M(k, k) += lambda * std::max(A(k, k), 1e-300);
      const Eigen::VectorXd delta = M.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 10;
        continue;
      }
      Eigen::VectorXd cand = theta + delta;
      residuals(cand, rn, nullptr);
      const double nc = rn.squaredNorm();
      if (std::isfinite(nc) && nc <= cost) {
        const double rel = delta.norm() / (theta.norm() + 1e-300);
        const double improvement = cost - nc;
        theta = cand;
        residuals(theta, r, &J);
        cost = nc;
        lambda = std::max(lambda / 10, 1e-12);
        stepped = true;
        if (rel < 1e-13 || improvement <= 1e-16 * std::max(cost, 1e-300)) converged = true;
        break;
      }
      lambda *= 10;
    }
    if (!stepped) {
      converged = true;
      break;
    }
    if (converged) break;
  }

  std::vector<double> res(size_t(r.size()));
  for (Eigen::Index i = 0; i < r.size(); ++i) res[size_t(i)] = r(i);
  if (!converged || !theta.allFinite()) fit_failure("did not converge", res);
  const double T = std::exp(theta(1));
  if (!(T > 0) || !std::isfinite(T)) fit_failure("non-positive decay time", res);

  DecayFit fit;
  fit.amplitude = theta(0);
  fit.decay_time = T;
  fit.offset = with_offset ? theta(2) : 0.0;
  fit.with_offset = with_offset;
  fit.chi2 = cost;
  fit.iterations = it;
  fit.residuals = res;
  // Covariance in (A, T, B): chain rule from log T.
  Eigen::MatrixXd JtJ = J.transpose() * J;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(JtJ);
  if (lu.isInvertible()) {
    Eigen::MatrixXd C = lu.inverse();
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(Eigen::Index(np));
    scale(1) = T;
    for (size_t i = 0; i < np; ++i) {
      for (size_t j = 0; j < np; ++j) {
        fit.covariance[i * 3 + j] = C(Eigen::Index(i), Eigen::Index(j)) * scale(Eigen::Index(i)) * scale(Eigen::Index(j));
      }
    }
  } else {
    fit_failure("singular normal matrix", res);
  }
  return fit;
}

PowerLawFit fit_power_law(std::span<const PowerLawPoint> points, double min_x) {
  std::vector<double> x, y, w;
  bool weighted = true;
  for (const auto &p : points) {
    if (p.x < min_x) continue;
    if (!(p.x > 0) || !(p.eps > 0)) throw DomainError("fit_power_law: x and eps must be positive");
    if (!(p.sigma > 0)) weighted = false;
  }
  for (const auto &p : points) {
    if (p.x < min_x) continue;
    x.push_back(std::log(p.x));
    y.push_back(std::log(p.eps));
    w.push_back(weighted ? (p.eps * p.eps) / (p.sigma * p.sigma) : 1.0);
  }
  if (x.size() < 3) throw InputError("fit_power_law: need at least 3 points above min_x");
  auto line = weighted_line(x, y, w, weighted);
  PowerLawFit out;
  out.gamma = line.slope;
  out.gamma_sigma = std::sqrt(std::max(0.0, line.slope_var));
  out.log_prefactor = line.intercept;
  out.num_points = line.n;
  return out;
}

double Budget::sum() const {
  double s = 0;
  for (const auto &i : items) s += i.contribution;
  return s;
}

Budget error_budget(const EpsFunction &eps_fn, const std::vector<double> &nominal,
                    const std::vector<std::string> &labels, const BudgetOptions &opt) {
  if (labels.size() != nominal.size()) throw InputError("error_budget: labels and nominal differ in length");
  if (!(opt.step_fraction > 0 && opt.step_fraction <= 0.5)) {
    throw DomainError("error_budget: step_fraction must lie in (0, 0.5]");
  }
  Budget out;
  const EpsEvaluation full = eps_fn(nominal);
  out.nominal = full.value;
  std::vector<double> half(nominal.size());
  for (size_t i = 0; i < nominal.size(); ++i) half[i] = nominal[i] / 2;
  for (size_t i = 0; i < nominal.size(); ++i) {
    const double a = nominal[i];
    if (a == 0.0) {
      out.items.push_back({labels[i], 0.0});
      continue;
    }
    const double h = opt.step_fraction * a;
    auto xp = half, xm = half;
    xp[i] += h;
    xm[i] -= h;
    const EpsEvaluation ep = eps_fn(xp);
    const EpsEvaluation em = eps_fn(xm);
    const double s_delta = std::hypot(ep.std_error, em.std_error);
    const double expected = 2 * h * std::abs(full.value) / a;
    if (s_delta > 0 && opt.noise_factor * s_delta > expected) {
      std::ostringstream os;
      os << "error_budget: step for '" << labels[i] << "' is within noise (difference error " << s_delta
         << ", expected change " << expected << ")";
      throw NumericError(os.str());
    }
    out.items.push_back({labels[i], a * (ep.value - em.value) / (2 * h)});
  }
  return out;
}

}  // namespace catrep::analysis
