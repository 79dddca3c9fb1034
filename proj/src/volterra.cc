// Copyright 2026 The hsgd Authors.
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

#include "hsgd/volterra.h"

#include <algorithm>
#include <cmath>

namespace hsgd {

double RiskCurves::InterpolateP(double t) const {
  const std::size_t j = Cell(t);
  if (t <= grid[j]) return P(j);
  const double w = (t - grid[j]) / (grid[j + 1] - grid[j]);
  return (1.0 - w) * P(j) + w * P(j + 1);
}

std::size_t RiskCurves::Cell(double t) const {
  if (t < 0.0 || t > horizon() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kHorizonExceeded,
                "time " + std::to_string(t) + " outside [0, " +
                    std::to_string(horizon()) + "]");
  }
  if (grid.size() == 1) return 0;
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  std::size_t j = static_cast<std::size_t>(it - grid.begin());
  j = j == 0 ? 0 : j - 1;
  return std::min(j, grid.size() - 2);
}

std::vector<double> UniformGrid(double horizon, double step) {
  if (!(step > 0.0) || !(horizon >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs step > 0, T >= 0");
  }
  std::vector<double> grid{0.0};
  const auto cells = static_cast<std::int64_t>(std::ceil(horizon / step - 1e-9));
  for (std::int64_t j = 1; j < cells; ++j) grid.push_back(j * step);
  if (horizon > 0.0) grid.push_back(horizon);
  return grid;
}

void ProductWeights(double x, double& w0, double& w1) {
  if (x < 0.1) {
    // Power series of both integrals; 14 terms reach roundoff at x = 0.1.
    double term = 1.0;  // (-x)^k / k!
    w0 = 0.0;
    w1 = 0.0;
    for (int k = 0; k < 14; ++k) {
      w0 += term / (k + 2);
      w1 += term / ((k + 1.0) * (k + 2.0));
      term *= -x / (k + 1);
    }
    return;
  }
  const double one_minus = -std::expm1(-x);
  w0 = (one_minus - x * std::exp(-x)) / (x * x);
  w1 = one_minus / x - w0;
}

namespace {

RiskCurves SolveProduct(const ProblemInstance& instance,
                        const SpectralCache& cache, const Schedule& schedule,
                        const Vector& x0, double sigma,
                        const std::vector<double>& grid) {
  const Eigen::Index d = cache.dim();
  const double inv_d = 1.0 / static_cast<double>(d);
  const Eigen::ArrayXd mu = cache.sigma_eigvals().array();
  const Eigen::ArrayXd lambda = cache.eigvals().array();
  const EigenRisk risk(instance, cache);
  const std::size_t m = grid.size();

  RiskCurves curves;
  curves.grid = grid;
  curves.sigma = sigma;
  curves.P.resize(static_cast<Eigen::Index>(m));
  curves.R.resize(static_cast<Eigen::Index>(m));
  curves.P(0) = PopulationRisk(instance, x0, false);
  curves.R(0) = PopulationRisk(instance, x0, true);

  // Per-mode accumulators of int gamma^2(s) e^{-2 lambda (Gamma(t)-Gamma(s))}
  // times P_s (yp) or times 1 (y1).
  Eigen::ArrayXd yp = Eigen::ArrayXd::Zero(d);
  Eigen::ArrayXd y1 = Eigen::ArrayXd::Zero(d);
  Eigen::ArrayXd w0(d), w1(d), decay(d);
  const double half_sigma2 = 0.5 * sigma * sigma;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double h = grid[j + 1] - grid[j];
    const double dgamma = schedule.Integral(grid[j], grid[j + 1]);
    const double g0 = std::pow(schedule.Rate(grid[j]), 2);
    const double g1 = std::pow(schedule.Rate(grid[j + 1]), 2);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double x = 2.0 * lambda(i) * dgamma;
      ProductWeights(x, w0(i), w1(i));
      decay(i) = std::exp(-x);
    }
    const double p_prev = curves.P(static_cast<Eigen::Index>(j));
    y1 = decay * y1 + h * (g0 * w0 + g1 * w1);
    const Eigen::ArrayXd yp_known = decay * yp + h * g0 * p_prev * w0;
    const Vector gf =
        GradientFlowEigen(instance, cache, schedule, x0, grid[j + 1]);
    const double numerator = risk.P(gf) +
                             inv_d * (mu.square() * yp_known).sum() +
                             half_sigma2 * inv_d * (mu * y1).sum();
    const double factor = 1.0 - h * g1 * inv_d * (mu.square() * w1).sum();
    if (!(factor > 0.0)) {
      throw Error(ErrorCode::kUnstableStep,
                  "Volterra diagonal factor " + std::to_string(factor) +
                      " at t=" + std::to_string(grid[j + 1]));
    }
    const double p = numerator / factor;
    yp = yp_known + h * g1 * p * w1;
    const auto next = static_cast<Eigen::Index>(j + 1);
    curves.P(next) = p;
    curves.R(next) = risk.R(gf) + inv_d * (mu * lambda * yp).sum() +
                     half_sigma2 * inv_d * (lambda * y1).sum();
  }
  return curves;
}

RiskCurves SolveTrapezoid(const ProblemInstance& instance,
                          const SpectralCache& cache, const Schedule& schedule,
                          const Vector& x0, double sigma,
                          const std::vector<double>& grid) {
  const EigenRisk risk(instance, cache);
  const std::size_t m = grid.size();
  RiskCurves curves;
  curves.grid = grid;
  curves.sigma = sigma;
  curves.P.resize(static_cast<Eigen::Index>(m));
  curves.R.resize(static_cast<Eigen::Index>(m));
  curves.P(0) = PopulationRisk(instance, x0, false);
  curves.R(0) = PopulationRisk(instance, x0, true);
  for (std::size_t j = 1; j < m; ++j) {
    const double t = grid[j];
    double sum_p = 0.0, sum_r = 0.0;
    for (std::size_t k = 0; k <= j; ++k) {
      const double left = k > 0 ? grid[k] - grid[k - 1] : 0.0;
      const double right = k < j ? grid[k + 1] - grid[k] : 0.0;
      const double weight = 0.5 * (left + right);
      const KernelPair kp = KernelTraces(cache, schedule, t, grid[k], sigma,
                                         KernelHessian::kPopulation);
      const KernelPair kr = KernelTraces(cache, schedule, t, grid[k], sigma,
                                         KernelHessian::kRegularized);
      sum_p += weight * kp.gp;
      sum_r += weight * kr.gp;
      if (k < j) {
        const double pk = curves.P(static_cast<Eigen::Index>(k));
        sum_p += weight * kp.g * pk;
        sum_r += weight * kr.g * pk;
      }
    }
    const Vector gf = GradientFlowEigen(instance, cache, schedule, x0, t);
    const double diag_weight = 0.5 * (grid[j] - grid[j - 1]);
    const KernelPair kp =
        KernelTraces(cache, schedule, t, t, sigma, KernelHessian::kPopulation);
    const KernelPair kr =
        KernelTraces(cache, schedule, t, t, sigma, KernelHessian::kRegularized);
    const double factor = 1.0 - diag_weight * kp.g;
    if (!(factor > 0.0)) {
      throw Error(ErrorCode::kUnstableStep,
                  "Volterra diagonal factor " + std::to_string(factor) +
                      " at t=" + std::to_string(t));
    }
    const double p = (risk.P(gf) + sum_p) / factor;
    const auto idx = static_cast<Eigen::Index>(j);
    curves.P(idx) = p;
    curves.R(idx) = risk.R(gf) + sum_r + diag_weight * kr.g * p;
  }
  return curves;
}

}  // namespace

RiskCurves SolveVolterra(const ProblemInstance& instance,
                         const SpectralCache& cache, const Schedule& schedule,
                         const Vector& x0, double sigma, double horizon,
                         double grid_step, VolterraMethod method) {
  if (x0.size() != instance.d() || cache.dim() != instance.d()) {
    throw Error(ErrorCode::kDimensionMismatch, "x0 or cache has wrong size");
  }
  if (!(sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be nonnegative");
  }
  const std::vector<double> grid = UniformGrid(horizon, grid_step);
  RiskCurves curves =
      method == VolterraMethod::kProductTrapezoid
          ? SolveProduct(instance, cache, schedule, x0, sigma, grid)
          : SolveTrapezoid(instance, cache, schedule, x0, sigma, grid);
  Fingerprint fp;
  fp.Add(std::string_view(instance.Hash())).Add(std::string_view(schedule.Describe()));
  fp.Add(sigma).Add(x0).Add(horizon).Add(grid_step);
  fp.Add(static_cast<std::int64_t>(method));
  curves.inputs_hash = fp.Hex();
  return curves;
}

}  // namespace hsgd
