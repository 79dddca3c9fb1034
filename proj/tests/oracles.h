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

// Test-only reference computations that do not go through the library's
// spectral cache or Volterra solver.

#ifndef HSGD_TESTS_ORACLES_H_
#define HSGD_TESTS_ORACLES_H_

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "hsgd/problem.h"
#include "hsgd/schedule.h"

namespace hsgd::testing {

// First two moments of linearized HSGD per eigenmode of Sigma, obtained by
// integrating the closed moment ODE with an adaptive Runge-Kutta method:
//   m_i' = -gamma (lambda_i m_i - mu_i xt_i),
//   v_i' = -2 gamma lambda_i v_i + gamma^2 (2 P mu_i + sigma^2) / d,
//   P = 1/2 sum_i mu_i ((m_i - xt_i)^2 + v_i) + 1/2 E w^2.
struct MomentOracle {
  Eigen::VectorXd mu;       // eigenvalues of Sigma
  Eigen::MatrixXd basis;    // eigenvectors of Sigma
  Eigen::VectorXd truth;    // ground truth in that basis
  double delta = 0.0;
  double noise_half = 0.0;  // E w^2 / 2
  double sigma = 0.0;
  double d = 1.0;

  MomentOracle(const ProblemInstance& instance, double noise_sigma)
      : delta(instance.delta),
        noise_half(0.5 * instance.noise_second_moment),
        sigma(noise_sigma),
        d(static_cast<double>(instance.dim)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(instance.covariance);
    mu = solver.eigenvalues().cwiseMax(0.0);
    basis = solver.eigenvectors();
    truth = basis.transpose() * instance.ground_truth;
  }

  double Risk(const std::vector<double>& state) const {
    const Eigen::Index n = mu.size();
    double p = noise_half;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double gap = state[i] - truth(i);
      p += 0.5 * mu(i) * (gap * gap + state[n + i]);
    }
    return p;
  }

  // Returns the state [mean (d), variance (d)] at each requested time.
  std::vector<std::vector<double>> Solve(const Schedule& schedule,
                                         const Eigen::VectorXd& x0,
                                         const std::vector<double>& times) const {
    namespace odeint = boost::numeric::odeint;
    const Eigen::Index n = mu.size();
    std::vector<double> state(2 * n, 0.0);
    const Eigen::VectorXd y0 = basis.transpose() * x0;
    for (Eigen::Index i = 0; i < n; ++i) state[i] = y0(i);
    auto rhs = [&](const std::vector<double>& x, std::vector<double>& dx,
                   double t) {
      const double g = schedule.Rate(t);
      const double p = Risk(x);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double lambda = mu(i) + delta;
        dx[i] = -g * (lambda * x[i] - mu(i) * truth(i));
        dx[n + i] = -2.0 * g * lambda * x[n + i] +
                    g * g * (2.0 * p * mu(i) + sigma * sigma) / d;
      }
    };
    std::vector<std::vector<double>> out;
    double now = 0.0;
    for (const double t : times) {
      if (t > now) {
        odeint::integrate_adaptive(
            odeint::make_controlled<odeint::runge_kutta_dopri5<std::vector<double>>>(
                1e-12, 1e-12),
            rhs, state, now, t, 1e-3);
        now = t;
      }
      out.push_back(state);
    }
    return out;
  }
};

}  // namespace hsgd::testing

#endif  // HSGD_TESTS_ORACLES_H_
