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

#ifndef HSGD_VOLTERRA_H_
#define HSGD_VOLTERRA_H_

#include <string>
#include <vector>

#include "hsgd/common.h"
#include "hsgd/problem.h"
#include "hsgd/schedule.h"
#include "hsgd/spectral.h"

namespace hsgd {

// Deterministic risk trajectories P_t = E P(X_t) and R_t = E R(X_t) of noisy
// HSGD on a time grid.
struct RiskCurves {
  std::vector<double> grid;
  Vector P;
  Vector R;
  double sigma = 0.0;
  std::string inputs_hash;

  double horizon() const { return grid.back(); }
  // Piecewise-linear P between grid points. Throws HorizonExceeded.
  double InterpolateP(double t) const;
  // Index j with grid[j] <= t < grid[j+1] (the last cell for t == horizon).
  std::size_t Cell(double t) const;
};

enum class VolterraMethod {
  // Recursive product integration: on each cell the integrand factor
  // gamma^2 P is linear and the exponential kernel is integrated exactly,
  // one O(d) update per step.
  kProductTrapezoid,
  // Plain trapezoid quadrature of the kernel sums, O(M^2) kernel calls.
  kTrapezoid,
};

// 0, h, 2h, ... with the last point moved to (or appended at) the horizon.
std::vector<double> UniformGrid(double horizon, double step);

// Forward solve of the second-kind Volterra equation for P, then R.
// Throws UnstableStep if the implicit diagonal factor is not positive.
RiskCurves SolveVolterra(
    const ProblemInstance& instance, const SpectralCache& cache,
    const Schedule& schedule, const Vector& x0, double sigma, double horizon,
    double grid_step,
    VolterraMethod method = VolterraMethod::kProductTrapezoid);

// Exact-exponential product weights on a cell of reduced length x:
// w0 = int_0^1 v e^{-x v} dv pairs with the left end, w1 = int_0^1 (1-v)
// e^{-x v} dv with the right end.
void ProductWeights(double x, double& w0, double& w1);

}  // namespace hsgd

#endif  // HSGD_VOLTERRA_H_
