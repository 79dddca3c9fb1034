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

#include "hsgd/spectral.h"

#include <unsupported/Eigen/MatrixFunctions>

#include <gtest/gtest.h>

#include "hsgd/problem.h"
#include "hsgd/rng.h"
#include "hsgd/schedule.h"

namespace hsgd {
namespace {

Matrix RandomCovariance(Eigen::Index d, std::uint64_t seed) {
  GaussianStream normal(seed);
  Matrix g(d, d);
  normal.Fill(g);
  return g * g.transpose() / static_cast<double>(d);
}

TEST(SpectralCacheTest, ReconstructsShiftedCovariance) {
  const Matrix sigma = RandomCovariance(7, 3);
  const SpectralCache cache = SpectralCache::Build(sigma, 0.2);
  const Matrix a = cache.FromEigenDiag(cache.eigvals());
  EXPECT_LT((a - sigma - 0.2 * Matrix::Identity(7, 7)).norm(), 1e-12);
  EXPECT_LT((cache.FromEigenDiag(cache.sigma_eigvals()) - sigma).norm(), 1e-12);
  const Vector x = Vector::LinSpaced(7, -1.0, 2.0);
  EXPECT_LT((cache.FromEigen(cache.ToEigen(x)) - x).norm(), 1e-13);
}

TEST(SpectralCacheTest, RejectsInvalidCovariances) {
  Matrix asym = Matrix::Identity(3, 3);
  asym(0, 1) = 0.5;
  try {
    SpectralCache::Build(asym, 0.0);
    FAIL() << "expected NotSymmetric";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotSymmetric);
  }
  Matrix indefinite = Matrix::Identity(3, 3);
  indefinite(2, 2) = -0.5;
  try {
    SpectralCache::Build(indefinite, 0.1);
    FAIL() << "expected NegativeEigenvalue";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeEigenvalue);
  }
}

TEST(TransitionTest, MatchesMatrixExponential) {
  const Matrix sigma = RandomCovariance(6, 11);
  const double delta = 0.3;
  const SpectralCache cache = SpectralCache::Build(sigma, delta);
  const Schedule schedule = Schedule::Tabulated({0.0, 1.0, 2.0}, {2.0, 0.5, 1.5});
  const Matrix a = sigma + delta * Matrix::Identity(6, 6);
  for (const auto& [t, s] : {std::pair{1.5, 0.2}, std::pair{2.5, 0.0},
                             std::pair{0.7, 0.7}}) {
    const Matrix oracle = Matrix(-schedule.Integral(s, t) * a).exp();
    EXPECT_LT((Transition(cache, schedule, t, s) - oracle).norm(), 1e-12);
  }
  try {
    TransitionDiag(cache, schedule, 0.1, 0.5);
    FAIL() << "expected TimeOrder";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTimeOrder);
  }
}

TEST(KernelTracesTest, MatchesDenseTraces) {
  const Eigen::Index d = 9;
  const Matrix sigma = RandomCovariance(d, 5);
  const double delta = 0.1;
  const SpectralCache cache = SpectralCache::Build(sigma, delta);
  const Schedule schedule = Schedule::Tabulated({0.0, 3.0}, {1.0, 4.0});
  const double t = 2.0, s = 0.5, noise = 1.3;
  const Matrix a = sigma + delta * Matrix::Identity(d, d);
  const Matrix phi = Matrix(-schedule.Integral(s, t) * a).exp();
  const Matrix phi2 = phi * phi;
  const double g2 = schedule.Rate(s) * schedule.Rate(s);
  const double dd = static_cast<double>(d);

  const KernelPair pop = KernelTraces(cache, schedule, t, s, noise);
  EXPECT_NEAR(pop.g, g2 / dd * (sigma * sigma * phi2).trace(), 1e-13);
  EXPECT_NEAR(pop.gp, noise * noise * g2 / (2 * dd) * (sigma * phi2).trace(),
              1e-13);

  const KernelPair reg =
      KernelTraces(cache, schedule, t, s, noise, KernelHessian::kRegularized);
  EXPECT_NEAR(reg.g, g2 / dd * (sigma * a * phi2).trace(), 1e-13);
  EXPECT_NEAR(reg.gp, noise * noise * g2 / (2 * dd) * (a * phi2).trace(), 1e-13);
}

}  // namespace
}  // namespace hsgd
