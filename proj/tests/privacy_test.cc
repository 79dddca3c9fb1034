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

#include "hsgd/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "hsgd/law.h"
#include "hsgd/problem.h"
#include "hsgd/rng.h"
#include "hsgd/schedule.h"
#include "hsgd/spectral.h"
#include "hsgd/volterra.h"

namespace hsgd {
namespace {

GaussianLaw<double> Law1d(double mean, double var) {
  GaussianLaw<double> law;
  law.mean = Vector::Constant(1, mean);
  law.cov = Matrix::Constant(1, 1, var);
  return law;
}

// (1/(alpha-1)) ln int p^alpha q^(1-alpha), integrated in log space around
// the densities' bulk.
double QuadratureRenyi1d(double m1, double v1, double m2, double v2,
                         double alpha) {
  auto integrand = [&](double x) {
    const double lp = -0.5 * (x - m1) * (x - m1) / v1 - 0.5 * std::log(2 * M_PI * v1);
    const double lq = -0.5 * (x - m2) * (x - m2) / v2 - 0.5 * std::log(2 * M_PI * v2);
    return std::exp(alpha * lp + (1.0 - alpha) * lq);
  };
  const double inf = std::numeric_limits<double>::infinity();
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -inf, inf, 20, 1e-14, &error);
  return std::log(value) / (alpha - 1.0);
}

TEST(RenyiGaussianTest, IdenticalLawsGiveZero) {
  GaussianStream normal(4);
  Matrix g(5, 5);
  normal.Fill(g);
  GaussianLaw<double> law{normal.Draw(5), g * g.transpose() + Matrix::Identity(5, 5)};
  EXPECT_NEAR(RenyiGaussian(law, law, 3.0), 0.0, 1e-10);
}

TEST(RenyiGaussianTest, GaussianMechanism) {
  const double s2 = 0.7;
  GaussianLaw<double> a{Vector::Zero(4), s2 * Matrix::Identity(4, 4)};
  GaussianLaw<double> b{Vector::LinSpaced(4, 0.1, 0.4), s2 * Matrix::Identity(4, 4)};
  for (const double alpha : {1.5, 2.0, 10.0}) {
    EXPECT_NEAR(RenyiGaussian(a, b, alpha),
                alpha * b.mean.squaredNorm() / (2 * s2), 1e-13);
  }
}

TEST(RenyiGaussianTest, MatchesDensityQuadrature) {
  Philox4x32 engine(12);
  std::uniform_real_distribution<double> mean(-1.0, 1.0), var(0.5, 2.0);
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    const double m1 = mean(engine), m2 = mean(engine);
    const double v1 = var(engine), v2 = var(engine);
    for (const double alpha : {1.5, 2.0, 8.0}) {
      if (!(alpha * v2 + (1 - alpha) * v1 > 0.0)) continue;
      const double oracle = QuadratureRenyi1d(m1, v1, m2, v2, alpha);
      EXPECT_NEAR(RenyiGaussian(Law1d(m1, v1), Law1d(m2, v2), alpha), oracle, 1e-8)
          << m1 << " " << v1 << " " << m2 << " " << v2 << " " << alpha;
      ++checked;
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(RenyiGaussianTest, ExtendedPrecisionAgrees) {
  GaussianStream normal(8);
  Matrix g1(6, 6), g2(6, 6);
  normal.Fill(g1);
  normal.Fill(g2);
  GaussianLaw<double> a{normal.Draw(6), g1 * g1.transpose() + 3 * Matrix::Identity(6, 6)};
  GaussianLaw<double> b{normal.Draw(6), a.cov + 0.1 * g2 * g2.transpose()};
  GaussianLaw<long double> al{a.mean.cast<long double>(), a.cov.cast<long double>()};
  GaussianLaw<long double> bl{b.mean.cast<long double>(), b.cov.cast<long double>()};
  const double d = RenyiGaussian(a, b, 2.5);
  EXPECT_GT(d, 0.0);
  EXPECT_NEAR(static_cast<double>(RenyiGaussian<long double>(al, bl, 2.5L)), d,
              1e-12 * d);
}

TEST(RenyiGaussianTest, MixtureNotPositiveDefinite) {
  try {
    RenyiGaussian(Law1d(0.0, 3.0), Law1d(0.0, 1.0), 2.0);
    FAIL() << "expected MixtureNotPD";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMixtureNotPD);
  }
  // The reverse direction is finite.
  EXPECT_TRUE(std::isfinite(RenyiGaussian(Law1d(0.0, 1.0), Law1d(0.0, 3.0), 2.0)));
  EXPECT_THROW(RenyiGaussian(Law1d(0.0, 1.0), Law1d(0.0, 1.0), 1.0), Error);
}

TEST(RenyiGaussianTest, ReportsJitter) {
  GaussianLaw<double> a{Vector::Zero(2), Matrix::Zero(2, 2)};
  a.cov(0, 0) = 1.0;
  GaussianLaw<double> b{Vector::Zero(2), Matrix::Identity(2, 2)};
  RenyiInfo info;
  RenyiGaussian(a, b, 1.5, &info);
  EXPECT_GT(info.jitter1, 0.0);
  EXPECT_EQ(info.jitter2, 0.0);
}

TEST(MixtureBoundTest, ReducesToExplicitSum) {
  EXPECT_NEAR(MixtureBound({1.0}, {0.37}, 3.0), 0.37, 1e-15);
  EXPECT_NEAR(MixtureBound({0.5, 0.5}, {0.0, 0.0}, 2.0), 0.0, 1e-15);
  const std::vector<double> w{0.2, 0.3, 0.5}, d{0.1, 1.5, 0.7};
  const double alpha = 4.0;
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) sum += w[k] * std::exp((alpha - 1) * d[k]);
  EXPECT_NEAR(MixtureBound(w, d, alpha), std::log(sum) / (alpha - 1), 1e-14);
  // Large divergences stay finite through log-sum-exp.
  EXPECT_NEAR(MixtureBound({0.5, 0.5}, {2000.0, 2000.0}, 2.0), 2000.0, 1e-9);
}

std::optional<double> Evaluate(const PrivacyModel& model, const NeighborPair& pair,
                               double alpha, const ReleaseSpec& spec, double s) {
  try {
    return model.Divergence(pair, alpha, spec, s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMixtureNotPD) throw;
    return std::nullopt;
  }
}

class PrivacyTest : public ::testing::Test {
 protected:
  PrivacyTest()
      : instance_(GenerateSynthetic(10, 15, 0.5, 0.1, 31)),
        cache_(SpectralCache::Build(instance_.covariance, instance_.delta)),
        schedule_(Schedule::Constant(4.0)),
        x0_(Vector::Zero(10)),
        curves_(SolveVolterra(instance_, cache_, schedule_, x0_, sigma_, 1.5, 0.01)),
        track_(instance_, cache_, schedule_, curves_, x0_, sigma_) {}

  NeighborPair Pair(Eigen::Index i, Eigen::Index j) const {
    return {instance_.design.row(i).transpose(), instance_.labels(i),
            instance_.design.row(j).transpose(), instance_.labels(j)};
  }

  const double sigma_ = 0.8;
  ProblemInstance instance_;
  SpectralCache cache_;
  Schedule schedule_;
  Vector x0_;
  RiskCurves curves_;
  LawTrack track_;
};

TEST_F(PrivacyTest, DifferentiatingUpdateIsExplicit) {
  const NeighborPair p = Pair(2, 5);
  const DifferentiatingUpdate u =
      DifferentiatingUpdate::Build(instance_, schedule_, p, sigma_, 0.4);
  const double eta = 4.0 / 10.0;
  const Matrix c1 = (1 - eta * 0.1) * Matrix::Identity(10, 10) - eta * p.a * p.a.transpose();
  EXPECT_LT((u.C1 - c1).norm(), 1e-15);
  EXPECT_LT((u.c2 - eta * p.b_prime * p.a_prime).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(u.noise_var, eta * eta * sigma_ * sigma_);
}

TEST_F(PrivacyTest, CoupleAtExplicitThreeByThree) {
  ProblemInstance small = GenerateSynthetic(3, 4, 0.5, 0.2, 1);
  const Schedule schedule = Schedule::Constant(1.5);
  const NeighborPair p{Vector::Constant(3, 0.5), 1.0,
                       (Vector(3) << 0.1, 0.2, 0.3).finished(), -0.5};
  GaussianLaw<double> law;
  law.mean = (Vector(3) << 1.0, -1.0, 0.5).finished();
  law.cov = (Matrix(3, 3) << 2.0, 0.1, 0.0, 0.1, 1.0, 0.2, 0.0, 0.2, 0.5).finished();
  const auto [first, second] = CoupleAt(small, schedule, law, p, 2.0, 0.3);
  // eta = 0.5, C = (1 - 0.1) I - 0.5 a a^T.
  const Matrix c1 = 0.9 * Matrix::Identity(3, 3) - 0.5 * p.a * p.a.transpose();
  const Matrix c2 =
      0.9 * Matrix::Identity(3, 3) - 0.5 * p.a_prime * p.a_prime.transpose();
  EXPECT_LT((first.mean - (c1 * law.mean + 0.5 * 1.0 * p.a)).norm(), 1e-15);
  EXPECT_LT((second.mean - (c2 * law.mean - 0.25 * p.a_prime)).norm(), 1e-15);
  EXPECT_LT((first.cov - (c1 * law.cov * c1 + Matrix::Identity(3, 3))).norm(), 1e-14);
  EXPECT_LT((second.cov - (c2 * law.cov * c2 + Matrix::Identity(3, 3))).norm(), 1e-14);
}

TEST_F(PrivacyTest, PropagatingTheTrackReproducesIt) {
  for (const auto& [s, t] : {std::pair{0.3, 0.9}, std::pair{0.55, 1.5}}) {
    const GaussianLaw<double> moved = Propagate(track_, track_.Law(s), s, t);
    const GaussianLaw<double> direct = track_.Law(t);
    EXPECT_LT((moved.mean - direct.mean).norm(), 1e-12);
    EXPECT_LT((moved.cov - direct.cov).norm(), 1e-12 * direct.cov.norm());
  }
}

TEST_F(PrivacyTest, StructuredMatchesDense) {
  PrivacyOptions dense_options;
  dense_options.engine = PrivacyEngine::kDense;
  const PrivacyModel structured(track_);
  const PrivacyModel dense(track_, dense_options);
  const std::vector<double> alphas{1.5, 2.0, 8.0};
  int finite = 0;
  const std::vector<ReleaseSpec> specs{
      ReleaseSpec::LastIterate(0.9), ReleaseSpec::Iterates({0.4, 0.9, 1.3}),
      ReleaseSpec::Average({0.4, 0.9, 1.3}), ReleaseSpec::Average({0.2, 1.5})};
  for (const auto& pair : {Pair(0, 1), Pair(7, 3), Pair(14, 9)}) {
    for (const auto& spec : specs) {
      for (const double s : {0.1, 0.4, 0.6, 0.9, 1.2, 1.3}) {
        for (const double alpha : alphas) {
          // Large orders can make the mixture indefinite; both engines must
          // then agree that the divergence is infinite.
          const auto a = Evaluate(structured, pair, alpha, spec, s);
          const auto b = Evaluate(dense, pair, alpha, spec, s);
          ASSERT_EQ(a.has_value(), b.has_value())
              << ReleaseKindName(spec.kind) << " s=" << s << " alpha=" << alpha;
          if (!a) continue;
          ++finite;
          EXPECT_NEAR(*a, *b, 1e-8 * std::max(1e-6, std::abs(*b)))
              << ReleaseKindName(spec.kind) << " s=" << s << " alpha=" << alpha;
        }
      }
    }
  }
  EXPECT_GT(finite, 100);
}

TEST_F(PrivacyTest, DenseLastIterateMatchesManualPipeline) {
  PrivacyOptions dense_options;
  dense_options.engine = PrivacyEngine::kDense;
  const PrivacyModel dense(track_, dense_options);
  const NeighborPair pair = Pair(4, 11);
  const double s = 0.5, t = 1.1;
  const auto [p1, p2] = CoupleAt(instance_, schedule_, track_.Law(s), pair, sigma_, s);
  const double manual = RenyiGaussian(Propagate(track_, p1, s, t),
                                      Propagate(track_, p2, s, t), 2.0);
  EXPECT_NEAR(dense.Divergence(pair, 2.0, ReleaseSpec::LastIterate(t), s), manual,
              1e-12 * manual);
}

// Average of an iterate before the update and one after it, built as a
// linear image of independent Gaussian pieces: X_p, the (p, s] increment,
// the update noise and the (s, t] increment.
TEST_F(PrivacyTest, AverageAcrossUpdateMatchesLinearImage) {
  const double p = 0.4, s = 0.7, t = 1.2;
  const NeighborPair pair = Pair(5, 13);
  const Matrix hessian = instance_.covariance + 0.1 * Matrix::Identity(10, 10);
  const Matrix phi_sp = (-4.0 * (s - p) * hessian).exp();
  const Matrix phi_ts = (-4.0 * (t - s) * hessian).exp();
  const GaussianLaw<double> lp = track_.Law(p), ls = track_.Law(s), lt = track_.Law(t);
  const Matrix n1 = ls.cov - phi_sp * lp.cov * phi_sp.transpose();
  const Matrix n3 = lt.cov - phi_ts * ls.cov * phi_ts.transpose();
  const Vector mu1 = ls.mean - phi_sp * lp.mean;
  const Vector mu3 = lt.mean - phi_ts * ls.mean;
  const DifferentiatingUpdate u =
      DifferentiatingUpdate::Build(instance_, schedule_, pair, sigma_, s);
  auto average = [&](const Matrix& c, const Vector& shift) {
    const Matrix g = Matrix::Identity(10, 10) + phi_ts * c * phi_sp;
    const Matrix h = phi_ts * c;
    GaussianLaw<double> law;
    law.mean = 0.5 * (g * lp.mean + h * mu1 + phi_ts * shift + mu3);
    law.cov = 0.25 * (g * lp.cov * g.transpose() + h * n1 * h.transpose() +
                      u.noise_var * phi_ts * phi_ts.transpose() + n3);
    law.cov = 0.5 * (law.cov + law.cov.transpose()).eval();
    return law;
  };
  const GaussianLaw<double> first = average(u.C1, u.c1);
  const GaussianLaw<double> second = average(u.C2, u.c2);
  PrivacyOptions dense_options;
  dense_options.engine = PrivacyEngine::kDense;
  const PrivacyModel structured(track_);
  const PrivacyModel dense(track_, dense_options);
  for (const double alpha : {2.0, 4.0}) {
    const double oracle = RenyiGaussian(first, second, alpha);
    ASSERT_GT(oracle, 0.0);
    const auto spec = ReleaseSpec::Average({p, t});
    EXPECT_NEAR(structured.Divergence(pair, alpha, spec, s), oracle, 1e-8 * oracle);
    EXPECT_NEAR(dense.Divergence(pair, alpha, spec, s), oracle, 1e-8 * oracle);
  }
}

TEST_F(PrivacyTest, SingleTimeReleasesAgree) {
  const PrivacyModel model(track_);
  const NeighborPair pair = Pair(3, 8);
  for (const double t : {0.35, 1.0, 1.5}) {
    for (const double s : {0.1, 0.35, 0.8}) {
      const auto last = model.Divergences(pair, {2.0, 4.0}, ReleaseSpec::LastIterate(t), s);
      const auto it = model.Divergences(pair, {2.0, 4.0}, ReleaseSpec::Iterates({t}), s);
      const auto avg = model.Divergences(pair, {2.0, 4.0}, ReleaseSpec::Average({t}), s);
      for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(it[k], last[k], 1e-10);
        EXPECT_NEAR(avg[k], last[k], 1e-10);
      }
    }
  }
}

TEST_F(PrivacyTest, ZeroAfterReleaseAndDecayInTime) {
  const PrivacyModel model(track_);
  const NeighborPair pair = Pair(6, 2);
  EXPECT_EQ(model.Divergence(pair, 2.0, ReleaseSpec::LastIterate(0.5), 0.6), 0.0);
  EXPECT_EQ(model.Divergence(pair, 2.0, ReleaseSpec::Iterates({0.2, 0.5}), 0.7), 0.0);
  double previous = std::numeric_limits<double>::infinity();
  for (const double t : {0.3, 0.5, 0.8, 1.1, 1.5}) {
    const double d = model.Divergence(pair, 2.0, ReleaseSpec::LastIterate(t), 0.3);
    EXPECT_LE(d, previous * (1 + 1e-12));
    EXPECT_GT(d, 0.0);
    previous = d;
  }
}

TEST_F(PrivacyTest, AverageNeverExceedsIterates) {
  const PrivacyModel model(track_);
  const NeighborPair pair = Pair(1, 12);
  const std::vector<double> times{0.3, 0.7, 1.2};
  for (const double s : {0.1, 0.5, 1.0}) {
    const auto it = model.Divergences(pair, {2.0, 6.0}, ReleaseSpec::Iterates(times), s);
    const auto avg = model.Divergences(pair, {2.0, 6.0}, ReleaseSpec::Average(times), s);
    for (int k = 0; k < 2; ++k) EXPECT_LE(avg[k], it[k] + 1e-12);
  }
}

TEST_F(PrivacyTest, DenseBlockLimit) {
  PrivacyOptions options;
  options.engine = PrivacyEngine::kDense;
  options.max_block_dim = 5;
  const PrivacyModel model(track_, options);
  try {
    model.Divergence(Pair(0, 1), 2.0, ReleaseSpec::Iterates({0.5, 1.0}), 0.2);
    FAIL() << "expected BlockTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBlockTooLarge);
  }
  EXPECT_NO_THROW(model.Divergence(Pair(0, 1), 2.0, ReleaseSpec::LastIterate(1.0), 0.2));
}

TEST_F(PrivacyTest, RdpReleaseMixesOverGrid) {
  const PrivacyModel model(track_);
  const std::vector<NeighborPair> pairs{Pair(0, 1), Pair(5, 9)};
  const ReleaseSpec spec = ReleaseSpec::LastIterate(0.8);
  const std::vector<double> grid = DefaultSGrid(10, 1.5);
  ASSERT_EQ(grid.size(), 15u);
  const auto results = RdpRelease(model, pairs, {2.0}, spec, grid, 1.5);
  ASSERT_EQ(results.size(), 1u);
  const RdpResult& r = results.front();
  std::vector<double> weights{(1.5 - 0.8) / 1.5}, divs{0.0};
  int inside = 0;
  for (const double s : grid) inside += s <= 0.8 ? 1 : 0;
  EXPECT_EQ(inside, 8);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d0 = model.Divergence(pairs[0], 2.0, spec, grid[k]);
    const double d1 = model.Divergence(pairs[1], 2.0, spec, grid[k]);
    EXPECT_DOUBLE_EQ(r.divergence[k], std::max(d0, d1));
    if (grid[k] <= 0.8) {
      weights.push_back(0.8 / 1.5 / inside);
      divs.push_back(std::max(d0, d1));
    } else {
      EXPECT_EQ(r.divergence[k], 0.0);
    }
  }
  EXPECT_NEAR(r.epsilon, MixtureBound(weights, divs, 2.0), 1e-15);
  EXPECT_GE(r.worst_pair, 0);
  EXPECT_LT(r.worst_pair, 2);
  EXPECT_THROW(RdpRelease(model, pairs, {2.0}, ReleaseSpec::LastIterate(1.6), grid, 1.5),
               Error);
}

TEST_F(PrivacyTest, RdpReleaseIsThreadInvariant) {
  PrivacyOptions options;
  options.threads = 3;
  const PrivacyModel serial(track_), parallel(track_, options);
  const std::vector<NeighborPair> pairs{Pair(0, 1), Pair(5, 9), Pair(2, 3)};
  const auto grid = DefaultSGrid(10, 1.5);
  const auto spec = ReleaseSpec::Average({0.5, 1.4});
  const auto a = RdpRelease(serial, pairs, {2.0, 3.0}, spec, grid, 1.5);
  const auto b = RdpRelease(parallel, pairs, {2.0, 3.0}, spec, grid, 1.5);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].epsilon, b[k].epsilon);
    EXPECT_EQ(a[k].divergence, b[k].divergence);
  }
}

TEST(AdversarialPairsTest, ScoresSortedAndExplicit) {
  const ProblemInstance inst = GenerateSynthetic(6, 12, 0.5, 0.1, 2);
  const auto pairs = AdversarialPairs(inst, 10);
  ASSERT_EQ(pairs.size(), 10u);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    EXPECT_NE(p.first, p.second);
    const Vector ai = inst.design.row(p.first).transpose();
    const Vector aj = inst.design.row(p.second).transpose();
    const Vector g = (inst.labels(p.first) - ai.sum()) * ai -
                     (inst.labels(p.second) - aj.sum()) * aj -
                     0.1 * Vector::Ones(6);
    EXPECT_NEAR(p.score, g.norm(), 1e-14);
    if (k > 0) EXPECT_GE(pairs[k - 1].score, p.score);
  }
  // The top pair is the best of all n (n - 1) ordered pairs.
  double best = 0.0;
  for (Eigen::Index i = 0; i < 12; ++i) {
    for (Eigen::Index j = 0; j < 12; ++j) {
      if (i == j) continue;
      NeighborPair p{inst.design.row(i).transpose(), inst.labels(i),
                     inst.design.row(j).transpose(), inst.labels(j)};
      best = std::max(best, PairScoreVector(p, 0.1).norm());
    }
  }
  EXPECT_DOUBLE_EQ(pairs.front().score, best);
  const auto again = AdversarialPairs(inst, 10);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    EXPECT_EQ(again[k].first, pairs[k].first);
    EXPECT_EQ(again[k].second, pairs[k].second);
  }
}

TEST(AdversarialPairsTest, ScoreTracksDivergence) {
  const ProblemInstance inst = GenerateSynthetic(50, 75, 0.5, 0.1, 6);
  const SpectralCache cache = SpectralCache::Build(inst.covariance, inst.delta);
  const Schedule schedule = Schedule::Constant(2.5);
  const Vector x0 = Vector::Zero(50);
  const RiskCurves curves = SolveVolterra(inst, cache, schedule, x0, 1.0, 1.5, 0.02);
  const LawTrack track(inst, cache, schedule, curves, x0, 1.0);
  const PrivacyModel model(track);
  Philox4x32 engine(5);
  std::uniform_int_distribution<Eigen::Index> pick(0, 74);
  std::vector<double> scores, divs;
  while (scores.size() < 200) {
    const Eigen::Index i = pick(engine), j = pick(engine);
    if (i == j) continue;
    NeighborPair p{inst.design.row(i).transpose(), inst.labels(i),
                   inst.design.row(j).transpose(), inst.labels(j)};
    scores.push_back(PairScoreVector(p, inst.delta).norm());
    divs.push_back(model.Divergence(p, 2.0, ReleaseSpec::LastIterate(1.0), 0.5));
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < order.size(); ++k) r[order[k]] = static_cast<double>(k);
    return r;
  };
  const auto rs = ranks(scores), rd = ranks(divs);
  const double mean = (rs.size() - 1) / 2.0;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    num += (rs[k] - mean) * (rd[k] - mean);
    den += (rs[k] - mean) * (rs[k] - mean);
  }
  EXPECT_GT(num / den, 0.0);
}

}  // namespace
}  // namespace hsgd
