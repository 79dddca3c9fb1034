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

#include "hsgd/experiments.h"

#include <algorithm>
#include <cmath>

#include "hsgd/law.h"
#include "hsgd/parallel.h"
#include "hsgd/sgd.h"

namespace hsgd {

std::vector<double> PairedSupGaps(const ProblemInstance& instance,
                                  const SpectralCache& cache,
                                  const Schedule& schedule, const Vector& x0,
                                  double sigma, std::uint64_t seed,
                                  std::int64_t runs, bool shuffle,
                                  int threads) {
  const double horizon = static_cast<double>(instance.n_samples) /
                         static_cast<double>(instance.dim);
  SamplerOptions options;
  options.threads = threads;
  options.record_states = false;
  const SamplePaths paths = SampleHsgdPaths(instance, cache, schedule, x0,
                                            sigma, seed, horizon, runs, options);
  std::vector<double> gaps(static_cast<std::size_t>(runs), 0.0);
  ParallelFor(runs, threads, [&](std::int64_t r) {
    SgdOptions sgd;
    sgd.sigma = sigma;
    sgd.seed = ReplicaSeed(seed, r);
    sgd.record_stride = 1;
    sgd.shuffle = shuffle;
    const SgdTrajectory run = RunSgd(instance, schedule, x0, sgd);
    double gap = 0.0;
    for (std::size_t k = 0; k < run.P.size(); ++k) {
      gap = std::max(gap, std::abs(run.P[k] - paths.risk(r, static_cast<Eigen::Index>(k))));
    }
    gaps[static_cast<std::size_t>(r)] = gap;
  });
  return gaps;
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace hsgd
