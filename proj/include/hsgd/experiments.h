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

#ifndef HSGD_EXPERIMENTS_H_
#define HSGD_EXPERIMENTS_H_

#include <cstdint>
#include <vector>

#include "hsgd/common.h"
#include "hsgd/problem.h"
#include "hsgd/schedule.h"
#include "hsgd/spectral.h"

namespace hsgd {

// sup_k |P(x_k) - P(X_{k/d})| for `runs` independent pairs of one SGD pass
// (seed ReplicaSeed(seed, r)) and one HSGD sampler path (stream r of seed).
std::vector<double> PairedSupGaps(const ProblemInstance& instance,
                                  const SpectralCache& cache,
                                  const Schedule& schedule, const Vector& x0,
                                  double sigma, std::uint64_t seed,
                                  std::int64_t runs, bool shuffle,
                                  int threads = 1);

double Median(std::vector<double> values);

}  // namespace hsgd

#endif  // HSGD_EXPERIMENTS_H_
