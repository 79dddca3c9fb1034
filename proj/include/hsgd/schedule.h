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

#ifndef HSGD_SCHEDULE_H_
#define HSGD_SCHEDULE_H_

#include <functional>
#include <string>
#include <vector>

#include "hsgd/common.h"

namespace hsgd {

// Continuous-time learning-rate schedule gamma(t) >= 0 and its integral
// Gamma(t). Discrete SGD uses eta_k = gamma(k / d) / d, so one SGD step is a
// time increment of 1 / d.
class Schedule {
 public:
  enum class Kind { kConstant, kTabulated, kFunction };

  // gamma(t) == rate.
  static Schedule Constant(double rate);

  // Piecewise-linear interpolation of (times[i], rates[i]); held constant
  // outside the table. times must be strictly increasing, rates >= 0.
  static Schedule Tabulated(std::vector<double> times,
                            std::vector<double> rates);

  // Arbitrary smooth bounded rate; Gamma by adaptive quadrature.
  static Schedule FromFunction(std::function<double(double)> rate,
                               std::string label = "function");

  Kind kind() const { return kind_; }

  double Rate(double t) const;

  // Gamma(t) = int_0^t gamma(u) du.
  double Integral(double t) const;
  // Gamma(t) - Gamma(s), computed directly rather than as a difference.
  double Integral(double s, double t) const;

  // Discrete step size for SGD step k in dimension d.
  double StepSize(std::int64_t k, std::int64_t d) const {
    return Rate(static_cast<double>(k) / static_cast<double>(d)) /
           static_cast<double>(d);
  }

  // Stable textual description, used in provenance hashes.
  std::string Describe() const;

 private:
  Schedule() = default;

  Kind kind_ = Kind::kConstant;
  double rate_ = 0.0;
  std::vector<double> times_;
  std::vector<double> rates_;
  // Cumulative integral at each table knot.
  std::vector<double> knot_integrals_;
  std::function<double(double)> function_;
  std::string label_;
};

}  // namespace hsgd

#endif  // HSGD_SCHEDULE_H_
