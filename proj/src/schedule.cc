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

#include "hsgd/schedule.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hsgd {

Schedule Schedule::Constant(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorCode::kInvalidArgument,
                "learning rate must be finite and nonnegative");
  }
  Schedule s;
  s.kind_ = Kind::kConstant;
  s.rate_ = rate;
  return s;
}

Schedule Schedule::Tabulated(std::vector<double> times,
                             std::vector<double> rates) {
  if (times.empty() || times.size() != rates.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "tabulated schedule needs matching nonempty time/rate lists");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(rates[i] >= 0.0) || !std::isfinite(rates[i]) ||
        !std::isfinite(times[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tabulated rates must be finite and nonnegative");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tabulated times must be strictly increasing");
    }
  }
  if (times.front() < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "tabulated times must start at t >= 0");
  }
  Schedule s;
  s.kind_ = Kind::kTabulated;
  s.times_ = std::move(times);
  s.rates_ = std::move(rates);
  // Constant extension on [0, times[0]].
  s.knot_integrals_.resize(s.times_.size());
  s.knot_integrals_[0] = s.rates_[0] * s.times_[0];
  for (std::size_t i = 1; i < s.times_.size(); ++i) {
    s.knot_integrals_[i] =
        s.knot_integrals_[i - 1] + 0.5 * (s.rates_[i] + s.rates_[i - 1]) *
                                       (s.times_[i] - s.times_[i - 1]);
  }
  return s;
}

Schedule Schedule::FromFunction(std::function<double(double)> rate,
                                std::string label) {
  Schedule s;
  s.kind_ = Kind::kFunction;
  s.function_ = std::move(rate);
  s.label_ = std::move(label);
  return s;
}

double Schedule::Rate(double t) const {
  switch (kind_) {
    case Kind::kConstant:
      return rate_;
    case Kind::kTabulated: {
      if (t <= times_.front()) return rates_.front();
      if (t >= times_.back()) return rates_.back();
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - times_.begin());
      const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
      return (1.0 - w) * rates_[i - 1] + w * rates_[i];
    }
    case Kind::kFunction:
      return function_(t);
  }
  return 0.0;
}

double Schedule::Integral(double t) const { return Integral(0.0, t); }

double Schedule::Integral(double s, double t) const {
  if (t < s) return -Integral(t, s);
  if (t == s) return 0.0;
  switch (kind_) {
    case Kind::kConstant:
      return rate_ * (t - s);
    case Kind::kTabulated: {
      // Integral from 0 to x of the piecewise-linear rate.
      auto cumulative = [this](double x) {
        if (x <= times_.front()) return rates_.front() * x;
        if (x >= times_.back()) {
          return knot_integrals_.back() + rates_.back() * (x - times_.back());
        }
        const auto it = std::upper_bound(times_.begin(), times_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - times_.begin());
        return knot_integrals_[i - 1] +
               0.5 * (rates_[i - 1] + Rate(x)) * (x - times_[i - 1]);
      };
      return cumulative(t) - cumulative(s);
    }
    case Kind::kFunction: {
      double error = 0.0;
      const double value =
          boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
              function_, s, t, /*max_depth=*/30, /*tol=*/1e-13, &error);
      return value;
    }
  }
  return 0.0;
}

std::string Schedule::Describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::kConstant:
      out << "constant:" << rate_;
      break;
    case Kind::kTabulated:
      out << "tabulated:";
      for (std::size_t i = 0; i < times_.size(); ++i) {
        out << times_[i] << '=' << rates_[i] << ';';
      }
      break;
    case Kind::kFunction:
      out << "function:" << label_;
      break;
  }
  return out.str();
}

}  // namespace hsgd
