// include/hmmtopo/log_math.hpp

// Copyright 2026  The hmmtopo Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include <Eigen/Core>

#include "hmmtopo/errors.hpp"

namespace hmmtopo {

/// ln 0. Every log-probability in the toolkit is either finite and <= 0 or this value.
template <typename Scalar>
inline constexpr Scalar kLogZero = -std::numeric_limits<Scalar>::infinity();

template <typename Scalar>
inline bool is_log_zero(Scalar v) {
  return v == kLogZero<Scalar>;
}

/// ln p with ln 0 mapped to kLogZero rather than a floating-point trap.
template <typename Scalar>
inline Scalar safe_log(Scalar p) {
  return p > Scalar(0) ? std::log(p) : kLogZero<Scalar>;
}

/// ln(exp(a) + exp(b)).
template <typename Scalar>
inline Scalar log_add(Scalar a, Scalar b) {
  if (a < b) std::swap(a, b);
  if (is_log_zero(b)) return a;
  return a + std::log1p(std::exp(b - a));
}

/// ln sum exp(v), max-shifted. Throws UsageError on an empty input.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  if (values.size() == 0) throw UsageError("log_sum_exp: empty input");
  const Scalar peak = values.maxCoeff();
  if (is_log_zero(peak)) return kLogZero<Scalar>;
  return peak + std::log((values.derived().array() - peak).exp().sum());
}

template <typename Scalar>
Scalar log_sum_exp(std::span<const Scalar> values) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  return log_sum_exp(Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace hmmtopo
