// include/hmmtopo/gaussian.hpp

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

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hmmtopo/errors.hpp"
#include "hmmtopo/log_math.hpp"

namespace hmmtopo {

/// Diagonal-covariance Gaussian density. Variances must be strictly positive;
/// the log normalizer is cached at construction.
template <typename Scalar_>
class DiagonalGaussian {
 public:
  using Scalar = Scalar_;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  DiagonalGaussian() = default;

  DiagonalGaussian(Vector mean, Vector variance)
      : mean_(std::move(mean)), variance_(std::move(variance)) {
    if (mean_.size() == 0 || mean_.size() != variance_.size())
      throw UsageError("DiagonalGaussian: mean/variance dimension mismatch");
    if (!mean_.allFinite() || !variance_.allFinite() || (variance_.array() <= Scalar(0)).any())
      throw UsageError("DiagonalGaussian: variances must be finite and positive");
    inv_variance_ = variance_.cwiseInverse();
    log_norm_ = Scalar(-0.5) * (variance_.array() * Scalar(2 * std::numbers::pi)).log().sum();
  }

  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Vector& variance() const { return variance_; }

  template <typename Derived>
  Scalar log_density(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != mean_.size()) throw UsageError("gaussian_log_density: dimension mismatch");
    const auto diff = (x.template cast<Scalar>() - mean_).array();
    return log_norm_ - Scalar(0.5) * (diff.square() * inv_variance_.array()).sum();
  }

  friend bool operator==(const DiagonalGaussian& a, const DiagonalGaussian& b) {
    return a.mean_ == b.mean_ && a.variance_ == b.variance_;
  }

 private:
  Vector mean_;
  Vector variance_;
  Vector inv_variance_;
  Scalar log_norm_ = 0;
};

/// Weighted mixture of diagonal Gaussians sharing one dimension.
template <typename Scalar_>
class GaussianMixture {
 public:
  using Scalar = Scalar_;
  using Component = DiagonalGaussian<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GaussianMixture() = default;

  explicit GaussianMixture(Component single)
      : GaussianMixture(Vector::Ones(1), std::vector<Component>{std::move(single)}) {}

  GaussianMixture(Vector weights, std::vector<Component> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty()) throw UsageError("GaussianMixture: at least one component required");
    if (weights_.size() != static_cast<Eigen::Index>(components_.size()))
      throw UsageError("GaussianMixture: weight count differs from component count");
    for (const auto& c : components_)
      if (c.dim() != components_.front().dim())
        throw UsageError("GaussianMixture: components differ in dimension");
    if (!weights_.allFinite() || (weights_.array() < Scalar(0)).any())
      throw UsageError("GaussianMixture: weights must be finite and non-negative");
    log_weights_ = weights_.unaryExpr([](Scalar w) { return safe_log(w); });
  }

  Eigen::Index size() const { return weights_.size(); }
  Eigen::Index dim() const { return components_.front().dim(); }
  const Vector& weights() const { return weights_; }
  const Vector& log_weights() const { return log_weights_; }
  const std::vector<Component>& components() const { return components_; }
  const Component& component(Eigen::Index m) const { return components_[static_cast<std::size_t>(m)]; }

  /// Per-component ln(w_m) + ln N_m(x).
  template <typename Derived>
  Vector component_log_terms(const Eigen::MatrixBase<Derived>& x) const {
    Vector terms(size());
    for (Eigen::Index m = 0; m < size(); ++m)
      terms[m] = log_weights_[m] + components_[static_cast<std::size_t>(m)].log_density(x);
    return terms;
  }

  template <typename Derived>
  Scalar log_density(const Eigen::MatrixBase<Derived>& x) const {
    if (size() == 1) return log_weights_[0] + components_.front().log_density(x);
    return log_sum_exp(component_log_terms(x));
  }

  friend bool operator==(const GaussianMixture& a, const GaussianMixture& b) {
    return a.weights_ == b.weights_ && a.components_ == b.components_;
  }

 private:
  Vector weights_;
  std::vector<Component> components_;
  Vector log_weights_;
};

using Gaussiand = DiagonalGaussian<double>;
using Gmmd = GaussianMixture<double>;

template <typename Scalar, typename Derived>
Scalar gaussian_log_density(const DiagonalGaussian<Scalar>& g, const Eigen::MatrixBase<Derived>& x) {
  return g.log_density(x);
}

template <typename Scalar, typename Derived>
Scalar gmm_log_density(const GaussianMixture<Scalar>& e, const Eigen::MatrixBase<Derived>& x) {
  return e.log_density(x);
}

}  // namespace hmmtopo
