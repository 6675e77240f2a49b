// tests/unit/test_gaussian.cpp

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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hmmtopo/gaussian.hpp"
#include "oracles.hpp"

using namespace hmmtopo;

TEST_CASE("standard normal density at the mean") {
  Gaussiand g(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  CHECK(g.log_density(Eigen::VectorXd::Zero(1)) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)));
}

TEST_CASE("diagonal density matches the closed form") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 4;
    Eigen::VectorXd mean(d), var(d), x(d);
    for (int k = 0; k < d; ++k) {
      mean[k] = n(rng);
      var[k] = 0.1 + std::abs(n(rng));
      x[k] = n(rng);
    }
    Gaussiand g(mean, var);
    CHECK(g.log_density(x) == doctest::Approx(std::log(oracle::gaussian_pdf(mean, var, x))).epsilon(1e-12));
    CHECK(gaussian_log_density(g, x) == g.log_density(x));
  }
}

TEST_CASE("one-dimensional density integrates to one") {
  Gaussiand g(Eigen::VectorXd::Constant(1, 0.7), Eigen::VectorXd::Constant(1, 0.4));
  const double h = 1e-3;
  double mass = 0.0;
  for (double x = -8.0; x <= 8.0; x += h) mass += std::exp(g.log_density(Eigen::VectorXd::Constant(1, x))) * h;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mixture density equals the weighted linear sum") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = oracle::random_model(rng, 1, 4, 3);
    const Gmmd& e = m.emission(1);
    Eigen::VectorXd x = Eigen::VectorXd::Random(3);
    CHECK(e.log_density(x) == doctest::Approx(std::log(oracle::emission_pdf(e, x))).epsilon(1e-12));
    CHECK(gmm_log_density(e, x) == e.log_density(x));
  }
}

TEST_CASE("constructors reject malformed parameters") {
  CHECK_THROWS_AS(Gaussiand(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(3)), UsageError);
  CHECK_THROWS_AS(Gaussiand(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)), UsageError);
  Gaussiand g(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  CHECK_THROWS_AS(Gmmd(Eigen::VectorXd::Ones(2), {g}), UsageError);
  CHECK_THROWS_AS(g.log_density(Eigen::VectorXd::Zero(3)), UsageError);
}
