// tests/unit/test_forward_backward.cpp

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
#include <random>

#include "doctest.h"
#include "hmmtopo/errors.hpp"
#include "hmmtopo/forward_backward.hpp"
#include "hmmtopo/state_graph.hpp"
#include "oracles.hpp"

using namespace hmmtopo;

namespace {

// Two models joined into one, with a(i -> exit) * a(entry -> j) between them.
HmmModel concatenate(const HmmModel& a, const HmmModel& b) {
  const Index na = a.num_states(), nb = b.num_states();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(na + nb + 2, na + nb + 2);
  for (Index j = 1; j <= na; ++j) t(0, j) = a.transitions(0, j);
  for (Index i = 1; i <= na; ++i) {
    for (Index j = 1; j <= na; ++j) t(i, j) = a.transitions(i, j);
    for (Index j = 1; j <= nb; ++j) t(i, na + j) = a.transitions(i, na + 1) * b.transitions(0, j);
  }
  for (Index i = 1; i <= nb; ++i) {
    for (Index j = 1; j <= nb; ++j) t(na + i, na + j) = b.transitions(i, j);
    t(na + i, na + nb + 1) = b.transitions(i, nb + 1);
  }
  std::vector<Gmmd> e(a.emissions);
  e.insert(e.end(), b.emissions.begin(), b.emissions.end());
  return make_model("ab", t, e);
}

}  // namespace

TEST_CASE("forward likelihood equals the sum over all state paths") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = oracle::random_model(rng, 1 + trial % 4, 3, 2);
    const auto f = oracle::random_features(rng, 1 + trial % 6, 2);
    const double expected = oracle::enumerated_log_likelihood(m, f);
    if (std::isinf(expected)) {
      CHECK(std::isinf(forward_log_likelihood(m, f)));
      CHECK_THROWS_AS(forward_backward(m, f), AlignmentInfeasible);
      continue;
    }
    CHECK(forward_log_likelihood(m, f) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(forward_backward(m, f).log_likelihood == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("forward likelihood on long sequences matches a scaled recursion") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = oracle::random_model(rng, 4, 2, 3);
    const auto f = oracle::random_features(rng, 300, 3);
    CHECK(forward_log_likelihood(m, f) == doctest::Approx(oracle::scaled_forward_log_likelihood(m, f)).epsilon(1e-10));
  }
}

TEST_CASE("posteriors match path enumeration and are consistent") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = oracle::random_model(rng, 3, 2, 2);
    const auto f = oracle::random_features(rng, 5, 2);
    const auto fb = forward_backward(m, f);
    const StateGraph graph = build_state_graph(m);

    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(5, 3);
    double total = 0.0;
    oracle::for_each_path(3, 5, [&](const std::vector<int>& path) {
      const double p = oracle::path_probability(m, f, path);
      total += p;
      for (int t = 0; t < 5; ++t) gamma(t, path[static_cast<std::size_t>(t)] - 1) += p;
    });
    gamma /= total;

    const auto& post = fb.posteriors;
    for (Index t = 0; t < 5; ++t) {
      CHECK(post.gamma.row(t).sum() == doctest::Approx(1.0).epsilon(1e-12));
      for (Index g = 0; g < 3; ++g) CHECK(post.gamma(t, g) == doctest::Approx(gamma(t, g)).scale(1.0).epsilon(1e-10));
    }
    for (Index t = 0; t + 1 < 5; ++t)
      for (Index g = 0; g < 3; ++g) {
        double out = 0.0, in = 0.0;
        for (Index a : graph.arcs_out[static_cast<std::size_t>(g)]) out += post.xi(t, a);
        for (Index a : graph.arcs_in[static_cast<std::size_t>(g)]) in += post.xi(t, a);
        CHECK(out == doctest::Approx(post.gamma(t, g)).scale(1.0).epsilon(1e-12));
        CHECK(in == doctest::Approx(post.gamma(t + 1, g)).scale(1.0).epsilon(1e-12));
      }
    for (Index g = 0; g < 3; ++g) CHECK(post.exit[g] == doctest::Approx(post.gamma(4, g)).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("transcript graphs chain models through exit and entry") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = oracle::random_model(rng, 2, 2, 2);
    const auto b = oracle::random_model(rng, 3, 2, 2);
    const auto f = oracle::random_features(rng, 6, 2);
    const HmmModel* seq[] = {&a, &b};
    const StateGraph graph = build_state_graph(seq);
    CHECK(graph.num_states() == 5);
    CHECK(graph.segment[3] == 1);
    CHECK(graph.local[3] == 2);
    const double ll = forward_log_likelihood(graph, emission_log_likelihoods(graph, f));
    CHECK(ll == doctest::Approx(oracle::enumerated_log_likelihood(concatenate(a, b), f)).epsilon(1e-10));
  }
}

TEST_CASE("a sequence shorter than every path is infeasible") {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
  t(0, 1) = 1.0;
  t(1, 2) = 1.0;
  t(2, 3) = 1.0;
  std::vector<Gmmd> e(2, Gmmd(Gaussiand(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1))));
  const HmmModel m = make_model("x", t, e);
  FeatureSequence f;
  f.frames = FrameMatrix::Zero(1, 1);
  CHECK(std::isinf(forward_log_likelihood(m, f)));
  CHECK_THROWS_AS(forward_backward(m, f), AlignmentInfeasible);
  f.frames = FrameMatrix::Zero(2, 1);
  CHECK(forward_log_likelihood(m, f) == doctest::Approx(2 * -0.5 * std::log(2 * M_PI)));
}
