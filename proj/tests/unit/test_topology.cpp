// tests/unit/test_topology.cpp

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

#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hmmtopo/errors.hpp"
#include "hmmtopo/forward_backward.hpp"
#include "hmmtopo/topology.hpp"
#include "oracles.hpp"

using namespace hmmtopo;

namespace {

Gmmd unit_gaussian(double mean) { return Gmmd(Gaussiand(Eigen::VectorXd::Constant(1, mean), Eigen::VectorXd::Ones(1))); }

Gmmd ten_components() {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(10, 0.1);
  std::vector<Gaussiand> c;
  for (int k = 0; k < 10; ++k) c.emplace_back(Eigen::VectorXd::Constant(1, k), Eigen::VectorXd::Ones(1));
  return Gmmd(w, c);
}

// State 1 has the row {self 0.6, ->2 0.3, ->3 0.1}; 2 and 3 lead to exit.
HmmModel three_way() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  a(0, 1) = 1.0;
  a(1, 1) = 0.6;
  a(1, 2) = 0.3;
  a(1, 3) = 0.1;
  a(2, 3) = 1.0;
  a(3, 3) = 0.5;
  a(3, 4) = 0.5;
  return make_model("x", a, {unit_gaussian(0), unit_gaussian(1), unit_gaussian(2)});
}

bool subset(const std::set<std::pair<int, int>>& a, const std::set<std::pair<int, int>>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("flattening 3 states of 10 components gives 30 single-Gaussian states") {
  const HmmModel m = make_model("x", left_to_right_transitions(3), {ten_components(), ten_components(), ten_components()});
  for (auto mode : {FlattenMode::kEquiprobable, FlattenMode::kWeightPreserving}) {
    const HmmModel f = flatten_model(m, mode);
    CHECK(f.num_states() == 30);
    CHECK(f.gaussian_count() == m.gaussian_count());
    CHECK(f.max_components() == 1);
    CHECK(validate_model(f).empty());
    // every component of state 1 reaches every component of states 1 and 2
    CHECK(f.support(1).size() == 20);
    CHECK(f.support(0).size() == 10);
    CHECK(f.support(25).size() == 11);
    CHECK(f.emission(14).component(0).mean()[0] == 3.0);
  }
  const HmmModel eq = flatten_model(m, FlattenMode::kEquiprobable);
  CHECK(eq.transitions(1, 15) == doctest::Approx(1.0 / 20.0));
  const HmmModel wp = flatten_model(m, FlattenMode::kWeightPreserving);
  CHECK(wp.transitions(1, 15) == doctest::Approx(0.5 * 0.1));
  CHECK(wp.transitions(25, 31) == doctest::Approx(0.5));
}

TEST_CASE("weight-preserving flattening keeps the likelihood") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const HmmModel m = oracle::random_model(rng, 1 + trial % 3, 3, 2);
    const HmmModel f = flatten_model(m, FlattenMode::kWeightPreserving);
    const auto x = oracle::random_features(rng, 1 + trial % 5, 2);
    const double expected = oracle::enumerated_log_likelihood(m, x);
    if (std::isinf(expected)) {
      CHECK(std::isinf(forward_log_likelihood(f, x)));
      continue;
    }
    CHECK(oracle::scaled_forward_log_likelihood(f, x) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(forward_log_likelihood(f, x) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("pruning drops small edges and renormalizes") {
  const HmmModel p = prune(three_way(), 0.2);
  CHECK(p.num_states() == 3);
  CHECK(p.transitions(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(p.transitions(1, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(p.transitions(1, 3) == 0.0);
  CHECK(p.transitions(3, 4) == 0.5);
  CHECK(validate_model(p).empty());
}

TEST_CASE("pruning keeps the row argmax and the best route to exit") {
  // At 0.7 only the 1 -> 1 self-loop clears the threshold; 1 -> 2 survives as
  // the best route to exit, and row 3 keeps its lowest-column argmax.
  const HmmModel p = prune(three_way(), 0.7);
  CHECK(p.transitions(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(p.transitions(1, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(p.transitions(3, 3) == doctest::Approx(0.5));
  CHECK(p.transitions(3, 4) == doctest::Approx(0.5));
  CHECK(validate_model(p).empty());
  CHECK_THROWS_AS(prune(three_way(), 0.0), UsageError);
  CHECK_THROWS_AS(prune(three_way(), 1.0), UsageError);
}

TEST_CASE("pruning removes states cut off from entry and keeps tags") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  a(0, 1) = 0.95;
  a(0, 2) = 0.05;
  a(1, 3) = 1.0;
  a(2, 3) = 1.0;
  a(3, 4) = 1.0;
  HmmModel m = make_model("x", a, {unit_gaussian(0), unit_gaussian(1), unit_gaussian(2)});
  m.tags = {10, 11, 12};
  const HmmModel p = prune(m, 0.1);
  CHECK(p.num_states() == 2);
  CHECK(p.tags == std::vector<int>{10, 12});
  CHECK(p.emission(2).component(0).mean()[0] == 2.0);
  CHECK(edge_set(p) == std::set<std::pair<int, int>>{{-1, 10}, {10, 12}, {12, -2}});
}

TEST_CASE("pruned edge sets are nested over an ascending grid") {
  std::mt19937_64 rng(42);
  const std::vector<double> grid = {0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9};
  for (int trial = 0; trial < 30; ++trial) {
    const HmmModel m = flatten_model(oracle::random_model(rng, 2 + trial % 3, 3, 2, 0.6), FlattenMode::kWeightPreserving);
    auto previous = edge_set(m);
    for (double eps : grid) {
      const HmmModel p = prune(m, eps);
      CHECK(validate_model(p).empty());
      const auto edges = edge_set(p);
      CHECK(subset(edges, previous));
      previous = edges;
    }
  }
}

TEST_CASE("feedback maps trained emissions back by tag") {
  const HmmModel fresh = flatten_model(make_model("x", left_to_right_transitions(2), {ten_components(), ten_components()}),
                                       FlattenMode::kEquiprobable);
  HmmModel trained = prune(flatten_model(make_model("x", left_to_right_transitions(2), {ten_components(), ten_components()}),
                                         FlattenMode::kWeightPreserving),
                           0.06);
  REQUIRE(trained.num_states() < fresh.num_states());
  for (Index s = 1; s <= trained.num_states(); ++s) trained.emission(s) = unit_gaussian(100.0 + trained.tags[s - 1]);
  const HmmModel back = feedback_emissions(trained, fresh);
  CHECK(back.num_states() == fresh.num_states());
  CHECK(back.transitions == equiprobable_rows(fresh.transitions));
  for (Index s = 1; s <= back.num_states(); ++s) {
    const int tag = back.tags[s - 1];
    const bool survived = std::find(trained.tags.begin(), trained.tags.end(), tag) != trained.tags.end();
    CHECK(back.emission(s).component(0).mean()[0] == (survived ? 100.0 + tag : fresh.emission(s).component(0).mean()[0]));
  }
  HmmModel stray = trained;
  stray.tags.back() = 999;
  CHECK_THROWS_AS(feedback_emissions(stray, fresh), UsageError);
}

TEST_CASE("sweep keeps the smallest epsilon among equally accurate sets") {
  // One class: every decode is correct, so every epsilon ties.
  std::mt19937_64 rng(43);
  const HmmModel m = flatten_model(oracle::random_model(rng, 3, 2, 2, 0.6, "only"), FlattenMode::kEquiprobable);
  std::vector<Utterance> corpus;
  for (int k = 0; k < 3; ++k) corpus.push_back({"u" + std::to_string(k), oracle::random_features(rng, 8, 2), {"only"}});
  SweepConfig c;
  c.epsilons = {0.05, 0.1, 0.2};
  TrainingConfig t;
  const auto result = sweep_threshold(std::span<const HmmModel>(&m, 1), corpus, c, t, make_floors(global_statistics(corpus), t));
  REQUIRE(result.records.size() == 3);
  CHECK(result.kept == 0);
  CHECK(result.best().accuracy == 1.0);
  CHECK(result.tie_note.find("kept epsilon 0.05") != std::string::npos);
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  CHECK(csv.str().rfind("epsilon,accuracy,edges_kept,states_kept,decode_failures,kept\n0.050000000000000003,1,", 0) == 0);

  c.epsilons = {0.2, 0.1};
  CHECK_THROWS_AS(c.validate(), ValidationError);
}
