// tests/unit/test_pipeline.cpp

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

#include <sstream>

#include "doctest.h"
#include "hmmtopo/errors.hpp"
#include "hmmtopo/pipeline.hpp"
#include "hmmtopo/synth.hpp"

using namespace hmmtopo;

namespace {

std::vector<Utterance> corpus() {
  SyntheticSpec s;
  s.vocab_size = 3;
  s.states_per_word = 4;
  s.topology = GeneratorTopology::kSparse;
  s.prototypes = 3;
  s.state_stddev = 0.6;
  s.train_utterances = 36;
  s.seed = 71;
  return utterances_of(sample_corpus(s).train);
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.states = 2;
  c.training.schedule = {1, 2};
  c.training.max_iterations = 4;
  c.sweep.epsilons = {0.02, 0.1, 0.3};
  c.feedback_iterations = 1;
  c.seed = 5;
  return c;
}

std::string report_of(const PipelineResult& r, const PipelineConfig& c) {
  std::ostringstream s;
  write_pipeline_report(s, r, c);
  write_pipeline_sweeps_csv(s, r);
  return s.str();
}

}  // namespace

TEST_CASE("pipeline keeps the Gaussian budget and returns valid models") {
  const auto train = corpus();
  const auto config = small_config();
  const PipelineResult r = run_pipeline(train, config);
  REQUIRE(r.baseline.size() == 3);
  REQUIRE(r.final_models.size() == 3);
  CHECK(r.rounds.size() == 2);
  CHECK(r.budget_matched);
  for (const auto& b : r.budget) {
    CHECK(b.baseline == 4);
    CHECK(b.flattened == 4);
    CHECK(b.final <= 4);
  }
  for (const auto& m : r.final_models) {
    CHECK(validate_model(m).empty());
    CHECK(m.max_components() == 1);
  }
  CHECK(r.kept_accuracy >= r.rounds.front().sweep.best().accuracy);
  const std::string text = report_of(r, config);
  CHECK(text.rfind("seed 5\n", 0) == 0);
  CHECK(text.find("budget_matched yes") != std::string::npos);
}

TEST_CASE("pipeline output does not depend on the job count") {
  const auto train = corpus();
  auto config = small_config();
  const std::string one = report_of(run_pipeline(train, config), config);
  config.jobs = 3;
  CHECK(report_of(run_pipeline(train, config), config) == one);
}

TEST_CASE("pipeline configuration") {
  const auto c = PipelineConfig::from_config(
      KeyValueConfig::parse("states = 4\nschedule = 1,2\nepsilons = 0.1, 0.2\nfeedback_iterations = 2\n"
                            "decode_mode = loop\nretrain_after_prune = true\n"));
  CHECK(c.states == 4);
  CHECK(c.training.schedule == std::vector<int>{1, 2});
  CHECK(c.sweep.epsilons == std::vector<double>{0.1, 0.2});
  CHECK(c.sweep.decode_mode == NetworkMode::kLoop);
  CHECK(c.sweep.retrain_after_prune);
  CHECK_THROWS_AS(PipelineConfig::from_config(KeyValueConfig::parse("state = 4\n")), ValidationError);
  CHECK_THROWS_AS(PipelineConfig::from_config(KeyValueConfig::parse("epsilons = 0.2, 0.1\n")), ValidationError);
  CHECK_THROWS_AS(run_pipeline({}, small_config()), UsageError);
}
