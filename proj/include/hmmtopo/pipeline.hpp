// include/hmmtopo/pipeline.hpp

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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hmmtopo/config.hpp"
#include "hmmtopo/manifest.hpp"
#include "hmmtopo/model.hpp"
#include "hmmtopo/topology.hpp"
#include "hmmtopo/training.hpp"

namespace hmmtopo {

struct PipelineConfig {
  int states = 3;  // emitting states of the left-to-right baseline
  TrainingConfig training;
  SweepConfig sweep;
  int feedback_iterations = 0;
  std::uint64_t seed = 0;  // recorded in every report
  int jobs = 1;

  static PipelineConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

struct FeedbackRound {
  int round;                // 0 = sweep after the first flat training
  SweepResult sweep;
  double kept_accuracy;     // running best over rounds 0..round
  std::vector<TraceRow> trace;  // Baum-Welch trace of the flat model this round swept
};

struct BudgetLine {
  std::string label;
  Index baseline;   // states x components of the baseline
  Index flattened;  // single-Gaussian states after flattening
  Index final;      // states surviving in the kept model
};

struct PipelineResult {
  std::vector<HmmModel> baseline;
  std::vector<HmmModel> flat_init;  // equiprobable flattened models, the feedback target
  std::vector<HmmModel> final_models;
  std::vector<TraceRow> baseline_trace;
  std::vector<FeedbackRound> rounds;
  double baseline_accuracy = 0.0;  // training-set accuracy of the baseline
  std::size_t kept_round = 0;
  double kept_epsilon = 0.0;
  double kept_accuracy = 0.0;
  std::vector<BudgetLine> budget;
  bool budget_matched = false;  // flattened count equals baseline count for every class
};

/// Flat init -> Baum-Welch with splitting -> equiprobable flatten ->
/// Baum-Welch without splitting -> epsilon sweep, then `feedback_iterations`
/// rounds of emission feedback -> retrain -> sweep, keeping the most
/// accurate model set seen (earliest round on ties).
PipelineResult run_pipeline(std::span<const Utterance> corpus, const PipelineConfig& config);

/// Baseline only: flat init + Baum-Welch with mixture splitting.
TrainingResult train_baseline(std::span<const Utterance> corpus, const PipelineConfig& config, const Floors& floors);

void write_pipeline_report(std::ostream& out, const PipelineResult& result, const PipelineConfig& config);
/// CSV: round,epsilon,accuracy,edges_kept,states_kept,decode_failures,kept
void write_pipeline_sweeps_csv(std::ostream& out, const PipelineResult& result);

}  // namespace hmmtopo
