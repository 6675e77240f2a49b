// include/hmmtopo/training.hpp

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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmmtopo/config.hpp"
#include "hmmtopo/forward_backward.hpp"
#include "hmmtopo/manifest.hpp"
#include "hmmtopo/model.hpp"

namespace hmmtopo {

struct TrainingConfig {
  int max_iterations = 20;  // per splitting stage
  double tolerance = 1e-4;  // relative log-likelihood gain
  std::vector<int> schedule = {1, 2, 4};  // mixture sizes, one stage each
  double variance_floor_scale = 1e-4;     // times the global per-dimension variance
  double weight_floor = kWeightFloor;
  double split_perturbation = 0.2;  // in per-dimension standard deviations
  int jobs = 1;

  static TrainingConfig from_config(const KeyValueConfig& cfg);
  static const std::vector<std::string_view>& config_keys();
  void validate() const;
};

struct GlobalStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  double frames = 0;
};

struct Floors {
  Eigen::VectorXd variance;
  double weight = kWeightFloor;
};

GlobalStats global_statistics(std::span<const Utterance> corpus);
Floors make_floors(const GlobalStats& stats, const TrainingConfig& config);

/// Every emitting state gets the global Gaussian; rows of `skeleton` become
/// equiprobable over their non-zero entries.
HmmModel flat_init(const GlobalStats& stats, const Eigen::MatrixXd& skeleton, std::string label);
HmmModel flat_init(std::span<const Utterance> corpus, const Eigen::MatrixXd& skeleton, std::string label);

/// Sufficient statistics of one model. Transition counts use matrix indices
/// (entry row 0, exit column N+1).
struct ModelAccumulator {
  Eigen::MatrixXd transition_counts;
  std::vector<Eigen::VectorXd> occupancy;  // per state: M
  std::vector<Eigen::MatrixXd> sum;        // per state: M x D
  std::vector<Eigen::MatrixXd> sum_sq;     // per state: M x D

  explicit ModelAccumulator(const HmmModel& model);
  void merge(const ModelAccumulator& other);
};

struct Accumulators {
  std::vector<ModelAccumulator> models;
  double log_likelihood = 0.0;
  std::size_t utterances = 0;
  std::size_t skipped = 0;
  std::size_t frames = 0;

  explicit Accumulators(std::span<const HmmModel> model_set);
  void merge(const Accumulators& other);
};

/// Resolves transcript labels to model indices; throws UsageError on unknown labels.
std::vector<Index> model_indices(std::span<const HmmModel> models, const Transcript& transcript);

/// Adds one utterance's statistics. Returns false (and counts a skip) when
/// the utterance cannot be aligned to its transcript models.
bool accumulate_utterance(std::span<const HmmModel> models, const Utterance& utterance, Accumulators& acc);

/// Utterances are accumulated in fixed chunks of kEStepChunk, each chunk
/// sequentially, and chunks are merged in order, so the result does not
/// depend on `jobs`.
inline constexpr Index kEStepChunk = 8;
Accumulators expectation_step(std::span<const HmmModel> models, std::span<const Utterance> corpus, int jobs);

HmmModel reestimate(const HmmModel& model, const ModelAccumulator& acc, const Floors& floors);
std::vector<HmmModel> maximization_step(std::span<const HmmModel> models, const Accumulators& acc,
                                        const Floors& floors);

/// Splits the heaviest component of each state (ties to the lowest index)
/// until every state has `target` components: halved weights, means moved
/// by +/- perturbation standard deviations, variances copied.
HmmModel split_mixtures(const HmmModel& model, Index target, double perturbation = 0.2);

/// Floors weights at `floor` and renormalizes the rest to keep the sum at 1.
Eigen::VectorXd floor_weights(Eigen::VectorXd weights, double floor);

struct TraceRow {
  int stage;
  int iteration;
  Index components;
  double log_likelihood;
  std::size_t skipped;
};

struct TrainingResult {
  std::vector<HmmModel> models;
  std::vector<TraceRow> trace;
};

/// Embedded Baum-Welch re-estimation over concatenated transcript models.
/// With allow_splitting each schedule entry is one stage, preceded by
/// split_mixtures; otherwise a single stage at the current mixture sizes.
TrainingResult baum_welch_train(std::vector<HmmModel> models, std::span<const Utterance> corpus,
                                const TrainingConfig& config, bool allow_splitting, const Floors& floors);
TrainingResult baum_welch_train(std::vector<HmmModel> models, std::span<const Utterance> corpus,
                                const TrainingConfig& config, bool allow_splitting);

/// CSV: stage,iteration,components,log_likelihood,skipped
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace hmmtopo
