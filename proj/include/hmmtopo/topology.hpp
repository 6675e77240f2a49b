// include/hmmtopo/topology.hpp

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
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmmtopo/config.hpp"
#include "hmmtopo/decoder.hpp"
#include "hmmtopo/manifest.hpp"
#include "hmmtopo/model.hpp"
#include "hmmtopo/scoring.hpp"
#include "hmmtopo/training.hpp"

namespace hmmtopo {

enum class FlattenMode {
  kEquiprobable,       // uniform over every row's allowed edges
  kWeightPreserving,   // a(i->j) * w(j,k); leaves the likelihood unchanged
};

/// Replaces each GMM state by one single-Gaussian state per component.
/// Flattened state (i, k) has index offset_i + k and connects to every
/// component state of every successor of i (self-loops included).
HmmModel flatten_model(const HmmModel& model, FlattenMode mode);

/// Zeroes every transition with probability <= epsilon, except
///  - the highest-probability edge of each row (lowest column on ties), and
///  - each state's edge on its most probable path to exit,
/// then removes states that are unreachable from entry or cannot reach exit
/// and renormalizes the surviving rows. Both exceptions are independent of
/// epsilon, so surviving edge sets are nested as epsilon grows.
HmmModel prune(const HmmModel& model, double epsilon);

/// `fresh_flat`'s topology with every row equiprobable over its support, and
/// the emission of every state whose tag survives in `trained_pruned`
/// replaced by the trained one.
HmmModel feedback_emissions(const HmmModel& trained_pruned, const HmmModel& fresh_flat);

/// Directed edges by state tag; entry is -1 and exit is -2.
std::set<std::pair<int, int>> edge_set(const HmmModel& model);

struct Evaluation {
  ScoringReport report;
  std::size_t decode_failures = 0;
  double accuracy() const { return report.accuracy; }
};

/// Decodes `corpus` with a network over `models`. A failed decode scores as
/// an empty hypothesis (every reference word deleted).
Evaluation evaluate_models(std::span<const HmmModel> models, std::span<const Utterance> corpus, NetworkMode mode,
                           double insertion_log_penalty, int jobs);

struct SweepConfig {
  std::vector<double> epsilons = {0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.15, 0.2, 0.25, 0.3};
  NetworkMode decode_mode = NetworkMode::kIsolated;
  double insertion_log_penalty = 0.0;
  bool retrain_after_prune = false;
  int jobs = 1;

  static SweepConfig from_config(const KeyValueConfig& cfg);
  static const std::vector<std::string_view>& config_keys();
  void validate() const;
};

struct SweepRecord {
  double epsilon;
  std::vector<HmmModel> models;
  double accuracy;
  Index edges;   // surviving transitions summed over all class models
  Index states;  // surviving emitting states summed over all class models
  std::size_t decode_failures;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // grid order
  std::size_t kept = 0;
  std::string tie_note;  // non-empty when another epsilon matched the kept accuracy

  const SweepRecord& best() const { return records[kept]; }
};

/// Prunes every class model at each epsilon (one global threshold), optionally
/// retrains, decodes the training corpus and keeps the most accurate set;
/// ties go to the smallest epsilon.
SweepResult sweep_threshold(std::span<const HmmModel> flat_models, std::span<const Utterance> corpus,
                            const SweepConfig& config, const TrainingConfig& retrain, const Floors& floors);

/// CSV: epsilon,accuracy,edges_kept,states_kept,decode_failures,kept
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace hmmtopo
