// include/hmmtopo/model.hpp

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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmmtopo/gaussian.hpp"

namespace hmmtopo {

using Eigen::Index;

/// One class model. Transition matrix rows/columns are ordered
/// {entry, 1..N, exit}; entry and exit are non-emitting. Probabilities are
/// stored in the linear domain so the printed form round-trips exactly;
/// log_transition() gives the log-domain view used by every algorithm.
struct HmmModel {
  static constexpr Index kEntry = 0;

  std::string label;
  Eigen::MatrixXd transitions;  // (N+2) x (N+2), row-stochastic where non-empty
  std::vector<Gmmd> emissions;  // emissions[s - 1] belongs to emitting state s
  /// Stable identity of each emitting state (tags[s - 1]). Pruning keeps tags
  /// of surviving states so they can be mapped back onto the unpruned model.
  std::vector<int> tags;

  Index num_states() const { return static_cast<Index>(emissions.size()); }
  Index exit_state() const { return num_states() + 1; }
  Index dim() const { return emissions.empty() ? 0 : emissions.front().dim(); }

  double log_transition(Index from, Index to) const { return safe_log(transitions(from, to)); }
  const Gmmd& emission(Index state) const { return emissions[static_cast<std::size_t>(state - 1)]; }
  Gmmd& emission(Index state) { return emissions[static_cast<std::size_t>(state - 1)]; }

  /// Columns with non-zero probability in row `from`, ascending.
  std::vector<Index> support(Index from) const;
  Index edge_count() const;
  Index gaussian_count() const;
  Index max_components() const;
};

/// Model with identity tags 0..N-1 and the given parts.
HmmModel make_model(std::string label, Eigen::MatrixXd transitions, std::vector<Gmmd> emissions);

struct Violation {
  enum class Kind {
    kShape,
    kBadProbability,
    kRowNotStochastic,
    kEntrySelfLoop,
    kTransitionIntoEntry,
    kTransitionOutOfExit,
    kTeeTransition,
    kEmissionDimension,
    kWeightSum,
    kWeightFloor,
    kExitUnreachable,
    kTags,
  };
  Kind kind;
  Index state;  // matrix row / state index the violation refers to, -1 if model-wide
  std::string message;
};

inline constexpr double kStochasticTolerance = 1e-10;
inline constexpr double kWeightFloor = 1e-6;

/// Checks every model invariant; empty result means the model is valid.
std::vector<Violation> validate_model(const HmmModel& model);

/// Throws ValidationError listing the violations, if any.
void require_valid(const HmmModel& model);

/// Left-to-right skeleton over n emitting states (self-loop + next), rows equiprobable.
Eigen::MatrixXd left_to_right_transitions(Index n);

/// Replace every non-empty row by the uniform distribution over its support.
Eigen::MatrixXd equiprobable_rows(const Eigen::MatrixXd& transitions);

}  // namespace hmmtopo
