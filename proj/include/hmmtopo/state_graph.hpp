// include/hmmtopo/state_graph.hpp

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

#include <span>
#include <vector>

#include <Eigen/Core>

#include "hmmtopo/features.hpp"
#include "hmmtopo/model.hpp"

namespace hmmtopo {

/// Emitting-state graph for a sequence of class models joined exit-to-entry.
/// Graph state g corresponds to emitting state `local[g]` of segment
/// `segment[g]`. Arcs are kept sorted by (from, to).
struct StateGraph {
  struct Arc {
    Index from;
    Index to;
    double log_prob;
  };

  std::vector<const HmmModel*> segments;
  std::vector<Index> segment;
  std::vector<Index> local;
  Eigen::VectorXd entry_log_prob;  // entry -> g
  Eigen::VectorXd exit_log_prob;   // g -> exit
  std::vector<Arc> arcs;
  std::vector<std::vector<Index>> arcs_in;   // arc ids by destination
  std::vector<std::vector<Index>> arcs_out;  // arc ids by source

  Index num_states() const { return static_cast<Index>(segment.size()); }
  const Gmmd& emission(Index g) const { return segments[static_cast<std::size_t>(segment[g])]->emission(local[g]); }
  /// Log-probability of the g -> h arc, kLogZero when absent.
  double arc_log_prob(Index g, Index h) const;
};

/// Concatenates `models` in order. Cross-segment arcs carry
/// a(i -> exit) * a(entry -> j).
StateGraph build_state_graph(std::span<const HmmModel* const> models);
StateGraph build_state_graph(const HmmModel& model);

/// T x S matrix of ln b_g(o_t), evaluating each distinct emission once.
Eigen::MatrixXd emission_log_likelihoods(const StateGraph& graph, const FeatureSequence& features);

}  // namespace hmmtopo
