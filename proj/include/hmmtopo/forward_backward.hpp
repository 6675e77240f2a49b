// include/hmmtopo/forward_backward.hpp

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

#include <Eigen/Core>

#include "hmmtopo/features.hpp"
#include "hmmtopo/model.hpp"
#include "hmmtopo/state_graph.hpp"

namespace hmmtopo {

struct Posteriors {
  Eigen::MatrixXd gamma;  // T x S state occupancy
  Eigen::MatrixXd xi;     // (T-1) x A, posterior of graph arc a between frames t and t+1
  Eigen::VectorXd exit;   // S, posterior of leaving through exit after the last frame
};

struct ForwardBackwardResult {
  Posteriors posteriors;
  double log_likelihood = 0.0;
  Eigen::MatrixXd log_alpha;  // T x S
  Eigen::MatrixXd log_beta;   // T x S
};

/// Log-domain forward pass; returns kLogZero when no path can emit the frames.
double forward_log_likelihood(const StateGraph& graph, const Eigen::MatrixXd& log_b);
double forward_log_likelihood(const HmmModel& model, const FeatureSequence& features);

/// Exact posteriors. Throws AlignmentInfeasible when the frames cannot be
/// aligned to the graph (e.g. fewer frames than the shortest path).
ForwardBackwardResult forward_backward(const StateGraph& graph, const Eigen::MatrixXd& log_b);
ForwardBackwardResult forward_backward(const HmmModel& model, const FeatureSequence& features);

}  // namespace hmmtopo
