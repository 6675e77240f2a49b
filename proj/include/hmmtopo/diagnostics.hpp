// include/hmmtopo/diagnostics.hpp

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
#include <vector>

#include "hmmtopo/manifest.hpp"
#include "hmmtopo/model.hpp"

namespace hmmtopo {

/// Per-frame state of the forward-backward "ideal path": the argmax of the
/// state posterior at each frame over the concatenated transcript models
/// (lowest graph index on ties).
struct IdealPath {
  std::vector<Index> state;    // graph state per frame
  std::vector<Index> segment;  // transcript position per frame
  std::vector<Index> local;    // 1-based emitting state within that segment's model
};

/// Throws AlignmentInfeasible when the utterance cannot be aligned.
IdealPath ideal_path(std::span<const HmmModel> models, const Utterance& utterance);

/// Transition (alpha) versus emission (beta) discriminability along ideal
/// paths. For every step s -> i and every other successor k of s:
///   ln alpha = ln a(s->k) - ln a(s->i),  ln beta = ln b_i(o) - ln b_k(o).
/// Variances are population variances of the log samples. The linear-domain
/// standard deviations are computed from log moments,
///   ln var X = ln E[X^2] + ln(1 - E[X]^2 / E[X^2]),
/// so exp() of huge ln beta values never overflows.
struct ImbalanceReport {
  std::vector<double> ln_alpha;
  std::vector<double> ln_beta;
  double variance_ln_alpha = 0.0;
  double variance_ln_beta = 0.0;
  double log_std_alpha = 0.0;  // ln of the linear-domain standard deviation of alpha
  double log_std_beta = 0.0;
  double log_std_ratio = 0.0;  // log_std_beta - log_std_alpha (may be +inf)
  std::size_t samples = 0;
  std::size_t infeasible_steps = 0;      // ideal-path steps without a transition
  std::size_t skipped_utterances = 0;    // alignment-infeasible utterances
};

/// Throws DiagnosticError when no sample could be collected.
ImbalanceReport imbalance_coefficients(std::span<const HmmModel> models, std::span<const Utterance> corpus);

/// Population variance (two-pass).
double population_variance(std::span<const double> values);
/// ln of the linear-domain standard deviation of exp(log_values).
double log_linear_stddev(std::span<const double> log_values);

void write_imbalance_text(std::ostream& out, const ImbalanceReport& report);
/// CSV: ln_alpha,ln_beta
void write_imbalance_samples_csv(std::ostream& out, const ImbalanceReport& report);

}  // namespace hmmtopo
