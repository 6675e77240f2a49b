// src/diagnostics.cpp

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

#include "hmmtopo/diagnostics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "hmmtopo/errors.hpp"
#include "hmmtopo/forward_backward.hpp"
#include "hmmtopo/log_math.hpp"
#include "hmmtopo/state_graph.hpp"
#include "hmmtopo/training.hpp"

namespace hmmtopo {

namespace {

StateGraph transcript_graph(std::span<const HmmModel> models, const Utterance& utterance) {
  std::vector<const HmmModel*> seq;
  for (Index id : model_indices(models, utterance.transcript)) seq.push_back(&models[static_cast<std::size_t>(id)]);
  return build_state_graph(seq);
}

IdealPath path_from_gamma(const StateGraph& graph, const Eigen::MatrixXd& gamma) {
  IdealPath p;
  for (Index t = 0; t < gamma.rows(); ++t) {
    Index best = 0;
    for (Index g = 1; g < gamma.cols(); ++g)
      if (gamma(t, g) > gamma(t, best)) best = g;
    p.state.push_back(best);
    p.segment.push_back(graph.segment[best]);
    p.local.push_back(graph.local[best]);
  }
  return p;
}

}  // namespace

IdealPath ideal_path(std::span<const HmmModel> models, const Utterance& utterance) {
  const StateGraph graph = transcript_graph(models, utterance);
  const auto fb = forward_backward(graph, emission_log_likelihoods(graph, utterance.features));
  return path_from_gamma(graph, fb.posteriors.gamma);
}

double population_variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size());
}

double log_linear_stddev(std::span<const double> log_values) {
  if (log_values.empty()) return kLogZero<double>;
  const double log_n = std::log(static_cast<double>(log_values.size()));
  std::vector<double> doubled(log_values.begin(), log_values.end());
  for (double& v : doubled) v *= 2.0;
  const double log_m1 = log_sum_exp(log_values) - log_n;
  const double log_m2 = log_sum_exp(std::span<const double>(doubled)) - log_n;
  const double ratio = std::exp(2.0 * log_m1 - log_m2);  // E[X]^2 / E[X^2] in (0, 1]
  if (ratio >= 1.0) return kLogZero<double>;
  return 0.5 * (log_m2 + std::log1p(-ratio));
}

ImbalanceReport imbalance_coefficients(std::span<const HmmModel> models, std::span<const Utterance> corpus) {
  ImbalanceReport r;
  for (const auto& u : corpus) {
    const StateGraph graph = transcript_graph(models, u);
    const Eigen::MatrixXd log_b = emission_log_likelihoods(graph, u.features);
    ForwardBackwardResult fb;
    try {
      fb = forward_backward(graph, log_b);
    } catch (const AlignmentInfeasible&) {
      ++r.skipped_utterances;
      continue;
    }
    const IdealPath path = path_from_gamma(graph, fb.posteriors.gamma);
    for (std::size_t t = 0; t + 1 < path.state.size(); ++t) {
      const Index s = path.state[t];
      const Index i = path.state[t + 1];
      const double taken = graph.arc_log_prob(s, i);
      if (is_log_zero(taken)) {
        ++r.infeasible_steps;
        continue;
      }
      for (Index id : graph.arcs_out[static_cast<std::size_t>(s)]) {
        const auto& arc = graph.arcs[static_cast<std::size_t>(id)];
        if (arc.to == i) continue;
        r.ln_alpha.push_back(arc.log_prob - taken);
        r.ln_beta.push_back(log_b(static_cast<Index>(t) + 1, i) - log_b(static_cast<Index>(t) + 1, arc.to));
      }
    }
  }
  r.samples = r.ln_alpha.size();
  if (r.samples == 0) throw DiagnosticError("imbalance_coefficients: no (alpha, beta) samples collected");
  r.variance_ln_alpha = population_variance(r.ln_alpha);
  r.variance_ln_beta = population_variance(r.ln_beta);
  r.log_std_alpha = log_linear_stddev(r.ln_alpha);
  r.log_std_beta = log_linear_stddev(r.ln_beta);
  r.log_std_ratio = r.log_std_beta - r.log_std_alpha;
  return r;
}

void write_imbalance_text(std::ostream& out, const ImbalanceReport& r) {
  out << std::setprecision(17);
  out << "samples " << r.samples << '\n';
  out << "variance_ln_alpha " << r.variance_ln_alpha << '\n';
  out << "variance_ln_beta " << r.variance_ln_beta << '\n';
  out << "log_std_alpha " << r.log_std_alpha << '\n';
  out << "log_std_beta " << r.log_std_beta << '\n';
  out << "log_std_ratio " << r.log_std_ratio << '\n';
  out << "log10_std_ratio " << r.log_std_ratio / std::log(10.0) << '\n';
  out << "infeasible_steps " << r.infeasible_steps << '\n';
  out << "skipped_utterances " << r.skipped_utterances << '\n';
}

void write_imbalance_samples_csv(std::ostream& out, const ImbalanceReport& r) {
  out << "ln_alpha,ln_beta\n" << std::setprecision(17);
  for (std::size_t k = 0; k < r.samples; ++k) out << r.ln_alpha[k] << ',' << r.ln_beta[k] << '\n';
}

}  // namespace hmmtopo
