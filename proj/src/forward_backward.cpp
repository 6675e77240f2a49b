// src/forward_backward.cpp

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

#include "hmmtopo/forward_backward.hpp"

#include <cmath>
#include <vector>

#include "hmmtopo/errors.hpp"
#include "hmmtopo/log_math.hpp"

namespace hmmtopo {

namespace {

// Accumulates terms for one log-sum-exp without allocating per call.
class LogSum {
 public:
  void clear() { terms_.clear(); }
  void add(double v) {
    if (!is_log_zero(v)) terms_.push_back(v);
  }
  double value() const {
    if (terms_.empty()) return kLogZero<double>;
    if (terms_.size() == 1) return terms_.front();
    double peak = terms_.front();
    for (double v : terms_) peak = std::max(peak, v);
    double sum = 0.0;
    for (double v : terms_) sum += std::exp(v - peak);
    return peak + std::log(sum);
  }

 private:
  std::vector<double> terms_;
};

Eigen::MatrixXd forward_pass(const StateGraph& graph, const Eigen::MatrixXd& log_b) {
  const Index t_len = log_b.rows();
  const Index s_len = graph.num_states();
  Eigen::MatrixXd alpha(t_len, s_len);
  alpha.row(0) = (graph.entry_log_prob + log_b.row(0).transpose()).transpose();
  LogSum acc;
  for (Index t = 1; t < t_len; ++t)
    for (Index h = 0; h < s_len; ++h) {
      acc.clear();
      for (Index id : graph.arcs_in[static_cast<std::size_t>(h)]) {
        const auto& arc = graph.arcs[static_cast<std::size_t>(id)];
        acc.add(alpha(t - 1, arc.from) + arc.log_prob);
      }
      const double in = acc.value();
      alpha(t, h) = is_log_zero(in) ? in : in + log_b(t, h);
    }
  return alpha;
}

double terminate(const StateGraph& graph, const Eigen::MatrixXd& alpha) {
  LogSum acc;
  for (Index g = 0; g < graph.num_states(); ++g) acc.add(alpha(alpha.rows() - 1, g) + graph.exit_log_prob[g]);
  return acc.value();
}

}  // namespace

double forward_log_likelihood(const StateGraph& graph, const Eigen::MatrixXd& log_b) {
  if (log_b.rows() < 1) throw UsageError("forward: empty feature sequence");
  return terminate(graph, forward_pass(graph, log_b));
}

double forward_log_likelihood(const HmmModel& model, const FeatureSequence& features) {
  const StateGraph graph = build_state_graph(model);
  return forward_log_likelihood(graph, emission_log_likelihoods(graph, features));
}

ForwardBackwardResult forward_backward(const StateGraph& graph, const Eigen::MatrixXd& log_b) {
  const Index t_len = log_b.rows();
  const Index s_len = graph.num_states();
  if (t_len < 1) throw UsageError("forward_backward: empty feature sequence");
  ForwardBackwardResult r;
  r.log_alpha = forward_pass(graph, log_b);
  r.log_likelihood = terminate(graph, r.log_alpha);
  if (is_log_zero(r.log_likelihood) || !std::isfinite(r.log_likelihood))
    throw AlignmentInfeasible("forward_backward: no path through the model emits all " +
                              std::to_string(t_len) + " frames");

  Eigen::MatrixXd& beta = r.log_beta;
  beta.resize(t_len, s_len);
  beta.row(t_len - 1) = graph.exit_log_prob.transpose();
  LogSum acc;
  for (Index t = t_len - 2; t >= 0; --t)
    for (Index g = 0; g < s_len; ++g) {
      acc.clear();
      for (Index id : graph.arcs_out[static_cast<std::size_t>(g)]) {
        const auto& arc = graph.arcs[static_cast<std::size_t>(id)];
        acc.add(arc.log_prob + log_b(t + 1, arc.to) + beta(t + 1, arc.to));
      }
      beta(t, g) = acc.value();
    }

  const double ll = r.log_likelihood;
  auto& post = r.posteriors;
  post.gamma = (r.log_alpha + beta).array().unaryExpr([ll](double v) { return is_log_zero(v) ? 0.0 : std::exp(v - ll); });
  const Index arcs = static_cast<Index>(graph.arcs.size());
  post.xi = Eigen::MatrixXd::Zero(std::max<Index>(t_len - 1, 0), arcs);
  for (Index t = 0; t + 1 < t_len; ++t)
    for (Index a = 0; a < arcs; ++a) {
      const auto& arc = graph.arcs[static_cast<std::size_t>(a)];
      const double v = r.log_alpha(t, arc.from) + arc.log_prob + log_b(t + 1, arc.to) + beta(t + 1, arc.to);
      if (!is_log_zero(v)) post.xi(t, a) = std::exp(v - ll);
    }
  post.exit.resize(s_len);
  for (Index g = 0; g < s_len; ++g) {
    const double v = r.log_alpha(t_len - 1, g) + graph.exit_log_prob[g];
    post.exit[g] = is_log_zero(v) ? 0.0 : std::exp(v - ll);
  }
  return r;
}

ForwardBackwardResult forward_backward(const HmmModel& model, const FeatureSequence& features) {
  const StateGraph graph = build_state_graph(model);
  return forward_backward(graph, emission_log_likelihoods(graph, features));
}

}  // namespace hmmtopo
