// src/state_graph.cpp

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

#include "hmmtopo/state_graph.hpp"

#include <algorithm>
#include <map>

#include "hmmtopo/errors.hpp"

namespace hmmtopo {

double StateGraph::arc_log_prob(Index g, Index h) const {
  for (Index id : arcs_out[static_cast<std::size_t>(g)])
    if (arcs[static_cast<std::size_t>(id)].to == h) return arcs[static_cast<std::size_t>(id)].log_prob;
  return kLogZero<double>;
}

StateGraph build_state_graph(std::span<const HmmModel* const> models) {
  if (models.empty()) throw UsageError("build_state_graph: no models");
  StateGraph g;
  g.segments.assign(models.begin(), models.end());
  std::vector<Index> offset;
  for (std::size_t s = 0; s < models.size(); ++s) {
    offset.push_back(static_cast<Index>(g.segment.size()));
    for (Index i = 1; i <= models[s]->num_states(); ++i) {
      g.segment.push_back(static_cast<Index>(s));
      g.local.push_back(i);
    }
  }
  const Index total = g.num_states();
  g.entry_log_prob = Eigen::VectorXd::Constant(total, kLogZero<double>);
  g.exit_log_prob = Eigen::VectorXd::Constant(total, kLogZero<double>);

  const HmmModel& first = *models.front();
  for (Index j = 1; j <= first.num_states(); ++j) g.entry_log_prob[j - 1] = first.log_transition(0, j);
  const HmmModel& last = *models.back();
  for (Index i = 1; i <= last.num_states(); ++i)
    g.exit_log_prob[offset.back() + i - 1] = last.log_transition(i, last.exit_state());

  for (std::size_t s = 0; s < models.size(); ++s) {
    const HmmModel& m = *models[s];
    for (Index i = 1; i <= m.num_states(); ++i) {
      const Index from = offset[s] + i - 1;
      for (Index j = 1; j <= m.num_states(); ++j)
        if (m.transitions(i, j) > 0.0) g.arcs.push_back({from, offset[s] + j - 1, m.log_transition(i, j)});
      if (s + 1 < models.size() && m.transitions(i, m.exit_state()) > 0.0) {
        const HmmModel& next = *models[s + 1];
        for (Index j = 1; j <= next.num_states(); ++j)
          if (next.transitions(0, j) > 0.0)
            g.arcs.push_back({from, offset[s + 1] + j - 1,
                              m.log_transition(i, m.exit_state()) + next.log_transition(0, j)});
      }
    }
  }
  std::sort(g.arcs.begin(), g.arcs.end(),
            [](const auto& a, const auto& b) { return a.from != b.from ? a.from < b.from : a.to < b.to; });
  g.arcs_in.resize(static_cast<std::size_t>(total));
  g.arcs_out.resize(static_cast<std::size_t>(total));
  for (std::size_t id = 0; id < g.arcs.size(); ++id) {
    g.arcs_out[static_cast<std::size_t>(g.arcs[id].from)].push_back(static_cast<Index>(id));
    g.arcs_in[static_cast<std::size_t>(g.arcs[id].to)].push_back(static_cast<Index>(id));
  }
  return g;
}

StateGraph build_state_graph(const HmmModel& model) {
  const HmmModel* one[] = {&model};
  return build_state_graph(std::span<const HmmModel* const>(one));
}

Eigen::MatrixXd emission_log_likelihoods(const StateGraph& graph, const FeatureSequence& features) {
  const Index t_len = features.length();
  const Index s_len = graph.num_states();
  Eigen::MatrixXd out(t_len, s_len);
  const Eigen::MatrixXd x = features.frames.cast<double>();
  std::map<const Gmmd*, Index> first_column;
  for (Index g = 0; g < s_len; ++g) {
    const Gmmd& e = graph.emission(g);
    if (e.dim() != features.dim()) throw UsageError("feature dimension does not match model dimension");
    const auto [it, fresh] = first_column.emplace(&e, g);
    if (!fresh) {
      out.col(g) = out.col(it->second);
      continue;
    }
    for (Index t = 0; t < t_len; ++t) out(t, g) = e.log_density(x.row(t).transpose());
  }
  return out;
}

}  // namespace hmmtopo
