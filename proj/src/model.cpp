// src/model.cpp

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

#include "hmmtopo/model.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace hmmtopo {

std::vector<Index> HmmModel::support(Index from) const {
  std::vector<Index> cols;
  for (Index j = 0; j < transitions.cols(); ++j)
    if (transitions(from, j) > 0.0) cols.push_back(j);
  return cols;
}

Index HmmModel::edge_count() const { return (transitions.array() > 0.0).count(); }

Index HmmModel::gaussian_count() const {
  Index total = 0;
  for (const auto& e : emissions) total += e.size();
  return total;
}

Index HmmModel::max_components() const {
  Index m = 0;
  for (const auto& e : emissions) m = std::max(m, e.size());
  return m;
}

HmmModel make_model(std::string label, Eigen::MatrixXd transitions, std::vector<Gmmd> emissions) {
  HmmModel m{std::move(label), std::move(transitions), std::move(emissions), {}};
  m.tags.resize(m.emissions.size());
  std::iota(m.tags.begin(), m.tags.end(), 0);
  return m;
}

namespace {

std::string row_name(Index i, Index exit) {
  if (i == 0) return "entry";
  if (i == exit) return "exit";
  return "state " + std::to_string(i);
}

}  // namespace

std::vector<Violation> validate_model(const HmmModel& model) {
  std::vector<Violation> out;
  const Index n = model.num_states();
  const Index size = n + 2;
  const Index exit = n + 1;
  using K = Violation::Kind;

  if (n < 1) out.push_back({K::kShape, -1, "model has no emitting states"});
  if (model.transitions.rows() != size || model.transitions.cols() != size) {
    std::ostringstream msg;
    msg << "transition matrix is " << model.transitions.rows() << "x" << model.transitions.cols()
        << ", expected " << size << "x" << size;
    out.push_back({K::kShape, -1, msg.str()});
    return out;
  }
  if (static_cast<Index>(model.tags.size()) != n)
    out.push_back({K::kTags, -1, "tag count differs from emitting state count"});
  else if (std::set<int>(model.tags.begin(), model.tags.end()).size() != model.tags.size())
    out.push_back({K::kTags, -1, "state tags are not unique"});

  const auto& a = model.transitions;
  for (Index i = 0; i < size; ++i) {
    bool bad = false;
    for (Index j = 0; j < size; ++j) {
      const double p = a(i, j);
      if (!std::isfinite(p) || p < 0.0 || p > 1.0 + kStochasticTolerance) bad = true;
    }
    if (bad) {
      out.push_back({K::kBadProbability, i, row_name(i, exit) + ": probability outside [0, 1]"});
      continue;
    }
    const double sum = a.row(i).sum();
    if (i != exit && std::abs(sum - 1.0) > kStochasticTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << row_name(i, exit) << ": row sums to " << sum;
      out.push_back({K::kRowNotStochastic, i, msg.str()});
    }
    if (i > 0 && a(i, 0) > 0.0)
      out.push_back({K::kTransitionIntoEntry, i, row_name(i, exit) + ": transition into entry"});
  }
  if (a(0, 0) > 0.0) out.push_back({K::kEntrySelfLoop, 0, "entry has a self-loop"});
  if (a.row(exit).sum() > 0.0)
    out.push_back({K::kTransitionOutOfExit, exit, "exit has outgoing transitions"});
  if (a(0, exit) > 0.0)
    out.push_back({K::kTeeTransition, 0, "entry connects directly to exit"});

  for (Index s = 1; s <= n; ++s) {
    const auto& e = model.emission(s);
    if (e.dim() != model.dim()) {
      out.push_back({K::kEmissionDimension, s, row_name(s, exit) + ": emission dimension mismatch"});
      continue;
    }
    if (std::abs(e.weights().sum() - 1.0) > kStochasticTolerance)
      out.push_back({K::kWeightSum, s, row_name(s, exit) + ": mixture weights do not sum to 1"});
    if (e.size() > 1 && e.weights().minCoeff() < kWeightFloor * (1.0 - 1e-9))
      out.push_back({K::kWeightFloor, s, row_name(s, exit) + ": mixture weight below floor"});
  }

  // Reachability of exit from entry over the support graph.
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const Index i = stack.back();
    stack.pop_back();
    for (Index j = 0; j < size; ++j)
      if (a(i, j) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        stack.push_back(j);
      }
  }
  if (!seen[static_cast<std::size_t>(exit)])
    out.push_back({K::kExitUnreachable, exit, "exit is unreachable from entry"});
  return out;
}

void require_valid(const HmmModel& model) {
  const auto violations = validate_model(model);
  if (violations.empty()) return;
  std::string msg = "model '" + model.label + "' is invalid:";
  for (const auto& v : violations) msg += "\n  " + v.message;
  throw ValidationError(msg);
}

Eigen::MatrixXd left_to_right_transitions(Index n) {
  if (n < 1) throw UsageError("left_to_right_transitions: need at least one emitting state");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 2, n + 2);
  a(0, 1) = 1.0;
  for (Index s = 1; s <= n; ++s) {
    a(s, s) = 0.5;
    a(s, s + 1) = 0.5;
  }
  return a;
}

Eigen::MatrixXd equiprobable_rows(const Eigen::MatrixXd& transitions) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(transitions.rows(), transitions.cols());
  for (Index i = 0; i < transitions.rows(); ++i) {
    const Index k = (transitions.row(i).array() > 0.0).count();
    if (k == 0) continue;
    for (Index j = 0; j < transitions.cols(); ++j)
      if (transitions(i, j) > 0.0) out(i, j) = 1.0 / static_cast<double>(k);
  }
  return out;
}

}  // namespace hmmtopo
