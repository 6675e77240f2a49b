// src/topology.cpp

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

#include "hmmtopo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "hmmtopo/errors.hpp"
#include "hmmtopo/log_math.hpp"

namespace hmmtopo {

HmmModel flatten_model(const HmmModel& model, FlattenMode mode) {
  require_valid(model);
  const Index n = model.num_states();
  std::vector<Index> offset(static_cast<std::size_t>(n + 2), 0);
  Index total = 0;
  for (Index i = 1; i <= n; ++i) {
    offset[static_cast<std::size_t>(i)] = total + 1;
    total += model.emission(i).size();
  }
  offset[static_cast<std::size_t>(n + 1)] = total + 1;
  const Index exit = total + 1;

  // Flattened index range of original state j: entry and exit map to themselves.
  auto first = [&](Index j) { return j == 0 ? Index{0} : (j == n + 1 ? exit : offset[static_cast<std::size_t>(j)]); };
  auto count = [&](Index j) { return (j == 0 || j == n + 1) ? Index{1} : model.emission(j).size(); };
  auto weight = [&](Index j, Index k) { return (j == 0 || j == n + 1) ? 1.0 : model.emission(j).weights()[k]; };

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(total + 2, total + 2);
  for (Index i = 0; i <= n; ++i)
    for (Index j = 0; j <= n + 1; ++j) {
      const double p = model.transitions(i, j);
      if (p <= 0.0) continue;
      for (Index src = first(i); src < first(i) + count(i); ++src)
        for (Index k = 0; k < count(j); ++k) a(src, first(j) + k) = p * weight(j, k);
    }
  if (mode == FlattenMode::kEquiprobable) a = equiprobable_rows(a);

  std::vector<Gmmd> emissions;
  for (Index i = 1; i <= n; ++i)
    for (const auto& c : model.emission(i).components()) emissions.emplace_back(c);
  HmmModel out = make_model(model.label, std::move(a), std::move(emissions));
  require_valid(out);
  return out;
}

namespace {

// Next hop of each state on its most probable path to exit (-1 if none).
std::vector<Index> best_exit_hops(const Eigen::MatrixXd& a, Index exit) {
  const Index size = a.rows();
  std::vector<double> dist(static_cast<std::size_t>(size), std::numeric_limits<double>::infinity());
  std::vector<Index> next(static_cast<std::size_t>(size), -1);
  std::vector<char> done(static_cast<std::size_t>(size), 0);
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(exit)] = 0.0;
  queue.push({0.0, exit});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    for (Index v = 0; v < size; ++v) {
      if (v == u || a(v, u) <= 0.0) continue;
      const double nd = d - std::log(a(v, u));
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        next[static_cast<std::size_t>(v)] = u;
        queue.push({nd, v});
      }
    }
  }
  return next;
}

std::vector<char> reachable(const Eigen::MatrixXd& keep, Index start, bool reverse) {
  const Index size = keep.rows();
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  std::vector<Index> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    for (Index v = 0; v < size; ++v) {
      const bool edge = reverse ? keep(v, u) > 0.0 : keep(u, v) > 0.0;
      if (edge && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

HmmModel prune(const HmmModel& model, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("prune: epsilon must lie in (0, 1)");
  require_valid(model);
  const Eigen::MatrixXd& a = model.transitions;
  const Index size = a.rows();
  const Index exit = model.exit_state();

  Eigen::MatrixXd keep = (a.array() > epsilon).cast<double>().matrix();
  for (Index i = 0; i < exit; ++i) {
    Index arg = -1;
    for (Index j = 0; j < size; ++j)
      if (a(i, j) > 0.0 && (arg < 0 || a(i, j) > a(i, arg))) arg = j;
    if (arg >= 0) keep(i, arg) = 1.0;
  }
  const auto hops = best_exit_hops(a, exit);
  for (Index i = 0; i < exit; ++i)
    if (hops[static_cast<std::size_t>(i)] >= 0) keep(i, hops[static_cast<std::size_t>(i)]) = 1.0;

  const auto from_entry = reachable(keep, 0, false);
  const auto to_exit = reachable(keep, exit, true);
  std::vector<Index> alive;
  for (Index i = 0; i < size; ++i)
    if (from_entry[static_cast<std::size_t>(i)] && to_exit[static_cast<std::size_t>(i)]) alive.push_back(i);

  const Index m = static_cast<Index>(alive.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  for (Index r = 0; r < m; ++r) {
    for (Index c = 0; c < m; ++c) {
      const Index i = alive[static_cast<std::size_t>(r)];
      const Index j = alive[static_cast<std::size_t>(c)];
      if (keep(i, j) > 0.0) b(r, c) = a(i, j);
    }
    const double total = b.row(r).sum();
    if (total > 0.0) b.row(r) /= total;
  }

  HmmModel out;
  out.label = model.label;
  out.transitions = std::move(b);
  for (Index r = 1; r + 1 < m; ++r) {
    const Index s = alive[static_cast<std::size_t>(r)];
    out.emissions.push_back(model.emission(s));
    out.tags.push_back(model.tags[static_cast<std::size_t>(s - 1)]);
  }
  require_valid(out);
  return out;
}

HmmModel feedback_emissions(const HmmModel& trained_pruned, const HmmModel& fresh_flat) {
  HmmModel out = fresh_flat;
  out.transitions = equiprobable_rows(fresh_flat.transitions);
  for (Index s = 1; s <= trained_pruned.num_states(); ++s) {
    const int tag = trained_pruned.tags[static_cast<std::size_t>(s - 1)];
    const auto it = std::find(fresh_flat.tags.begin(), fresh_flat.tags.end(), tag);
    if (it == fresh_flat.tags.end())
      throw UsageError("feedback_emissions: state tag " + std::to_string(tag) + " has no counterpart in the flat model");
    if (trained_pruned.emission(s).dim() != fresh_flat.dim())
      throw UsageError("feedback_emissions: emission dimension mismatch");
    out.emission(static_cast<Index>(it - fresh_flat.tags.begin()) + 1) = trained_pruned.emission(s);
  }
  require_valid(out);
  return out;
}

std::set<std::pair<int, int>> edge_set(const HmmModel& model) {
  const Index exit = model.exit_state();
  auto id = [&](Index i) {
    if (i == 0) return -1;
    if (i == exit) return -2;
    return model.tags[static_cast<std::size_t>(i - 1)];
  };
  std::set<std::pair<int, int>> edges;
  for (Index i = 0; i < model.transitions.rows(); ++i)
    for (Index j = 0; j < model.transitions.cols(); ++j)
      if (model.transitions(i, j) > 0.0) edges.emplace(id(i), id(j));
  return edges;
}

Evaluation evaluate_models(std::span<const HmmModel> models, std::span<const Utterance> corpus, NetworkMode mode,
                           double insertion_log_penalty, int jobs) {
  const RecognitionNetwork net =
      build_network(std::vector<HmmModel>(models.begin(), models.end()), mode, insertion_log_penalty);
  const auto results = decode_corpus(net, corpus, jobs);
  Evaluation ev;
  std::vector<Transcript> refs, hyps;
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    refs.push_back(corpus[u].transcript);
    hyps.push_back(results[u].transcript);
    if (!results[u].ok) ++ev.decode_failures;
  }
  ev.report = score_pairs(refs, hyps);
  return ev;
}

const std::vector<std::string_view>& SweepConfig::config_keys() {
  static const std::vector<std::string_view> keys = {"epsilons", "decode_mode", "insertion_penalty",
                                                     "retrain_after_prune"};
  return keys;
}

SweepConfig SweepConfig::from_config(const KeyValueConfig& cfg) {
  SweepConfig c;
  c.epsilons = cfg.get_doubles("epsilons", c.epsilons);
  const auto mode = cfg.get_string("decode_mode", "isolated");
  if (mode == "isolated") {
    c.decode_mode = NetworkMode::kIsolated;
  } else if (mode == "loop") {
    c.decode_mode = NetworkMode::kLoop;
  } else {
    throw ValidationError("sweep config: decode_mode must be 'isolated' or 'loop'");
  }
  c.insertion_log_penalty = cfg.get_double("insertion_penalty", c.insertion_log_penalty);
  c.retrain_after_prune = cfg.get_bool("retrain_after_prune", c.retrain_after_prune);
  c.validate();
  return c;
}

void SweepConfig::validate() const {
  if (epsilons.empty()) throw ValidationError("sweep config: epsilon grid is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0)) throw ValidationError("sweep config: epsilons must lie in (0, 1)");
    if (i > 0 && !(epsilons[i] > epsilons[i - 1]))
      throw ValidationError("sweep config: epsilon grid must be strictly ascending");
  }
  if (!std::isfinite(insertion_log_penalty)) throw ValidationError("sweep config: insertion_penalty must be finite");
}

SweepResult sweep_threshold(std::span<const HmmModel> flat_models, std::span<const Utterance> corpus,
                            const SweepConfig& config, const TrainingConfig& retrain, const Floors& floors) {
  config.validate();
  SweepResult result;
  for (double eps : config.epsilons) {
    std::vector<HmmModel> pruned;
    for (const auto& m : flat_models) pruned.push_back(prune(m, eps));
    if (config.retrain_after_prune) {
      TrainingConfig cfg = retrain;
      cfg.jobs = config.jobs;
      pruned = baum_welch_train(std::move(pruned), corpus, cfg, false, floors).models;
    }
    const Evaluation ev = evaluate_models(pruned, corpus, config.decode_mode, config.insertion_log_penalty, config.jobs);
    SweepRecord rec{eps, std::move(pruned), ev.accuracy(), 0, 0, ev.decode_failures};
    for (const auto& m : rec.models) {
      rec.edges += m.edge_count();
      rec.states += m.num_states();
    }
    result.records.push_back(std::move(rec));
    if (result.records.back().accuracy > result.records[result.kept].accuracy) result.kept = result.records.size() - 1;
  }
  const double best = result.best().accuracy;
  std::ostringstream note;
  note << std::setprecision(17);
  bool tie = false;
  for (std::size_t k = 0; k < result.records.size(); ++k)
    if (k != result.kept && result.records[k].accuracy == best) {
      if (!tie) note << "tie at accuracy " << best << ": kept epsilon " << result.best().epsilon << " over";
      note << ' ' << result.records[k].epsilon;
      tie = true;
    }
  result.tie_note = note.str();
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "epsilon,accuracy,edges_kept,states_kept,decode_failures,kept\n" << std::setprecision(17);
  for (std::size_t k = 0; k < sweep.records.size(); ++k) {
    const auto& r = sweep.records[k];
    out << r.epsilon << ',' << r.accuracy << ',' << r.edges << ',' << r.states << ',' << r.decode_failures << ','
        << (k == sweep.kept ? 1 : 0) << '\n';
  }
}

}  // namespace hmmtopo
