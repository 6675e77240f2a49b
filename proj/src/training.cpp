// src/training.cpp

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

#include "hmmtopo/training.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "hmmtopo/errors.hpp"
#include "hmmtopo/log_math.hpp"
#include "hmmtopo/parallel.hpp"
#include "hmmtopo/state_graph.hpp"

namespace hmmtopo {

namespace {

// Below this occupancy a state or component keeps its previous parameters.
constexpr double kMinOccupancy = 1e-8;

}  // namespace

const std::vector<std::string_view>& TrainingConfig::config_keys() {
  static const std::vector<std::string_view> keys = {"max_iterations", "tolerance", "schedule",
                                                     "variance_floor_scale", "weight_floor",
                                                     "split_perturbation"};
  return keys;
}

TrainingConfig TrainingConfig::from_config(const KeyValueConfig& cfg) {
  TrainingConfig c;
  c.max_iterations = static_cast<int>(cfg.get_int("max_iterations", c.max_iterations));
  c.tolerance = cfg.get_double("tolerance", c.tolerance);
  c.schedule = cfg.get_ints("schedule", c.schedule);
  c.variance_floor_scale = cfg.get_double("variance_floor_scale", c.variance_floor_scale);
  c.weight_floor = cfg.get_double("weight_floor", c.weight_floor);
  c.split_perturbation = cfg.get_double("split_perturbation", c.split_perturbation);
  c.validate();
  return c;
}

void TrainingConfig::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError("training config: " + m); };
  if (max_iterations < 1) fail("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) fail("tolerance must be > 0");
  if (schedule.empty()) fail("schedule must not be empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1) fail("schedule entries must be >= 1");
    if (i > 0 && schedule[i] < schedule[i - 1]) fail("schedule must be non-decreasing");
  }
  if (!(variance_floor_scale > 0.0)) fail("variance_floor_scale must be > 0");
  if (!(weight_floor > 0.0 && weight_floor < 1.0)) fail("weight_floor must be in (0, 1)");
  if (!(split_perturbation > 0.0)) fail("split_perturbation must be > 0");
}

GlobalStats global_statistics(std::span<const Utterance> corpus) {
  GlobalStats s;
  for (const auto& u : corpus) {
    const Eigen::MatrixXd x = u.features.frames.cast<double>();
    if (s.frames == 0) {
      s.mean = Eigen::VectorXd::Zero(x.cols());
      s.variance = Eigen::VectorXd::Zero(x.cols());
    } else if (x.cols() != s.mean.size()) {
      throw UsageError("corpus mixes feature dimensions");
    }
    s.mean += x.colwise().sum().transpose();
    s.variance += x.array().square().matrix().colwise().sum().transpose();
    s.frames += static_cast<double>(x.rows());
  }
  if (s.frames == 0) throw UsageError("empty corpus: no frames to compute global statistics");
  s.mean /= s.frames;
  s.variance = (s.variance / s.frames - s.mean.cwiseAbs2()).cwiseMax(0.0);
  return s;
}

Floors make_floors(const GlobalStats& stats, const TrainingConfig& config) {
  Floors f;
  // A dimension with zero corpus variance still needs a positive floor.
  f.variance = (config.variance_floor_scale * stats.variance).cwiseMax(1e-12);
  f.weight = config.weight_floor;
  return f;
}

HmmModel flat_init(const GlobalStats& stats, const Eigen::MatrixXd& skeleton, std::string label) {
  const Index n = skeleton.rows() - 2;
  if (n < 1 || skeleton.cols() != skeleton.rows()) throw UsageError("flat_init: malformed skeleton");
  const Eigen::VectorXd var = stats.variance.cwiseMax(1e-12);
  std::vector<Gmmd> emissions(static_cast<std::size_t>(n), Gmmd(Gaussiand(stats.mean, var)));
  HmmModel m = make_model(std::move(label), equiprobable_rows(skeleton), std::move(emissions));
  require_valid(m);
  return m;
}

HmmModel flat_init(std::span<const Utterance> corpus, const Eigen::MatrixXd& skeleton, std::string label) {
  if (corpus.empty()) throw UsageError("flat_init: empty corpus");
  return flat_init(global_statistics(corpus), skeleton, std::move(label));
}

ModelAccumulator::ModelAccumulator(const HmmModel& model)
    : transition_counts(Eigen::MatrixXd::Zero(model.transitions.rows(), model.transitions.cols())) {
  for (Index s = 1; s <= model.num_states(); ++s) {
    const auto m = model.emission(s).size();
    occupancy.push_back(Eigen::VectorXd::Zero(m));
    sum.push_back(Eigen::MatrixXd::Zero(m, model.dim()));
    sum_sq.push_back(Eigen::MatrixXd::Zero(m, model.dim()));
  }
}

void ModelAccumulator::merge(const ModelAccumulator& other) {
  transition_counts += other.transition_counts;
  for (std::size_t s = 0; s < occupancy.size(); ++s) {
    occupancy[s] += other.occupancy[s];
    sum[s] += other.sum[s];
    sum_sq[s] += other.sum_sq[s];
  }
}

Accumulators::Accumulators(std::span<const HmmModel> model_set) {
  models.reserve(model_set.size());
  for (const auto& m : model_set) models.emplace_back(m);
}

void Accumulators::merge(const Accumulators& other) {
  if (other.models.size() != models.size()) throw UsageError("Accumulators::merge: model sets differ");
  for (std::size_t i = 0; i < models.size(); ++i) models[i].merge(other.models[i]);
  log_likelihood += other.log_likelihood;
  utterances += other.utterances;
  skipped += other.skipped;
  frames += other.frames;
}

std::vector<Index> model_indices(std::span<const HmmModel> models, const Transcript& transcript) {
  std::vector<Index> out;
  for (const auto& label : transcript) {
    const auto it = std::find_if(models.begin(), models.end(), [&](const auto& m) { return m.label == label; });
    if (it == models.end()) throw UsageError("no model for transcript label '" + label + "'");
    out.push_back(static_cast<Index>(it - models.begin()));
  }
  if (out.empty()) throw UsageError("empty transcript");
  return out;
}

bool accumulate_utterance(std::span<const HmmModel> models, const Utterance& utterance, Accumulators& acc) {
  const auto ids = model_indices(models, utterance.transcript);
  std::vector<const HmmModel*> seq;
  for (Index id : ids) seq.push_back(&models[static_cast<std::size_t>(id)]);
  const StateGraph graph = build_state_graph(seq);
  const Eigen::MatrixXd log_b = emission_log_likelihoods(graph, utterance.features);
  ForwardBackwardResult fb;
  try {
    fb = forward_backward(graph, log_b);
  } catch (const AlignmentInfeasible&) {
    ++acc.skipped;
    return false;
  }
  const Posteriors& post = fb.posteriors;
  const Eigen::MatrixXd x = utterance.features.frames.cast<double>();
  const Index t_len = x.rows();
  auto model_acc = [&](Index segment) -> ModelAccumulator& {
    return acc.models[static_cast<std::size_t>(ids[static_cast<std::size_t>(segment)])];
  };

  // Transitions.
  for (Index g = 0; g < graph.num_states(); ++g) {
    const double start = post.gamma(0, g);
    if (start > 0.0 && !is_log_zero(graph.entry_log_prob[g])) model_acc(0).transition_counts(0, graph.local[g]) += start;
    const double leave = post.exit[g];
    if (leave > 0.0) {
      const Index seg = graph.segment[g];
      model_acc(seg).transition_counts(graph.local[g], seq[static_cast<std::size_t>(seg)]->exit_state()) += leave;
    }
  }
  if (t_len > 1) {
    const Eigen::VectorXd arc_totals = post.xi.colwise().sum().transpose();
    for (std::size_t a = 0; a < graph.arcs.size(); ++a) {
      const double c = arc_totals[static_cast<Index>(a)];
      if (c == 0.0) continue;
      const auto& arc = graph.arcs[a];
      const Index s_from = graph.segment[arc.from];
      const Index s_to = graph.segment[arc.to];
      if (s_from == s_to) {
        model_acc(s_from).transition_counts(graph.local[arc.from], graph.local[arc.to]) += c;
      } else {
        model_acc(s_from).transition_counts(graph.local[arc.from], seq[static_cast<std::size_t>(s_from)]->exit_state()) += c;
        model_acc(s_to).transition_counts(0, graph.local[arc.to]) += c;
      }
    }
  }

  // Emissions.
  for (Index g = 0; g < graph.num_states(); ++g) {
    ModelAccumulator& ma = model_acc(graph.segment[g]);
    const auto slot = static_cast<std::size_t>(graph.local[g] - 1);
    const Gmmd& e = graph.emission(g);
    for (Index t = 0; t < t_len; ++t) {
      const double occ = post.gamma(t, g);
      if (occ == 0.0) continue;
      const auto xt = x.row(t);
      if (e.size() == 1) {
        ma.occupancy[slot][0] += occ;
        ma.sum[slot].row(0) += occ * xt;
        ma.sum_sq[slot].row(0) += occ * xt.cwiseAbs2();
        continue;
      }
      const Eigen::VectorXd terms = e.component_log_terms(xt.transpose());
      const double total = log_sum_exp(terms);
      for (Index m = 0; m < e.size(); ++m) {
        const double w = occ * std::exp(terms[m] - total);
        if (w == 0.0) continue;
        ma.occupancy[slot][m] += w;
        ma.sum[slot].row(m) += w * xt;
        ma.sum_sq[slot].row(m) += w * xt.cwiseAbs2();
      }
    }
  }
  acc.log_likelihood += fb.log_likelihood;
  acc.utterances += 1;
  acc.frames += static_cast<std::size_t>(t_len);
  return true;
}

Accumulators expectation_step(std::span<const HmmModel> models, std::span<const Utterance> corpus, int jobs) {
  const Index n = static_cast<Index>(corpus.size());
  const Index chunks = (n + kEStepChunk - 1) / kEStepChunk;
  std::vector<Accumulators> partial(static_cast<std::size_t>(chunks), Accumulators(models));
  parallel_for(chunks, jobs, [&](Index c) {
    const Index end = std::min(n, (c + 1) * kEStepChunk);
    for (Index u = c * kEStepChunk; u < end; ++u)
      accumulate_utterance(models, corpus[static_cast<std::size_t>(u)], partial[static_cast<std::size_t>(c)]);
  });
  Accumulators total(models);
  for (const auto& p : partial) total.merge(p);
  return total;
}

Eigen::VectorXd floor_weights(Eigen::VectorXd weights, double floor) {
  weights /= weights.sum();
  if (weights.size() < 2) return weights;
  std::vector<char> pinned(static_cast<std::size_t>(weights.size()), 0);
  for (Index round = 0; round < weights.size(); ++round) {
    bool changed = false;
    for (Index m = 0; m < weights.size(); ++m)
      if (!pinned[static_cast<std::size_t>(m)] && weights[m] < floor) {
        pinned[static_cast<std::size_t>(m)] = 1;
        changed = true;
      }
    if (!changed) break;
    double free_mass = 0.0;
    Index n_pinned = 0;
    for (Index m = 0; m < weights.size(); ++m) {
      if (pinned[static_cast<std::size_t>(m)]) {
        ++n_pinned;
      } else {
        free_mass += weights[m];
      }
    }
    const double scale = free_mass > 0.0 ? (1.0 - floor * static_cast<double>(n_pinned)) / free_mass : 0.0;
    for (Index m = 0; m < weights.size(); ++m)
      weights[m] = pinned[static_cast<std::size_t>(m)] ? floor : weights[m] * scale;
  }
  return weights;
}

HmmModel reestimate(const HmmModel& model, const ModelAccumulator& acc, const Floors& floors) {
  HmmModel out = model;
  const Index size = model.transitions.rows();
  for (Index i = 0; i + 1 < size; ++i) {
    Eigen::RowVectorXd counts = acc.transition_counts.row(i);
    for (Index j = 0; j < size; ++j)
      if (model.transitions(i, j) <= 0.0) counts[j] = 0.0;
    const double total = counts.sum();
    if (total > kMinOccupancy) out.transitions.row(i) = counts / total;
  }

  for (Index s = 1; s <= model.num_states(); ++s) {
    const auto slot = static_cast<std::size_t>(s - 1);
    const Gmmd& old = model.emission(s);
    const Eigen::VectorXd& occ = acc.occupancy[slot];
    const double state_occ = occ.sum();
    if (state_occ <= kMinOccupancy) continue;
    std::vector<Gaussiand> comps;
    Eigen::VectorXd weights(old.size());
    for (Index m = 0; m < old.size(); ++m) {
      weights[m] = occ[m] / state_occ;
      if (occ[m] <= kMinOccupancy) {
        comps.push_back(old.component(m));
        continue;
      }
      Eigen::VectorXd mean = acc.sum[slot].row(m).transpose() / occ[m];
      Eigen::VectorXd var = acc.sum_sq[slot].row(m).transpose() / occ[m] - mean.cwiseAbs2();
      var = var.cwiseMax(floors.variance);
      comps.emplace_back(std::move(mean), std::move(var));
    }
    out.emission(s) = Gmmd(floor_weights(std::move(weights), floors.weight), std::move(comps));
  }
  return out;
}

std::vector<HmmModel> maximization_step(std::span<const HmmModel> models, const Accumulators& acc,
                                        const Floors& floors) {
  std::vector<HmmModel> out;
  out.reserve(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) out.push_back(reestimate(models[i], acc.models[i], floors));
  return out;
}

HmmModel split_mixtures(const HmmModel& model, Index target, double perturbation) {
  HmmModel out = model;
  for (Index s = 1; s <= model.num_states(); ++s) {
    const Gmmd& e = model.emission(s);
    if (e.size() >= target) continue;
    std::vector<double> weights(e.weights().data(), e.weights().data() + e.size());
    std::vector<Gaussiand> comps = e.components();
    while (static_cast<Index>(comps.size()) < target) {
      const auto k = static_cast<std::size_t>(std::max_element(weights.begin(), weights.end()) - weights.begin());
      const Gaussiand base = comps[k];
      const Eigen::VectorXd step = perturbation * base.variance().cwiseSqrt();
      weights[k] *= 0.5;
      weights.push_back(weights[k]);
      comps[k] = Gaussiand(base.mean() + step, base.variance());
      comps.emplace_back(base.mean() - step, base.variance());
    }
    out.emission(s) = Gmmd(Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Index>(weights.size())),
                           std::move(comps));
  }
  return out;
}

TrainingResult baum_welch_train(std::vector<HmmModel> models, std::span<const Utterance> corpus,
                                const TrainingConfig& config, bool allow_splitting, const Floors& floors) {
  config.validate();
  if (corpus.empty()) throw TrainingError("baum_welch_train: empty corpus");
  for (const auto& u : corpus) model_indices(models, u.transcript);

  std::vector<Index> stages;
  if (allow_splitting) {
    stages.assign(config.schedule.begin(), config.schedule.end());
  } else {
    Index current = 0;
    for (const auto& m : models) current = std::max(current, m.max_components());
    stages.push_back(current);
  }

  TrainingResult result;
  int iteration = 0;
  for (std::size_t stage = 0; stage < stages.size(); ++stage) {
    if (allow_splitting)
      for (auto& m : models) m = split_mixtures(m, stages[stage], config.split_perturbation);
    double previous = 0.0;
    for (int it = 0; it < config.max_iterations; ++it) {
      const Accumulators acc = expectation_step(models, corpus, config.jobs);
      if (acc.utterances == 0) throw TrainingError("baum_welch_train: every utterance is alignment-infeasible");
      result.trace.push_back({static_cast<int>(stage), iteration++, stages[stage], acc.log_likelihood, acc.skipped});
      if (it > 0 && acc.log_likelihood - previous < config.tolerance * std::abs(previous)) break;
      previous = acc.log_likelihood;
      models = maximization_step(models, acc, floors);
    }
  }
  result.models = std::move(models);
  return result;
}

TrainingResult baum_welch_train(std::vector<HmmModel> models, std::span<const Utterance> corpus,
                                const TrainingConfig& config, bool allow_splitting) {
  return baum_welch_train(std::move(models), corpus, config, allow_splitting,
                          make_floors(global_statistics(corpus), config));
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "stage,iteration,components,log_likelihood,skipped\n" << std::setprecision(17);
  for (const auto& r : trace)
    out << r.stage << ',' << r.iteration << ',' << r.components << ',' << r.log_likelihood << ',' << r.skipped << '\n';
}

}  // namespace hmmtopo
