// src/pipeline.cpp

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

#include "hmmtopo/pipeline.hpp"

#include <iomanip>
#include <ostream>

#include "hmmtopo/errors.hpp"

namespace hmmtopo {

PipelineConfig PipelineConfig::from_config(const KeyValueConfig& cfg) {
  std::vector<std::string_view> keys = {"states", "feedback_iterations", "seed"};
  for (auto k : TrainingConfig::config_keys()) keys.push_back(k);
  for (auto k : SweepConfig::config_keys()) keys.push_back(k);
  cfg.check_keys(keys);
  PipelineConfig c;
  c.states = static_cast<int>(cfg.get_int("states", c.states));
  c.feedback_iterations = static_cast<int>(cfg.get_int("feedback_iterations", c.feedback_iterations));
  c.seed = cfg.get_uint("seed", c.seed);
  c.training = TrainingConfig::from_config(cfg);
  c.sweep = SweepConfig::from_config(cfg);
  c.validate();
  return c;
}

void PipelineConfig::validate() const {
  if (states < 1) throw ValidationError("pipeline config: states must be >= 1");
  if (feedback_iterations < 0) throw ValidationError("pipeline config: feedback_iterations must be >= 0");
  training.validate();
  sweep.validate();
}

TrainingResult train_baseline(std::span<const Utterance> corpus, const PipelineConfig& config, const Floors& floors) {
  const auto labels = corpus_labels({corpus.begin(), corpus.end()});
  if (labels.empty()) throw UsageError("train_baseline: corpus has no labelled utterances");
  const GlobalStats stats = global_statistics(corpus);
  const Eigen::MatrixXd skeleton = left_to_right_transitions(config.states);
  std::vector<HmmModel> models;
  for (const auto& label : labels) models.push_back(flat_init(stats, skeleton, label));
  TrainingConfig training = config.training;
  training.jobs = config.jobs;
  return baum_welch_train(std::move(models), corpus, training, true, floors);
}

PipelineResult run_pipeline(std::span<const Utterance> corpus, const PipelineConfig& config) {
  config.validate();
  if (corpus.empty()) throw UsageError("run_pipeline: empty corpus");
  const Floors floors = make_floors(global_statistics(corpus), config.training);
  TrainingConfig flat_training = config.training;
  flat_training.jobs = config.jobs;
  SweepConfig sweep = config.sweep;
  sweep.jobs = config.jobs;

  PipelineResult r;
  TrainingResult base = train_baseline(corpus, config, floors);
  r.baseline = std::move(base.models);
  r.baseline_trace = std::move(base.trace);
  r.baseline_accuracy = evaluate_models(r.baseline, corpus, sweep.decode_mode, sweep.insertion_log_penalty, config.jobs).accuracy();

  for (const auto& m : r.baseline) r.flat_init.push_back(flatten_model(m, FlattenMode::kEquiprobable));

  std::vector<HmmModel> start = r.flat_init;
  for (int round = 0; round <= config.feedback_iterations; ++round) {
    if (round > 0) {
      const auto& kept = r.rounds.back().sweep.best().models;
      for (std::size_t c = 0; c < start.size(); ++c) start[c] = feedback_emissions(kept[c], r.flat_init[c]);
    }
    TrainingResult trained = baum_welch_train(start, corpus, flat_training, false, floors);
    FeedbackRound fr{round, sweep_threshold(trained.models, corpus, sweep, flat_training, floors), 0.0,
                     std::move(trained.trace)};
    const double acc = fr.sweep.best().accuracy;
    if (round == 0 || acc > r.kept_accuracy) {
      r.kept_round = static_cast<std::size_t>(round);
      r.kept_accuracy = acc;
      r.kept_epsilon = fr.sweep.best().epsilon;
      r.final_models = fr.sweep.best().models;
    }
    fr.kept_accuracy = r.kept_accuracy;
    r.rounds.push_back(std::move(fr));
  }

  r.budget_matched = true;
  for (std::size_t c = 0; c < r.baseline.size(); ++c) {
    BudgetLine line{r.baseline[c].label, r.baseline[c].gaussian_count(), r.flat_init[c].gaussian_count(),
                    r.final_models[c].gaussian_count()};
    if (line.flattened != line.baseline || line.final > line.baseline) r.budget_matched = false;
    r.budget.push_back(line);
  }
  return r;
}

void write_pipeline_report(std::ostream& out, const PipelineResult& r, const PipelineConfig& config) {
  out << std::setprecision(17);
  out << "seed " << config.seed << '\n';
  out << "baseline_states " << config.states << '\n';
  out << "schedule";
  for (int m : config.training.schedule) out << ' ' << m;
  out << '\n';
  out << "baseline_train_accuracy " << r.baseline_accuracy << '\n';
  if (!r.baseline_trace.empty()) out << "baseline_final_log_likelihood " << r.baseline_trace.back().log_likelihood << '\n';
  for (const auto& round : r.rounds) {
    out << "round " << round.round << " best_epsilon " << round.sweep.best().epsilon << " accuracy "
        << round.sweep.best().accuracy << " kept_accuracy " << round.kept_accuracy << " edges "
        << round.sweep.best().edges << '\n';
    if (!round.sweep.tie_note.empty()) out << "round " << round.round << " " << round.sweep.tie_note << '\n';
  }
  out << "kept_round " << r.kept_round << '\n';
  out << "kept_epsilon " << r.kept_epsilon << '\n';
  out << "kept_train_accuracy " << r.kept_accuracy << '\n';
  for (const auto& b : r.budget)
    out << "budget " << b.label << " baseline " << b.baseline << " flattened " << b.flattened << " final " << b.final
        << '\n';
  out << "budget_matched " << (r.budget_matched ? "yes" : "no") << '\n';
}

void write_pipeline_sweeps_csv(std::ostream& out, const PipelineResult& r) {
  out << "round,epsilon,accuracy,edges_kept,states_kept,decode_failures,kept\n" << std::setprecision(17);
  for (const auto& round : r.rounds)
    for (std::size_t k = 0; k < round.sweep.records.size(); ++k) {
      const auto& rec = round.sweep.records[k];
      out << round.round << ',' << rec.epsilon << ',' << rec.accuracy << ',' << rec.edges << ',' << rec.states << ','
          << rec.decode_failures << ',' << (k == round.sweep.kept ? 1 : 0) << '\n';
    }
}

}  // namespace hmmtopo
