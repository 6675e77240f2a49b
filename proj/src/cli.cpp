// src/cli.cpp

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

#include "hmmtopo/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hmmtopo/decoder.hpp"
#include "hmmtopo/diagnostics.hpp"
#include "hmmtopo/errors.hpp"
#include "hmmtopo/manifest.hpp"
#include "hmmtopo/model_io.hpp"
#include "hmmtopo/pipeline.hpp"
#include "hmmtopo/scoring.hpp"
#include "hmmtopo/synth.hpp"
#include "hmmtopo/topology.hpp"
#include "hmmtopo/training.hpp"

namespace hmmtopo {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::uint64_t seed = 0;
  int jobs = 1;
  int verbosity = 0;

  std::string spec, out, config, train, test, models, manifest, mode = "equiprobable";
  std::string decode_mode = "isolated", dump_path, ref, hyp;
  double penalty = 0.0;
  bool seed_given = false;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path.string());
  f << std::setprecision(17);
  return f;
}

void write_summary(const fs::path& dir, const std::string& command, std::uint64_t seed,
                   const std::vector<std::pair<std::string, std::string>>& fields) {
  auto f = open_out(dir / "summary.txt");
  f << "command=" << command << '\n' << "seed=" << seed << '\n';
  for (const auto& [k, v] : fields) f << k << '=' << v << '\n';
}

template <typename T>
std::string str(const T& v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::vector<Utterance> load_nonempty_corpus(const std::string& manifest_path) {
  const CorpusManifest manifest = load_manifest(manifest_path);
  if (manifest.entries.empty()) throw UsageError("manifest " + manifest_path + " lists no utterances");
  return load_corpus(manifest);
}

NetworkMode parse_mode(const std::string& s) {
  if (s == "isolated") return NetworkMode::kIsolated;
  if (s == "loop") return NetworkMode::kLoop;
  throw UsageError("decode mode must be 'isolated' or 'loop'");
}

PipelineConfig pipeline_config(const Options& o) {
  KeyValueConfig cfg = o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
  PipelineConfig pc = PipelineConfig::from_config(cfg);
  if (o.seed_given) pc.seed = o.seed;
  pc.jobs = o.jobs;
  return pc;
}

int cmd_gen_synth(const Options& o, std::ostream& out) {
  SyntheticSpec spec = SyntheticSpec::from_config(KeyValueConfig::load(o.spec));
  if (o.seed_given) spec.seed = o.seed;
  const SyntheticCorpus corpus = sample_corpus(spec);
  write_synthetic_corpus(corpus, o.out);
  write_summary(o.out, "gen-synth", spec.seed,
                {{"vocabulary", str(corpus.generators.size())},
                 {"train_utterances", str(corpus.train.size())},
                 {"test_utterances", str(corpus.test.size())}});
  out << "wrote " << corpus.train.size() << " train / " << corpus.test.size() << " test utterances to " << o.out << '\n';
  return kExitOk;
}

int cmd_train_baseline(const Options& o, std::ostream& out) {
  const PipelineConfig pc = pipeline_config(o);
  const auto corpus = load_nonempty_corpus(o.train);
  const Floors floors = make_floors(global_statistics(corpus), pc.training);
  const TrainingResult r = train_baseline(corpus, pc, floors);
  save_model_set(r.models, fs::path(o.out) / "models");
  auto trace = open_out(fs::path(o.out) / "trace.csv");
  write_trace_csv(trace, r.trace);
  const double acc =
      evaluate_models(r.models, corpus, pc.sweep.decode_mode, pc.sweep.insertion_log_penalty, pc.jobs).accuracy();
  Index gaussians = 0;
  for (const auto& m : r.models) gaussians += m.gaussian_count();
  write_summary(o.out, "train-baseline", pc.seed,
                {{"models", str(r.models.size())},
                 {"iterations", str(r.trace.size())},
                 {"final_log_likelihood", str(r.trace.back().log_likelihood)},
                 {"skipped", str(r.trace.back().skipped)},
                 {"gaussians", str(gaussians)},
                 {"train_accuracy", str(acc)}});
  out << "trained " << r.models.size() << " baseline models, train accuracy " << acc << '\n';
  return kExitOk;
}

int cmd_flatten(const Options& o, std::ostream& out) {
  FlattenMode mode;
  if (o.mode == "equiprobable") {
    mode = FlattenMode::kEquiprobable;
  } else if (o.mode == "weight-preserving") {
    mode = FlattenMode::kWeightPreserving;
  } else {
    throw UsageError("--mode must be 'equiprobable' or 'weight-preserving'");
  }
  std::vector<HmmModel> flat;
  for (const auto& m : load_model_set(o.models)) flat.push_back(flatten_model(m, mode));
  save_model_set(flat, fs::path(o.out) / "models");
  Index states = 0;
  for (const auto& m : flat) states += m.num_states();
  write_summary(o.out, "flatten", o.seed, {{"mode", o.mode}, {"models", str(flat.size())}, {"states", str(states)}});
  out << "flattened " << flat.size() << " models (" << states << " states)\n";
  return kExitOk;
}

int cmd_sweep_prune(const Options& o, std::ostream& out) {
  const PipelineConfig pc = pipeline_config(o);
  const auto models = load_model_set(o.models);
  const auto corpus = load_nonempty_corpus(o.train);
  const Floors floors = make_floors(global_statistics(corpus), pc.training);
  SweepConfig sc = pc.sweep;
  sc.jobs = pc.jobs;
  TrainingConfig tc = pc.training;
  tc.jobs = pc.jobs;
  const SweepResult r = sweep_threshold(models, corpus, sc, tc, floors);
  save_model_set(r.best().models, fs::path(o.out) / "models");
  auto csv = open_out(fs::path(o.out) / "sweep.csv");
  write_sweep_csv(csv, r);
  write_summary(o.out, "sweep-prune", pc.seed,
                {{"kept_epsilon", str(r.best().epsilon)},
                 {"kept_accuracy", str(r.best().accuracy)},
                 {"edges_kept", str(r.best().edges)},
                 {"tie_note", r.tie_note}});
  out << "kept epsilon " << r.best().epsilon << " with train accuracy " << r.best().accuracy << '\n';
  return kExitOk;
}

int cmd_pipeline(const Options& o, std::ostream& out) {
  const PipelineConfig pc = pipeline_config(o);
  const auto corpus = load_nonempty_corpus(o.train);
  const PipelineResult r = run_pipeline(corpus, pc);
  const fs::path dir(o.out);
  save_model_set(r.baseline, dir / "baseline");
  save_model_set(r.final_models, dir / "final");
  {
    auto f = open_out(dir / "baseline_trace.csv");
    write_trace_csv(f, r.baseline_trace);
  }
  {
    auto f = open_out(dir / "sweeps.csv");
    write_pipeline_sweeps_csv(f, r);
  }
  std::ostringstream report;
  write_pipeline_report(report, r, pc);

  std::vector<std::pair<std::string, std::string>> fields = {
      {"baseline_train_accuracy", str(r.baseline_accuracy)},
      {"kept_round", str(r.kept_round)},
      {"kept_epsilon", str(r.kept_epsilon)},
      {"kept_train_accuracy", str(r.kept_accuracy)},
      {"budget_matched", r.budget_matched ? "yes" : "no"}};
  if (!o.test.empty()) {
    const auto test = load_nonempty_corpus(o.test);
    const auto base = evaluate_models(r.baseline, test, pc.sweep.decode_mode, pc.sweep.insertion_log_penalty, pc.jobs);
    const auto fin = evaluate_models(r.final_models, test, pc.sweep.decode_mode, pc.sweep.insertion_log_penalty, pc.jobs);
    auto f = open_out(dir / "test_scores.csv");
    f << "system,substitutions,deletions,insertions,reference_length,wer\n";
    for (const auto& [name, ev] : {std::pair{"baseline", base}, std::pair{"pipeline", fin}})
      f << name << ',' << ev.report.totals.substitutions << ',' << ev.report.totals.deletions << ','
        << ev.report.totals.insertions << ',' << ev.report.totals.reference_length << ',' << ev.report.wer << '\n';
    report << "test_wer_baseline " << str(base.report.wer) << '\n' << "test_wer_pipeline " << str(fin.report.wer) << '\n';
    fields.emplace_back("test_wer_baseline", str(base.report.wer));
    fields.emplace_back("test_wer_pipeline", str(fin.report.wer));
  }
  {
    auto f = open_out(dir / "report.txt");
    f << report.str();
  }
  write_summary(dir, "pipeline", pc.seed, fields);

  out << report.str();
  for (const auto& b : r.budget)
    out << "gaussian budget " << b.label << ": baseline " << b.baseline << ", flattened " << b.flattened << ", final "
        << b.final << '\n';
  if (!r.budget_matched) {
    out << "matched Gaussian budget check FAILED\n";
    return kExitFailure;
  }
  out << "matched Gaussian budget check passed\n";
  return kExitOk;
}

int cmd_decode(const Options& o, std::ostream& out) {
  const auto corpus = load_nonempty_corpus(o.manifest);
  const RecognitionNetwork net = build_network(load_model_set(o.models), parse_mode(o.decode_mode), o.penalty);
  const auto results = decode_corpus(net, corpus, o.jobs);
  auto f = open_out(o.out);
  write_decode_output(f, corpus, results);
  if (!o.dump_path.empty()) {
    auto p = open_out(o.dump_path);
    write_decode_paths(p, corpus, results, net);
  }
  std::size_t failures = 0;
  for (const auto& r : results) failures += r.ok ? 0 : 1;
  out << "decoded " << results.size() << " utterances (" << failures << " failures)\n";
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out) {
  const auto refs = load_labelled_lines(o.ref);
  const auto hyps = load_labelled_lines(o.hyp);
  if (refs.empty()) throw UsageError("reference file " + o.ref + " is empty");
  std::map<std::string, Transcript> by_id;
  for (const auto& h : hyps) by_id[h.id] = h.labels;
  std::vector<Transcript> r, h;
  for (const auto& ref : refs) {
    r.push_back(ref.labels);
    const auto it = by_id.find(ref.id);
    h.push_back(it == by_id.end() ? Transcript{} : it->second);
  }
  const ScoringReport report = score_pairs(r, h);
  write_score_text(out, report);
  if (!o.out.empty()) {
    auto csv = open_out(fs::path(o.out) / "score.csv");
    write_score_csv(csv, report);
    auto txt = open_out(fs::path(o.out) / "score.txt");
    write_score_text(txt, report);
    write_summary(o.out, "score", o.seed, {{"wer", str(report.wer)}, {"accuracy", str(report.accuracy)}});
  }
  return kExitOk;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  const auto models = load_model_set(o.models);
  const auto corpus = load_nonempty_corpus(o.manifest);
  const ImbalanceReport r = imbalance_coefficients(models, corpus);
  const fs::path dir(o.out);
  {
    auto f = open_out(dir / "imbalance.txt");
    write_imbalance_text(f, r);
  }
  {
    auto f = open_out(dir / "samples.csv");
    write_imbalance_samples_csv(f, r);
  }
  write_summary(dir, "diagnose", o.seed,
                {{"samples", str(r.samples)},
                 {"variance_ln_alpha", str(r.variance_ln_alpha)},
                 {"variance_ln_beta", str(r.variance_ln_beta)}});
  write_imbalance_text(out, r);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HMM topology learning by flattening and transition pruning"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "Global seed, recorded in every output");
  app.add_option("-j,--jobs", o.jobs, "Worker threads for utterance-parallel stages")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", o.verbosity, "More progress output");

  auto* gen = app.add_subcommand("gen-synth", "Sample a seeded synthetic corpus");
  gen->add_option("--spec", o.spec, "Synthetic spec (key=value)")->required();
  gen->add_option("--out", o.out, "Output directory")->required();

  auto* base = app.add_subcommand("train-baseline", "Flat init + Baum-Welch with mixture splitting");
  base->add_option("--train", o.train, "Training manifest")->required();
  base->add_option("--config", o.config, "Pipeline/training config (key=value)");
  base->add_option("--out", o.out, "Output directory")->required();

  auto* flat = app.add_subcommand("flatten", "Flatten GMM states into single-Gaussian states");
  flat->add_option("--models", o.models, "Model directory")->required();
  flat->add_option("--mode", o.mode, "equiprobable | weight-preserving");
  flat->add_option("--out", o.out, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep-prune", "Prune over an epsilon grid, keep the best on training data");
  sweep->add_option("--models", o.models, "Trained flattened model directory")->required();
  sweep->add_option("--train", o.train, "Training manifest")->required();
  sweep->add_option("--config", o.config, "Pipeline/sweep config (key=value)");
  sweep->add_option("--out", o.out, "Output directory")->required();

  auto* pipe = app.add_subcommand("pipeline", "Full flatten-then-prune training pipeline");
  pipe->add_option("--train", o.train, "Training manifest")->required();
  pipe->add_option("--test", o.test, "Optional test manifest scored for baseline and pipeline");
  pipe->add_option("--config", o.config, "Pipeline config (key=value)");
  pipe->add_option("--out", o.out, "Output directory")->required();

  auto* dec = app.add_subcommand("decode", "Token-passing Viterbi decode");
  dec->add_option("--models", o.models, "Model directory")->required();
  dec->add_option("--manifest", o.manifest, "Manifest to decode")->required();
  dec->add_option("--out", o.out, "Output file (id, transcript, score)")->required();
  dec->add_option("--mode", o.decode_mode, "isolated | loop");
  dec->add_option("--penalty", o.penalty, "Word insertion log-penalty (loop mode)");
  dec->add_option("--dump-path", o.dump_path, "Also write per-frame state paths to this file");

  auto* score = app.add_subcommand("score", "Word error rate of hypotheses against references");
  score->add_option("--ref", o.ref, "Reference file (id<TAB>labels)")->required();
  score->add_option("--hyp", o.hyp, "Hypothesis file (id<TAB>labels[<TAB>...])")->required();
  score->add_option("--out", o.out, "Optional output directory for CSV/text reports");

  auto* diag = app.add_subcommand("diagnose", "Transition vs. emission imbalance along ideal paths");
  diag->add_option("--models", o.models, "Model directory")->required();
  diag->add_option("--manifest", o.manifest, "Manifest with transcripts")->required();
  diag->add_option("--out", o.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  o.seed_given = app.count("--seed") > 0;

  try {
    if (*gen) return cmd_gen_synth(o, out);
    if (*base) return cmd_train_baseline(o, out);
    if (*flat) return cmd_flatten(o, out);
    if (*sweep) return cmd_sweep_prune(o, out);
    if (*pipe) return cmd_pipeline(o, out);
    if (*dec) return cmd_decode(o, out);
    if (*score) return cmd_score(o, out);
    if (*diag) return cmd_diagnose(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hmmtopo
