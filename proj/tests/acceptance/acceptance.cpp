// tests/acceptance/acceptance.cpp

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

// Acceptance suite: one PASS/FAIL line per criterion. Tolerances, seeds and
// time limits are fixed here and must not be relaxed to make a line pass.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hmmtopo/cli.hpp"
#include "hmmtopo/decoder.hpp"
#include "hmmtopo/diagnostics.hpp"
#include "hmmtopo/forward_backward.hpp"
#include "hmmtopo/pipeline.hpp"
#include "hmmtopo/scoring.hpp"
#include "hmmtopo/synth.hpp"
#include "hmmtopo/topology.hpp"
#include "hmmtopo/training.hpp"
#include "oracles.hpp"

using namespace hmmtopo;
namespace fs = std::filesystem;

namespace {

constexpr double kFlattenTolerance = 1e-8;
constexpr double kDecodeScoreTolerance = 1e-10;
constexpr double kEmRelativeSlack = 1e-6;
constexpr double kImbalanceRatio = 10.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// The dynamics-rich task: five words, six states each, sparse generators
// with back jumps and skips, and a small pool of shared state means so that
// words differ mostly in how they move between prototypes.
SyntheticSpec dynamics_task(std::uint64_t seed) {
  SyntheticSpec s;
  s.vocab_size = 5;
  s.states_per_word = 6;
  s.dim = 3;
  s.topology = GeneratorTopology::kSparse;
  s.prototypes = 4;
  s.mean_spread = 2.0;
  s.state_stddev = 0.6;
  s.self_loop = 0.5;
  s.extra_edges = 1;
  s.train_utterances = 400;
  s.test_utterances = 300;
  s.noise = 0.3;
  s.seed = seed;
  return s;
}

PipelineConfig dynamics_pipeline(std::uint64_t seed) {
  PipelineConfig c;
  c.states = 3;
  c.training.schedule = {1, 2, 4};
  c.training.max_iterations = 10;
  c.feedback_iterations = 2;
  c.sweep.retrain_after_prune = true;
  c.seed = seed;
  return c;
}

std::vector<HmmModel> train_baseline_models(const std::vector<Utterance>& train, std::vector<TraceRow>* trace) {
  PipelineConfig c = dynamics_pipeline(0);
  const Floors floors = make_floors(global_statistics(train), c.training);
  auto r = train_baseline(train, c, floors);
  if (trace) *trace = r.trace;
  return r.models;
}

// 1. Weight-preserving flattening leaves the forward likelihood unchanged.
Outcome flattening_exactness() {
  std::mt19937_64 rng(101);
  Outcome o;
  double worst = 0.0;
  int pairs = 0;
  for (int trial = 0; pairs < 40; ++trial) {
    const HmmModel m = oracle::random_model(rng, 1 + trial % 4, 1 + trial % 3, 2);
    const HmmModel f = flatten_model(m, FlattenMode::kWeightPreserving);
    const auto x = oracle::random_features(rng, 1 + trial % 20, 2);
    const double original = forward_log_likelihood(m, x);
    if (!std::isfinite(original)) continue;  // sequence too short for this topology
    const double flat = forward_log_likelihood(f, x);
    const double reference = oracle::scaled_forward_log_likelihood(m, x);
    worst = std::max({worst, std::abs(flat - original), std::abs(original - reference)});
    ++pairs;
  }
  o.pass = worst <= kFlattenTolerance;
  std::ostringstream d;
  d << pairs << " pairs, max |dLL| " << worst;
  o.detail = d.str();
  return o;
}

// 2. Token passing equals exhaustive path enumeration.
Outcome decoder_oracle() {
  std::mt19937_64 rng(202);
  Outcome o;
  int ties = 0, mismatches = 0, infeasible = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool loop = trial % 4 == 3;
    std::vector<HmmModel> models{oracle::random_model(rng, 1 + trial % 4, 2, 2, 0.4, "a")};
    if (loop) models = {oracle::random_model(rng, 1 + trial % 2, 2, 2, 0.4, "a"), oracle::random_model(rng, 2, 2, 2, 0.4, "b")};
    const auto f = oracle::random_features(rng, 1 + trial % 6, 2);
    const double penalty = loop ? -0.7 : 0.0;
    const DecodeResult r = token_decode(build_network(models, loop ? NetworkMode::kLoop : NetworkMode::kIsolated, penalty), f);
    const auto e = oracle::enumerated_network_viterbi(models, loop, penalty, f);
    if (r.ok != e.found) {
      ++mismatches;
      continue;
    }
    if (!r.ok) {
      ++infeasible;
      continue;
    }
    worst = std::max(worst, std::abs(r.score - e.score));
    if (e.near_tie) ++ties;
    bool same = r.path.size() == e.state.size();
    for (std::size_t t = 0; same && t < r.path.size(); ++t)
      same = r.path[t].model == e.model[t] && r.path[t].state == e.state[t] && r.path[t].word_start == e.word_start[t];
    if (!same) ++mismatches;
  }
  o.pass = mismatches == 0 && worst <= kDecodeScoreTolerance;
  std::ostringstream d;
  d << "100 models, max |dScore| " << worst << ", path mismatches " << mismatches << ", tied " << ties
    << ", infeasible " << infeasible;
  o.detail = d.str();
  return o;
}

bool monotone(const std::vector<TraceRow>& trace, std::size_t& checked, double& worst_drop) {
  bool ok = true;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k].stage != trace[k - 1].stage) continue;
    const double prev = trace[k - 1].log_likelihood;
    const double drop = prev - trace[k].log_likelihood;
    worst_drop = std::max(worst_drop, drop / std::abs(prev));
    if (drop > kEmRelativeSlack * std::abs(prev)) ok = false;
    ++checked;
  }
  return ok;
}

// 3. Baum-Welch likelihood never decreases, with and without splitting.
Outcome em_monotonicity() {
  auto spec = dynamics_task(303);
  spec.train_utterances = 200;
  spec.test_utterances = 0;
  const auto train = utterances_of(sample_corpus(spec).train);
  PipelineConfig c = dynamics_pipeline(303);
  c.training.tolerance = 1e-9;  // run the full iteration budget
  const Floors floors = make_floors(global_statistics(train), c.training);
  const auto base = train_baseline(train, c, floors);

  std::vector<HmmModel> flat;
  for (const auto& m : base.models) flat.push_back(flatten_model(m, FlattenMode::kEquiprobable));
  const auto flat_run = baum_welch_train(flat, train, c.training, false, floors);

  std::size_t checked = 0;
  double worst = -1.0;
  const bool ok = monotone(base.trace, checked, worst) & monotone(flat_run.trace, checked, worst);
  Outcome o;
  o.pass = ok && checked > 0;
  std::ostringstream d;
  d << checked << " iteration pairs (splitting and flat), worst relative drop " << worst;
  o.detail = d.str();
  return o;
}

// 4. Nesting, validity and path support of pruned models.
Outcome pruning_laws() {
  auto spec = dynamics_task(404);
  spec.train_utterances = 200;
  spec.test_utterances = 100;
  const auto corpus = sample_corpus(spec);
  const auto train = utterances_of(corpus.train);
  const auto test = utterances_of(corpus.test);
  PipelineConfig c = dynamics_pipeline(404);
  const Floors floors = make_floors(global_statistics(train), c.training);
  std::vector<HmmModel> flat;
  for (const auto& m : train_baseline(train, c, floors).models) flat.push_back(flatten_model(m, FlattenMode::kEquiprobable));
  flat = baum_welch_train(flat, train, c.training, false, floors).models;

  const std::vector<double> grid = {0.005, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4};
  std::size_t nesting = 0, invalid = 0, bad_steps = 0, frames = 0;
  std::vector<std::set<std::pair<int, int>>> previous;
  for (const auto& m : flat) previous.push_back(edge_set(m));
  for (double eps : grid) {
    std::vector<HmmModel> pruned;
    for (std::size_t k = 0; k < flat.size(); ++k) {
      pruned.push_back(prune(flat[k], eps));
      if (!validate_model(pruned.back()).empty()) ++invalid;
      const auto edges = edge_set(pruned.back());
      if (!std::includes(previous[k].begin(), previous[k].end(), edges.begin(), edges.end())) ++nesting;
      previous[k] = edges;
    }
    const RecognitionNetwork net = build_network(pruned, NetworkMode::kLoop);
    for (const auto& r : decode_corpus(net, test)) {
      for (std::size_t t = 0; t < r.path.size(); ++t) {
        ++frames;
        const auto& p = r.path[t];
        const HmmModel& m = pruned[static_cast<std::size_t>(p.model)];
        bool ok;
        if (p.word_start) {
          ok = m.transitions(0, p.state) > 0.0;
          if (t > 0) {
            const HmmModel& q = pruned[static_cast<std::size_t>(r.path[t - 1].model)];
            ok = ok && q.transitions(r.path[t - 1].state, q.exit_state()) > 0.0;
          }
        } else {
          ok = r.path[t - 1].model == p.model && m.transitions(r.path[t - 1].state, p.state) > 0.0;
        }
        if (t + 1 == r.path.size()) ok = ok && m.transitions(p.state, m.exit_state()) > 0.0;
        if (!ok) ++bad_steps;
      }
    }
  }
  Outcome o;
  o.pass = nesting == 0 && invalid == 0 && bad_steps == 0 && frames > 0;
  std::ostringstream d;
  d << grid.size() << " epsilons: nesting violations " << nesting << ", invalid models " << invalid
    << ", off-support steps " << bad_steps << " of " << frames << " decoded frames";
  o.detail = d.str();
  return o;
}

// 5. Flatten-prune pipeline versus the left-to-right baseline on held-out data.
Outcome pipeline_beats_baseline() {
  Outcome o;
  std::ostringstream d;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto corpus = sample_corpus(dynamics_task(seed));
    const auto train = utterances_of(corpus.train);
    const auto test = utterances_of(corpus.test);
    const PipelineConfig c = dynamics_pipeline(seed);
    const PipelineResult r = run_pipeline(train, c);
    const double base = evaluate_models(r.baseline, test, c.sweep.decode_mode, c.sweep.insertion_log_penalty, 1).report.wer;
    const double fin = evaluate_models(r.final_models, test, c.sweep.decode_mode, c.sweep.insertion_log_penalty, 1).report.wer;
    const bool ok = r.budget_matched && fin <= base;
    o.pass = o.pass && ok;
    d << std::setprecision(4) << "seed " << seed << ": baseline " << base << " pipeline " << fin
      << (r.budget_matched ? "" : " (budget mismatch)") << "; ";
  }
  o.detail = d.str();
  return o;
}

// 6. Emission ratios vary far more than transition ratios.
Outcome imbalance_ordering() {
  auto spec = dynamics_task(606);
  spec.train_utterances = 200;
  spec.test_utterances = 0;
  const auto train = utterances_of(sample_corpus(spec).train);
  const auto models = train_baseline_models(train, nullptr);
  const ImbalanceReport r = imbalance_coefficients(models, train);
  Outcome o;
  o.pass = r.variance_ln_beta > kImbalanceRatio * r.variance_ln_alpha;
  std::ostringstream d;
  d << "var(ln alpha) " << r.variance_ln_alpha << ", var(ln beta) " << r.variance_ln_beta << ", " << r.samples
    << " samples";
  o.detail = d.str();
  return o;
}

// 7. Alignment counts match exhaustive edit distance on all short pairs.
Outcome scoring_oracle() {
  std::vector<std::string> all{""};
  for (std::size_t k = 0; k < all.size(); ++k)
    if (all[k].size() < 6)
      for (char c : std::string("abc")) all.push_back(all[k] + c);
  std::size_t bad = 0, pairs = 0;
  for (const auto& a : all)
    for (const auto& b : all) {
      const auto c = align(a, b);
      ++pairs;
      if (c.errors() != oracle::edit_distance(a, b) || c.reference_length != a.size() ||
          c.reference_length - c.deletions + c.insertions != b.size())
        ++bad;
    }
  Outcome o;
  o.pass = bad == 0;
  o.detail = std::to_string(pairs) + " pairs, " + std::to_string(bad) + " mismatches";
  return o;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"hmmtopo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Byte-compares every file under two directories.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::vector<fs::path> names;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) names.push_back(fs::relative(e.path(), a));
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file() ? 1 : 0;
  if (names.size() != count_b) return false;
  for (const auto& n : names) {
    ++files;
    if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) return false;
  }
  return true;
}

// 8. The pipeline command is reproducible and independent of --jobs.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "hmmtopo_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream spec(root / "spec.cfg");
    spec << "vocab_size = 3\nstates_per_word = 5\ndim = 2\ntopology = sparse\nprototypes = 3\nstate_stddev = 0.6\n"
            "train_utterances = 120\ntest_utterances = 30\nnoise = 0.3\nseed = 808\n";
    std::ofstream cfg(root / "pipe.cfg");
    cfg << "states = 3\nschedule = 1,2\nmax_iterations = 5\nfeedback_iterations = 1\nepsilons = 0.02,0.05,0.1,0.2\n";
  }
  Outcome o;
  if (run({"gen-synth", "--spec", (root / "spec.cfg").string(), "--out", (root / "corpus").string()}) != kExitOk) {
    o.pass = false;
    o.detail = "gen-synth failed";
    return o;
  }
  auto pipeline = [&](const std::string& name, const std::string& jobs) {
    return run({"--seed", "808", "--jobs", jobs, "pipeline", "--train", (root / "corpus" / "train.list").string(),
                "--test", (root / "corpus" / "test.list").string(), "--config", (root / "pipe.cfg").string(), "--out",
                (root / name).string()});
  };
  const int a = pipeline("run_a", "1");
  const int b = pipeline("run_b", "1");
  const int c = pipeline("run_c", "4");
  std::size_t files = 0;
  const bool twice = same_tree(root / "run_a", root / "run_b", files);
  const bool jobs = same_tree(root / "run_a", root / "run_c", files);
  o.pass = a == kExitOk && b == kExitOk && c == kExitOk && twice && jobs;
  std::ostringstream d;
  d << "repeat identical " << (twice ? "yes" : "no") << ", jobs 4 == jobs 1 " << (jobs ? "yes" : "no") << " ("
    << files << " files compared)";
  o.detail = d.str();
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "flattening exactness", 10, flattening_exactness},
      {2, "decoder oracle", 30, decoder_oracle},
      {3, "EM monotonicity", 120, em_monotonicity},
      {4, "pruning laws", 600, pruning_laws},
      {5, "pipeline beats baseline", 600, pipeline_beats_baseline},
      {6, "imbalance ordering", 60, imbalance_ordering},
      {7, "scoring oracle", 10, scoring_oracle},
      {8, "determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << ' ' << c.name << " (" << std::fixed << std::setprecision(2)
              << seconds << " s, limit " << std::setprecision(0) << c.limit_seconds << " s)" << std::defaultfloat
              << (in_time ? "" : " TIME LIMIT EXCEEDED") << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
