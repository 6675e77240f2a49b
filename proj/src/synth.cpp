// src/synth.cpp

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

#include "hmmtopo/synth.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hmmtopo/errors.hpp"
#include "hmmtopo/model_io.hpp"
#include "hmmtopo/rng.hpp"

namespace hmmtopo {

SyntheticSpec SyntheticSpec::from_config(const KeyValueConfig& cfg) {
  cfg.check_keys({"vocab_size", "states_per_word", "dim", "topology", "prototypes", "mean_spread",
                  "state_stddev", "self_loop", "extra_edges", "train_utterances", "test_utterances",
                  "min_words", "max_words", "noise", "seed"});
  SyntheticSpec s;
  s.vocab_size = static_cast<int>(cfg.get_int("vocab_size", s.vocab_size));
  s.states_per_word = static_cast<int>(cfg.get_int("states_per_word", s.states_per_word));
  s.dim = static_cast<int>(cfg.get_int("dim", s.dim));
  const auto topo = cfg.get_string("topology", "left-to-right");
  if (topo == "left-to-right") {
    s.topology = GeneratorTopology::kLeftToRight;
  } else if (topo == "sparse") {
    s.topology = GeneratorTopology::kSparse;
  } else {
    throw ValidationError("synthetic spec: topology must be 'left-to-right' or 'sparse'");
  }
  s.prototypes = static_cast<int>(cfg.get_int("prototypes", s.prototypes));
  s.mean_spread = cfg.get_double("mean_spread", s.mean_spread);
  s.state_stddev = cfg.get_double("state_stddev", s.state_stddev);
  s.self_loop = cfg.get_double("self_loop", s.self_loop);
  s.extra_edges = static_cast<int>(cfg.get_int("extra_edges", s.extra_edges));
  s.train_utterances = static_cast<int>(cfg.get_int("train_utterances", s.train_utterances));
  s.test_utterances = static_cast<int>(cfg.get_int("test_utterances", s.test_utterances));
  s.min_words = static_cast<int>(cfg.get_int("min_words", s.min_words));
  s.max_words = static_cast<int>(cfg.get_int("max_words", s.max_words));
  s.noise = cfg.get_double("noise", s.noise);
  s.seed = cfg.get_uint("seed", s.seed);
  s.validate();
  return s;
}

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError("synthetic spec: " + m); };
  if (vocab_size < 1) fail("vocab_size must be >= 1");
  if (states_per_word < 1) fail("states_per_word must be >= 1");
  if (dim < 1) fail("dim must be >= 1");
  if (prototypes < 0) fail("prototypes must be >= 0");
  if (!(mean_spread >= 0.0) || !(state_stddev >= 0.0) || !(noise >= 0.0)) fail("spreads must be >= 0");
  if (!(self_loop >= 0.0 && self_loop < 1.0)) fail("self_loop must be in [0, 1)");
  if (extra_edges < 0) fail("extra_edges must be >= 0");
  if (train_utterances < 0 || test_utterances < 0) fail("utterance counts must be >= 0");
  if (min_words < 1 || max_words < min_words) fail("need 1 <= min_words <= max_words");
}

std::string word_label(int index, int vocab_size) {
  const int width = vocab_size > 1 ? static_cast<int>(std::to_string(vocab_size - 1).size()) : 1;
  std::ostringstream out;
  out << 'w' << std::setw(width) << std::setfill('0') << index;
  return out.str();
}

std::vector<HmmModel> make_generators(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed, "generators");
  const int k = spec.states_per_word;
  const double sd = std::max(spec.state_stddev, kGeneratorMinStddev);
  const Eigen::VectorXd variance = Eigen::VectorXd::Constant(spec.dim, sd * sd);

  auto draw_mean = [&] {
    Eigen::VectorXd m(spec.dim);
    for (int d = 0; d < spec.dim; ++d) m[d] = spec.mean_spread * rng.normal();
    return m;
  };
  std::vector<Eigen::VectorXd> pool;
  for (int p = 0; p < spec.prototypes; ++p) pool.push_back(draw_mean());

  std::vector<HmmModel> models;
  for (int w = 0; w < spec.vocab_size; ++w) {
    std::vector<Gmmd> emissions;
    int previous = -1;
    for (int s = 0; s < k; ++s) {
      Eigen::VectorXd mean;
      if (pool.empty()) {
        mean = draw_mean();
      } else {
        int pick = rng.uniform_int(0, static_cast<int>(pool.size()) - 1);
        // consecutive states use distinct prototypes when the pool allows it
        if (pool.size() > 1)
          while (pick == previous) pick = rng.uniform_int(0, static_cast<int>(pool.size()) - 1);
        previous = pick;
        mean = pool[static_cast<std::size_t>(pick)];
      }
      emissions.emplace_back(Gaussiand(mean, variance));
    }

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + 2, k + 2);
    a(0, 1) = 1.0;
    for (int s = 1; s <= k; ++s) {
      a(s, s) = spec.self_loop;
      const double move = 1.0 - spec.self_loop;
      if (spec.topology == GeneratorTopology::kLeftToRight || spec.extra_edges == 0) {
        a(s, s + 1) = move;
        continue;
      }
      // Sparse: forward edge plus random back jumps or two-state skips
      // sharing the move mass. Neither shortens a word below ceil(k / 2) frames.
      std::vector<int> candidates;
      for (int j = 1; j < s; ++j) candidates.push_back(j);
      if (s + 2 <= k) candidates.push_back(s + 2);
      Eigen::VectorXd share = Eigen::VectorXd::Zero(k + 2);
      share[s + 1] = 1.0 + rng.uniform();
      for (int e = 0; e < spec.extra_edges && !candidates.empty(); ++e) {
        const auto at = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(candidates.size()) - 1));
        share[candidates[at]] = 0.25 + rng.uniform();
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(at));
      }
      share *= move / share.sum();
      for (int j = 1; j <= k + 1; ++j)
        if (j != s) a(s, j) = share[j];
    }
    models.push_back(make_model(word_label(w, spec.vocab_size), std::move(a), std::move(emissions)));
  }
  return models;
}

namespace {

SyntheticUtterance sample_utterance(const std::vector<HmmModel>& generators, const SyntheticSpec& spec,
                                    Rng& rng, const std::string& id) {
  SyntheticUtterance out;
  out.utterance.id = id;
  const int words = rng.uniform_int(spec.min_words, spec.max_words);
  std::vector<Eigen::VectorXf> frames;
  for (int n = 0; n < words; ++n) {
    const int w = rng.uniform_int(0, spec.vocab_size - 1);
    const HmmModel& g = generators[static_cast<std::size_t>(w)];
    out.utterance.transcript.push_back(g.label);
    Index state = rng.categorical(g.transitions.row(HmmModel::kEntry).transpose());
    while (state != g.exit_state()) {
      const Gaussiand& c = g.emission(state).component(0);
      Eigen::VectorXf x(spec.dim);
      for (int d = 0; d < spec.dim; ++d) {
        const double v = c.mean()[d] + std::sqrt(c.variance()[d]) * rng.normal() + spec.noise * rng.normal();
        x[d] = static_cast<float>(v);
      }
      frames.push_back(std::move(x));
      out.path.push_back({w, static_cast<int>(state)});
      state = rng.categorical(g.transitions.row(state).transpose());
    }
  }
  out.utterance.features.frames.resize(static_cast<Index>(frames.size()), spec.dim);
  for (std::size_t t = 0; t < frames.size(); ++t)
    out.utterance.features.frames.row(static_cast<Index>(t)) = frames[t].transpose();
  return out;
}

}  // namespace

SyntheticCorpus sample_corpus(const SyntheticSpec& spec) {
  SyntheticCorpus corpus;
  corpus.generators = make_generators(spec);
  Rng train_rng(spec.seed, "train");
  for (int u = 0; u < spec.train_utterances; ++u) {
    std::ostringstream id;
    id << "features/train_" << std::setw(5) << std::setfill('0') << u << ".hmf";
    corpus.train.push_back(sample_utterance(corpus.generators, spec, train_rng, id.str()));
  }
  Rng test_rng(spec.seed, "test");
  for (int u = 0; u < spec.test_utterances; ++u) {
    std::ostringstream id;
    id << "features/test_" << std::setw(5) << std::setfill('0') << u << ".hmf";
    corpus.test.push_back(sample_utterance(corpus.generators, spec, test_rng, id.str()));
  }
  return corpus;
}

std::vector<Utterance> utterances_of(const std::vector<SyntheticUtterance>& sampled) {
  std::vector<Utterance> out;
  out.reserve(sampled.size());
  for (const auto& s : sampled) out.push_back(s.utterance);
  return out;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "features");
  std::vector<std::string> vocab;
  for (const auto& g : corpus.generators) vocab.push_back(g.label);

  auto emit = [&](const std::vector<SyntheticUtterance>& set, const std::string& split) {
    CorpusManifest manifest;
    manifest.split = split;
    manifest.vocabulary = vocab;
    for (const auto& s : set) {
      write_features(s.utterance.features, dir / s.utterance.id);
      manifest.entries.push_back({s.utterance.id, s.utterance.transcript});
    }
    write_manifest(manifest, dir / (split + ".list"));
  };
  emit(corpus.train, "train");
  if (!corpus.test.empty()) emit(corpus.test, "test");

  save_model_set(corpus.generators, dir / "truth");
  std::ofstream paths(dir / "truth" / "paths.txt");
  for (const auto* set : {&corpus.train, &corpus.test})
    for (const auto& s : *set) {
      paths << s.utterance.id << '\t';
      for (std::size_t t = 0; t < s.path.size(); ++t)
        paths << (t ? " " : "") << corpus.generators[static_cast<std::size_t>(s.path[t].word)].label << ':'
              << s.path[t].state;
      paths << '\n';
    }
}

}  // namespace hmmtopo
