// include/hmmtopo/synth.hpp

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hmmtopo/config.hpp"
#include "hmmtopo/manifest.hpp"
#include "hmmtopo/model.hpp"

namespace hmmtopo {

enum class GeneratorTopology { kLeftToRight, kSparse };

/// Parameters of a seeded synthetic corpus. The seed fully determines the
/// generator models and every sampled utterance.
struct SyntheticSpec {
  int vocab_size = 2;
  int states_per_word = 3;
  int dim = 2;
  GeneratorTopology topology = GeneratorTopology::kLeftToRight;
  /// Size of a pool of state means shared by all words; 0 draws an
  /// independent mean for every state.
  int prototypes = 0;
  double mean_spread = 3.0;   // stddev of the mean draws
  double state_stddev = 1.0;  // per-dimension emission stddev of generator states
  double self_loop = 0.6;
  /// Sparse topology only: extra random edges per emitting state (back jumps or skips).
  int extra_edges = 1;
  int train_utterances = 50;
  int test_utterances = 0;
  int min_words = 1;
  int max_words = 1;
  double noise = 0.0;  // additive Gaussian sigma on every feature
  std::uint64_t seed = 1;

  static SyntheticSpec from_config(const KeyValueConfig& cfg);
  void validate() const;
};

/// Emitting state visited at one frame: word index into the vocabulary and
/// state index (1-based) inside that word's generator.
struct StateVisit {
  int word;
  int state;
  friend bool operator==(const StateVisit&, const StateVisit&) = default;
};

struct SyntheticUtterance {
  Utterance utterance;
  std::vector<StateVisit> path;  // one entry per frame
};

struct SyntheticCorpus {
  std::vector<HmmModel> generators;  // ordered by label
  std::vector<SyntheticUtterance> train;
  std::vector<SyntheticUtterance> test;
};

/// Generator standard deviations are clamped to this value so zero-variance
/// specs still yield valid models.
inline constexpr double kGeneratorMinStddev = 1e-6;

std::string word_label(int index, int vocab_size);

std::vector<HmmModel> make_generators(const SyntheticSpec& spec);
SyntheticCorpus sample_corpus(const SyntheticSpec& spec);

std::vector<Utterance> utterances_of(const std::vector<SyntheticUtterance>& sampled);

/// Writes features/, train.list, test.list (when non-empty), truth/*.hmm and
/// truth/paths.txt under `dir`.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace hmmtopo
