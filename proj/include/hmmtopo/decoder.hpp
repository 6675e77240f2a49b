// include/hmmtopo/decoder.hpp

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

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hmmtopo/features.hpp"
#include "hmmtopo/manifest.hpp"
#include "hmmtopo/model.hpp"

namespace hmmtopo {

enum class NetworkMode { kIsolated, kLoop };

/// All class models compiled into one emitting-state space. Global state
/// g = offset[m] + (s - 1) for emitting state s of model m, so ascending g
/// is ascending (model index, state index).
struct RecognitionNetwork {
  struct Pred {
    Index from;
    double log_prob;
  };

  std::vector<HmmModel> models;
  NetworkMode mode = NetworkMode::kIsolated;
  double insertion_log_penalty = 0.0;  // added on every exit -> entry loop traversal

  std::vector<Index> offset;
  std::vector<Index> model_of;
  std::vector<Index> local_of;
  Eigen::VectorXd entry_log_prob;
  Eigen::VectorXd exit_log_prob;
  std::vector<std::vector<Pred>> preds;  // model-internal predecessors, ascending `from`

  Index num_states() const { return static_cast<Index>(model_of.size()); }
};

RecognitionNetwork build_network(std::vector<HmmModel> models, NetworkMode mode, double insertion_log_penalty = 0.0);

struct DecodedFrame {
  Index model;
  Index state;      // 1-based emitting state within the model
  bool word_start;  // frame entered the model through its entry state
  friend bool operator==(const DecodedFrame&, const DecodedFrame&) = default;
};

struct DecodeResult {
  bool ok = false;  // false when no path can emit the frames
  Transcript transcript;
  std::vector<DecodedFrame> path;
  double score = kLogZero<double>;
};

/// Max-product (Viterbi) token passing: per frame, score ln a + ln b with
/// ties broken toward the lowest predecessor (model, state).
DecodeResult token_decode(const RecognitionNetwork& network, const FeatureSequence& features);

std::vector<DecodeResult> decode_corpus(const RecognitionNetwork& network, std::span<const Utterance> corpus,
                                        int jobs = 1);

struct Classification {
  std::string label;
  std::vector<std::pair<std::string, double>> scores;  // in model order
};

/// Best single-model Viterbi score; ties go to the lexicographically
/// smallest label. Throws ClassificationFailure when no model fits.
Classification classify_isolated(std::span<const HmmModel> models, const FeatureSequence& features);

/// "<id>\t<transcript>\t<score>" per utterance; failed decodes have an
/// empty transcript and score "-inf".
void write_decode_output(std::ostream& out, std::span<const Utterance> corpus,
                         const std::vector<DecodeResult>& results);

/// "<id>\t<label>:<state> ..." per utterance, one token per frame.
void write_decode_paths(std::ostream& out, std::span<const Utterance> corpus,
                        const std::vector<DecodeResult>& results, const RecognitionNetwork& network);

}  // namespace hmmtopo
