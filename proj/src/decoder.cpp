// src/decoder.cpp

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

#include "hmmtopo/decoder.hpp"

#include <iomanip>
#include <map>
#include <ostream>

#include "hmmtopo/errors.hpp"
#include "hmmtopo/log_math.hpp"
#include "hmmtopo/parallel.hpp"

namespace hmmtopo {

RecognitionNetwork build_network(std::vector<HmmModel> models, NetworkMode mode, double insertion_log_penalty) {
  if (models.empty()) throw UsageError("build_network: empty model set");
  for (const auto& m : models) require_valid(m);
  RecognitionNetwork net;
  net.models = std::move(models);
  net.mode = mode;
  net.insertion_log_penalty = insertion_log_penalty;
  for (std::size_t k = 0; k < net.models.size(); ++k) {
    const HmmModel& m = net.models[k];
    if (m.dim() != net.models.front().dim()) throw UsageError("build_network: models differ in dimension");
    net.offset.push_back(net.num_states());
    for (Index s = 1; s <= m.num_states(); ++s) {
      net.model_of.push_back(static_cast<Index>(k));
      net.local_of.push_back(s);
    }
  }
  const Index total = net.num_states();
  net.entry_log_prob.resize(total);
  net.exit_log_prob.resize(total);
  net.preds.resize(static_cast<std::size_t>(total));
  for (Index g = 0; g < total; ++g) {
    const HmmModel& m = net.models[static_cast<std::size_t>(net.model_of[g])];
    const Index s = net.local_of[g];
    const Index base = net.offset[static_cast<std::size_t>(net.model_of[g])];
    net.entry_log_prob[g] = m.log_transition(HmmModel::kEntry, s);
    net.exit_log_prob[g] = m.log_transition(s, m.exit_state());
    for (Index i = 1; i <= m.num_states(); ++i)
      if (m.transitions(i, s) > 0.0) net.preds[static_cast<std::size_t>(g)].push_back({base + i - 1, m.log_transition(i, s)});
  }
  return net;
}

namespace {

Eigen::MatrixXd network_emissions(const RecognitionNetwork& net, const FeatureSequence& features) {
  const Eigen::MatrixXd x = features.frames.cast<double>();
  Eigen::MatrixXd out(x.rows(), net.num_states());
  for (Index g = 0; g < net.num_states(); ++g) {
    const Gmmd& e = net.models[static_cast<std::size_t>(net.model_of[g])].emission(net.local_of[g]);
    if (e.dim() != x.cols()) throw UsageError("token_decode: feature dimension does not match models");
    for (Index t = 0; t < x.rows(); ++t) out(t, g) = e.log_density(x.row(t).transpose());
  }
  return out;
}

}  // namespace

DecodeResult token_decode(const RecognitionNetwork& net, const FeatureSequence& features) {
  const Index t_len = features.length();
  const Index s_len = net.num_states();
  if (t_len < 1) throw UsageError("token_decode: empty feature sequence");
  const Eigen::MatrixXd log_b = network_emissions(net, features);
  const bool loop = net.mode == NetworkMode::kLoop;

  Eigen::MatrixXd delta(t_len, s_len);
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> back(t_len, s_len);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> via_loop(t_len, s_len);
  for (Index g = 0; g < s_len; ++g) {
    delta(0, g) = net.entry_log_prob[g] + log_b(0, g);
    back(0, g) = -1;
    via_loop(0, g) = false;
  }

  for (Index t = 1; t < t_len; ++t) {
    // Best word-end token at t-1 for loop re-entry.
    double word_end = kLogZero<double>;
    Index word_end_from = -1;
    if (loop)
      for (Index i = 0; i < s_len; ++i) {
        const double v = delta(t - 1, i) + net.exit_log_prob[i];
        if (v > word_end) {
          word_end = v;
          word_end_from = i;
        }
      }
    for (Index h = 0; h < s_len; ++h) {
      double best = kLogZero<double>;
      Index from = -1;
      bool from_loop = false;
      for (const auto& p : net.preds[static_cast<std::size_t>(h)]) {
        const double v = delta(t - 1, p.from) + p.log_prob;
        if (v > best) {
          best = v;
          from = p.from;
        }
      }
      if (loop && word_end_from >= 0 && !is_log_zero(net.entry_log_prob[h])) {
        const double v = word_end + net.insertion_log_penalty + net.entry_log_prob[h];
        if (v > best || (v == best && from >= 0 && word_end_from < from)) {
          best = v;
          from = word_end_from;
          from_loop = true;
        }
      }
      delta(t, h) = is_log_zero(best) ? best : best + log_b(t, h);
      back(t, h) = from;
      via_loop(t, h) = from_loop;
    }
  }

  DecodeResult result;
  Index last = -1;
  for (Index g = 0; g < s_len; ++g) {
    const double v = delta(t_len - 1, g) + net.exit_log_prob[g];
    if (v > result.score) {
      result.score = v;
      last = g;
    }
  }
  if (last < 0 || !std::isfinite(result.score)) {
    result.score = kLogZero<double>;
    return result;
  }

  result.ok = true;
  result.path.resize(static_cast<std::size_t>(t_len));
  Index g = last;
  for (Index t = t_len - 1; t >= 0; --t) {
    const bool starts = t == 0 || via_loop(t, g);
    result.path[static_cast<std::size_t>(t)] = {net.model_of[g], net.local_of[g], starts};
    g = back(t, g);
  }
  for (const auto& f : result.path)
    if (f.word_start) result.transcript.push_back(net.models[static_cast<std::size_t>(f.model)].label);
  return result;
}

std::vector<DecodeResult> decode_corpus(const RecognitionNetwork& network, std::span<const Utterance> corpus,
                                        int jobs) {
  std::vector<DecodeResult> out(corpus.size());
  parallel_for(static_cast<Index>(corpus.size()), jobs, [&](Index u) {
    out[static_cast<std::size_t>(u)] = token_decode(network, corpus[static_cast<std::size_t>(u)].features);
  });
  return out;
}

Classification classify_isolated(std::span<const HmmModel> models, const FeatureSequence& features) {
  if (models.empty()) throw UsageError("classify_isolated: empty model set");
  Classification c;
  double best = kLogZero<double>;
  for (const auto& m : models) {
    const RecognitionNetwork net = build_network({m}, NetworkMode::kIsolated);
    const DecodeResult r = token_decode(net, features);
    c.scores.emplace_back(m.label, r.score);
    if (!r.ok) continue;
    if (r.score > best || (r.score == best && m.label < c.label)) {
      best = r.score;
      c.label = m.label;
    }
  }
  if (c.label.empty()) throw ClassificationFailure("classify_isolated: no model can emit the sequence");
  return c;
}

void write_decode_output(std::ostream& out, std::span<const Utterance> corpus,
                         const std::vector<DecodeResult>& results) {
  out << std::setprecision(17);
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    const auto& r = results[u];
    out << corpus[u].id << '\t' << join_labels(r.transcript) << '\t';
    if (r.ok) {
      out << r.score;
    } else {
      out << "-inf";
    }
    out << '\n';
  }
}

void write_decode_paths(std::ostream& out, std::span<const Utterance> corpus,
                        const std::vector<DecodeResult>& results, const RecognitionNetwork& network) {
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    out << corpus[u].id << '\t';
    const auto& path = results[u].path;
    for (std::size_t t = 0; t < path.size(); ++t)
      out << (t ? " " : "") << network.models[static_cast<std::size_t>(path[t].model)].label << ':' << path[t].state;
    out << '\n';
  }
}

}  // namespace hmmtopo
