// include/hmmtopo/scoring.hpp

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

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "hmmtopo/manifest.hpp"

namespace hmmtopo {

struct AlignmentCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  AlignmentCounts& operator+=(const AlignmentCounts& o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    reference_length += o.reference_length;
    return *this;
  }
  friend bool operator==(const AlignmentCounts&, const AlignmentCounts&) = default;
};

/// Minimum edit distance alignment with unit costs. When several alignments
/// are optimal the backtrace prefers substitution/match, then insertion,
/// then deletion.
template <typename Sequence>
AlignmentCounts align(const Sequence& ref, const Sequence& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = 0; i <= n; ++i) cost[at(i, 0)] = i;
  for (std::size_t j = 0; j <= m; ++j) cost[at(0, j)] = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = cost[at(i - 1, j - 1)] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost[at(i, j)] = std::min({diag, cost[at(i, j - 1)] + 1, cost[at(i - 1, j)] + 1});
    }

  AlignmentCounts c;
  c.reference_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = cost[at(i, j)];
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (cost[at(i - 1, j - 1)] + (same ? 0 : 1) == here) {
        if (!same) ++c.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && cost[at(i, j - 1)] + 1 == here) {
      ++c.insertions;
      --j;
    } else {
      ++c.deletions;
      --i;
    }
  }
  return c;
}

/// (S + D + I) / N. Throws UsageError when N == 0.
double wer(const AlignmentCounts& counts);

struct ScoringReport {
  AlignmentCounts totals;
  std::size_t sentences = 0;
  std::size_t sentence_errors = 0;
  double wer = 0.0;
  double accuracy = 1.0;  // 1 - WER
};

/// Corpus-pooled counts over aligned (ref, hyp) pairs.
ScoringReport score_pairs(std::span<const Transcript> refs, std::span<const Transcript> hyps);

void write_score_csv(std::ostream& out, const ScoringReport& report);
void write_score_text(std::ostream& out, const ScoringReport& report);

}  // namespace hmmtopo
