// src/scoring.cpp

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

#include "hmmtopo/scoring.hpp"

#include <iomanip>
#include <ostream>

#include "hmmtopo/errors.hpp"

namespace hmmtopo {

double wer(const AlignmentCounts& counts) {
  if (counts.reference_length == 0) throw UsageError("wer: reference length is zero");
  return static_cast<double>(counts.errors()) / static_cast<double>(counts.reference_length);
}

ScoringReport score_pairs(std::span<const Transcript> refs, std::span<const Transcript> hyps) {
  if (refs.size() != hyps.size()) throw UsageError("score_pairs: reference/hypothesis counts differ");
  ScoringReport r;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    r.totals += align(refs[k], hyps[k]);
    ++r.sentences;
    if (refs[k] != hyps[k]) ++r.sentence_errors;
  }
  r.wer = wer(r.totals);
  r.accuracy = 1.0 - r.wer;
  return r;
}

void write_score_csv(std::ostream& out, const ScoringReport& r) {
  out << "substitutions,deletions,insertions,reference_length,sentences,sentence_errors,wer,accuracy\n"
      << std::setprecision(17) << r.totals.substitutions << ',' << r.totals.deletions << ',' << r.totals.insertions
      << ',' << r.totals.reference_length << ',' << r.sentences << ',' << r.sentence_errors << ',' << r.wer << ','
      << r.accuracy << '\n';
}

void write_score_text(std::ostream& out, const ScoringReport& r) {
  out << std::fixed << std::setprecision(2) << "%WER " << 100.0 * r.wer << " [ " << r.totals.errors() << " / "
      << r.totals.reference_length << ", " << r.totals.insertions << " ins, " << r.totals.deletions << " del, "
      << r.totals.substitutions << " sub ]\n"
      << "%SER " << (r.sentences ? 100.0 * static_cast<double>(r.sentence_errors) / static_cast<double>(r.sentences) : 0.0)
      << " [ " << r.sentence_errors << " / " << r.sentences << " ]\n"
      << "%ACC " << 100.0 * r.accuracy << '\n';
  out << std::defaultfloat;
}

}  // namespace hmmtopo
