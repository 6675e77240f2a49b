// include/hmmtopo/manifest.hpp

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

#include <filesystem>
#include <string>
#include <vector>

#include "hmmtopo/features.hpp"

namespace hmmtopo {

using Transcript = std::vector<std::string>;

struct Utterance {
  std::string id;
  FeatureSequence features;
  Transcript transcript;
};

// Manifest format: one utterance per line, "<feature path>\t<label> <label> ...".
// Relative paths are resolved against the manifest's directory. Optional
// header lines:
//   #split <train|test>
//   #vocab <label> <label> ...
// Other lines starting with '#' and blank lines are ignored.
struct ManifestEntry {
  std::string path;  // as written in the manifest; doubles as the utterance id
  Transcript transcript;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  std::string split;
  std::vector<std::string> vocabulary;  // empty when undeclared
  std::filesystem::path base_dir;
};

CorpusManifest load_manifest(const std::filesystem::path& path);
CorpusManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir = {});
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

/// Reads every feature file named by the manifest.
std::vector<Utterance> load_corpus(const CorpusManifest& manifest);

/// Sorted distinct labels appearing in the transcripts.
std::vector<std::string> corpus_labels(const std::vector<Utterance>& corpus);

/// "<id>\t<labels>[\t...]" files (manifests, decoder output). Extra columns are ignored.
struct LabelledLine {
  std::string id;
  Transcript labels;
};
std::vector<LabelledLine> load_labelled_lines(const std::filesystem::path& path);

Transcript split_labels(const std::string& text);
std::string join_labels(const Transcript& labels);

}  // namespace hmmtopo
