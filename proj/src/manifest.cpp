// src/manifest.cpp

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

#include "hmmtopo/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hmmtopo/errors.hpp"

namespace hmmtopo {

Transcript split_labels(const std::string& text) {
  std::istringstream in(text);
  Transcript out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string join_labels(const Transcript& labels) {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += ' ';
    out += l;
  }
  return out;
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseError::Kind::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

CorpusManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  CorpusManifest manifest;
  manifest.base_dir = base_dir;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    const std::string line = trim_cr(raw);
    const auto where = "manifest line " + std::to_string(lineno);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string key;
      hdr >> key;
      if (key == "split") {
        hdr >> manifest.split;
      } else if (key == "vocab") {
        for (std::string w; hdr >> w;) manifest.vocabulary.push_back(w);
      }
      continue;
    }
    const auto tab = line.find('\t');
    ManifestEntry entry;
    entry.path = line.substr(0, tab);
    if (tab != std::string::npos) entry.transcript = split_labels(line.substr(tab + 1));
    if (entry.path.empty()) throw ValidationError(where + ": empty feature path");
    if (entry.transcript.empty()) throw ValidationError(where + ": empty transcript for " + entry.path);
    if (!seen.insert(entry.path).second) throw ValidationError(where + ": duplicate path " + entry.path);
    manifest.entries.push_back(std::move(entry));
  }
  if (!manifest.vocabulary.empty()) {
    const std::set<std::string> vocab(manifest.vocabulary.begin(), manifest.vocabulary.end());
    for (const auto& e : manifest.entries)
      for (const auto& w : e.transcript)
        if (!vocab.count(w)) throw ValidationError("manifest label '" + w + "' is not in the declared vocabulary");
  }
  return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text(path), path.parent_path());
}

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(ParseError::Kind::kIo, "cannot write " + path.string());
  if (!manifest.split.empty()) out << "#split " << manifest.split << '\n';
  if (!manifest.vocabulary.empty()) out << "#vocab " << join_labels(manifest.vocabulary) << '\n';
  for (const auto& e : manifest.entries) out << e.path << '\t' << join_labels(e.transcript) << '\n';
}

std::vector<Utterance> load_corpus(const CorpusManifest& manifest) {
  std::vector<Utterance> corpus;
  corpus.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    std::filesystem::path p(e.path);
    if (p.is_relative()) p = manifest.base_dir / p;
    corpus.push_back({e.path, read_features(p), e.transcript});
  }
  return corpus;
}

std::vector<std::string> corpus_labels(const std::vector<Utterance>& corpus) {
  std::set<std::string> labels;
  for (const auto& u : corpus) labels.insert(u.transcript.begin(), u.transcript.end());
  return {labels.begin(), labels.end()};
}

std::vector<LabelledLine> load_labelled_lines(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<LabelledLine> out;
  for (std::string raw; std::getline(in, raw);) {
    const std::string line = trim_cr(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    LabelledLine l;
    l.id = line.substr(0, tab);
    if (tab != std::string::npos) {
      const auto rest = line.substr(tab + 1);
      l.labels = split_labels(rest.substr(0, rest.find('\t')));
    }
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace hmmtopo
