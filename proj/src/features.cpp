// src/features.cpp

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

#include "hmmtopo/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hmmtopo/errors.hpp"

namespace hmmtopo {

namespace {

constexpr char kMagic[4] = {'H', 'M', 'F', '1'};
constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::vector<char>& out, std::size_t at, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out[at + k] = static_cast<char>((v >> (8 * k)) & 0xffu);
}

std::uint32_t get_u32(const std::vector<char>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + k])) << (8 * k);
  return v;
}

}  // namespace

void check_features(const FeatureSequence& seq) {
  if (seq.length() < 1 || seq.dim() < 1) throw UsageError("feature sequence must have T >= 1 and D >= 1");
  if (!seq.frames.allFinite()) throw UsageError("feature sequence contains NaN or Inf");
}

std::vector<char> encode_features(const FeatureSequence& seq) {
  check_features(seq);
  std::vector<char> out(kHeaderBytes + 4 * static_cast<std::size_t>(seq.frames.size()));
  std::copy(std::begin(kMagic), std::end(kMagic), out.begin());
  put_u32(out, 4, static_cast<std::uint32_t>(seq.length()));
  put_u32(out, 8, static_cast<std::uint32_t>(seq.dim()));
  std::size_t at = kHeaderBytes;
  for (Eigen::Index t = 0; t < seq.length(); ++t)
    for (Eigen::Index d = 0; d < seq.dim(); ++d, at += 4)
      put_u32(out, at, std::bit_cast<std::uint32_t>(seq.frames(t, d)));
  return out;
}

FeatureSequence decode_features(const std::vector<char>& bytes) {
  using K = ParseError::Kind;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw ParseError(K::kBadMagic, "HMF1: bad magic bytes");
  if (bytes.size() < kHeaderBytes) throw ParseError(K::kTruncated, "HMF1: truncated header");
  const std::uint32_t t = get_u32(bytes, 4);
  const std::uint32_t d = get_u32(bytes, 8);
  if (t == 0 || d == 0) throw ParseError(K::kBadHeader, "HMF1: T and D must be positive");
  const std::uint64_t payload = std::uint64_t{t} * d * 4;
  const std::uint64_t available = bytes.size() - kHeaderBytes;
  if (available < payload) throw ParseError(K::kTruncated, "HMF1: payload shorter than T*D floats");
  if (available > payload) throw ParseError(K::kTrailingData, "HMF1: trailing bytes after payload");

  FeatureSequence seq;
  seq.frames.resize(t, d);
  std::size_t at = kHeaderBytes;
  for (std::uint32_t i = 0; i < t; ++i)
    for (std::uint32_t j = 0; j < d; ++j, at += 4) {
      const float v = std::bit_cast<float>(get_u32(bytes, at));
      if (!std::isfinite(v)) throw ParseError(K::kNonFinite, "HMF1: NaN or Inf in payload");
      seq.frames(i, j) = v;
    }
  return seq;
}

void write_features(const FeatureSequence& seq, const std::filesystem::path& path) {
  const auto bytes = encode_features(seq);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(ParseError::Kind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

FeatureSequence read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseError::Kind::kIo, "cannot read " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_features(bytes);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace hmmtopo
