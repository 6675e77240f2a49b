// include/hmmtopo/features.hpp

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

#include <Eigen/Core>

namespace hmmtopo {

/// T x D frames, row-major single precision (the on-disk precision).
using FrameMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureSequence {
  FrameMatrix frames;
  double frame_period = 0.01;  // seconds, informational only

  Eigen::Index length() const { return frames.rows(); }
  Eigen::Index dim() const { return frames.cols(); }
};

/// Throws UsageError if T or D is zero or any entry is NaN/Inf.
void check_features(const FeatureSequence& seq);

// HMF1 binary format. A minimal self-describing container so tests can be
// bit-exact without any toolkit dependency:
//   bytes 0..3   "HMF1"
//   bytes 4..7   T, uint32 little-endian
//   bytes 8..11  D, uint32 little-endian
//   then T*D IEEE-754 binary32 values, little-endian, row-major.
void write_features(const FeatureSequence& seq, const std::filesystem::path& path);
FeatureSequence read_features(const std::filesystem::path& path);

std::vector<char> encode_features(const FeatureSequence& seq);
FeatureSequence decode_features(const std::vector<char>& bytes);

}  // namespace hmmtopo
