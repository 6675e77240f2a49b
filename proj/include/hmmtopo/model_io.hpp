// include/hmmtopo/model_io.hpp

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
#include <iosfwd>
#include <string>
#include <vector>

#include "hmmtopo/model.hpp"

namespace hmmtopo {

// Text model format, one model per file:
//
//   HMMTOPO 1
//   label <label>
//   states <N> dim <D>
//   tags <t_1> ... <t_N>
//   transitions
//   <N+2 rows of N+2 linear probabilities>
//   state <s> mixtures <M>          (repeated for s = 1..N)
//   component <w> mean <D values> variance <D values>   (repeated M times)
//   end
//
// Every real number is printed with 17 significant digits, so
// print(parse(print(m))) == print(m) byte for byte.

void write_model(std::ostream& out, const HmmModel& model);
HmmModel read_model(std::istream& in);

std::string model_to_string(const HmmModel& model);
HmmModel model_from_string(const std::string& text);

void save_model(const HmmModel& model, const std::filesystem::path& path);
HmmModel load_model(const std::filesystem::path& path);

/// Writes <dir>/<label>.hmm for every model (directory is created).
void save_model_set(const std::vector<HmmModel>& models, const std::filesystem::path& dir);
/// Loads every *.hmm file in `dir`, ordered by label.
std::vector<HmmModel> load_model_set(const std::filesystem::path& dir);

}  // namespace hmmtopo
