// src/model_io.cpp

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

#include "hmmtopo/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hmmtopo/errors.hpp"

namespace hmmtopo {

namespace {

constexpr const char* kMagic = "HMMTOPO";
constexpr int kVersion = 1;

[[noreturn]] void syntax(const std::string& what) {
  throw ParseError(ParseError::Kind::kSyntax, "model file: " + what);
}

void expect_word(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got)) syntax("unexpected end of input, expected '" + word + "'");
  if (got != word) syntax("expected '" + word + "', got '" + got + "'");
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) syntax(std::string("could not read ") + what);
  return v;
}

// operator>> rejects "inf"/"nan" spellings, so parse reals via strtod.
double read_real(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) syntax(std::string("could not read ") + what);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) syntax(std::string("malformed number for ") + what + ": " + tok);
  if (!std::isfinite(v)) syntax(std::string("non-finite value for ") + what);
  return v;
}

}  // namespace

void write_model(std::ostream& out, const HmmModel& model) {
  const Index n = model.num_states();
  const Index d = model.dim();
  out << std::setprecision(17);
  out << kMagic << ' ' << kVersion << '\n';
  out << "label " << model.label << '\n';
  out << "states " << n << " dim " << d << '\n';
  out << "tags";
  for (int t : model.tags) out << ' ' << t;
  out << '\n' << "transitions\n";
  for (Index i = 0; i < model.transitions.rows(); ++i) {
    for (Index j = 0; j < model.transitions.cols(); ++j) out << (j ? " " : "") << model.transitions(i, j);
    out << '\n';
  }
  for (Index s = 1; s <= n; ++s) {
    const auto& e = model.emission(s);
    out << "state " << s << " mixtures " << e.size() << '\n';
    for (Index m = 0; m < e.size(); ++m) {
      const auto& c = e.component(m);
      out << "component " << e.weights()[m] << " mean";
      for (Index k = 0; k < d; ++k) out << ' ' << c.mean()[k];
      out << " variance";
      for (Index k = 0; k < d; ++k) out << ' ' << c.variance()[k];
      out << '\n';
    }
  }
  out << "end\n";
}

HmmModel read_model(std::istream& in) {
  expect_word(in, kMagic);
  if (read_value<int>(in, "version") != kVersion) syntax("unsupported version");
  expect_word(in, "label");
  HmmModel model;
  model.label = read_value<std::string>(in, "label");
  expect_word(in, "states");
  const auto n = read_value<long long>(in, "state count");
  expect_word(in, "dim");
  const auto d = read_value<long long>(in, "dimension");
  if (n < 1 || d < 1) syntax("state count and dimension must be positive");
  expect_word(in, "tags");
  model.tags.resize(static_cast<std::size_t>(n));
  for (auto& t : model.tags) t = read_value<int>(in, "tag");
  expect_word(in, "transitions");
  model.transitions.resize(n + 2, n + 2);
  for (Index i = 0; i < n + 2; ++i)
    for (Index j = 0; j < n + 2; ++j) model.transitions(i, j) = read_real(in, "transition");
  model.emissions.reserve(static_cast<std::size_t>(n));
  for (Index s = 1; s <= n; ++s) {
    expect_word(in, "state");
    if (read_value<long long>(in, "state index") != s) syntax("states out of order");
    expect_word(in, "mixtures");
    const auto m = read_value<long long>(in, "mixture count");
    if (m < 1) syntax("mixture count must be positive");
    Eigen::VectorXd weights(m);
    std::vector<Gaussiand> comps;
    for (Index k = 0; k < m; ++k) {
      expect_word(in, "component");
      weights[k] = read_real(in, "weight");
      Eigen::VectorXd mean(d), var(d);
      expect_word(in, "mean");
      for (Index x = 0; x < d; ++x) mean[x] = read_real(in, "mean");
      expect_word(in, "variance");
      for (Index x = 0; x < d; ++x) var[x] = read_real(in, "variance");
      try {
        comps.emplace_back(std::move(mean), std::move(var));
      } catch (const UsageError& e) {
        syntax(e.what());
      }
    }
    try {
      model.emissions.emplace_back(std::move(weights), std::move(comps));
    } catch (const UsageError& e) {
      syntax(e.what());
    }
  }
  expect_word(in, "end");
  return model;
}

std::string model_to_string(const HmmModel& model) {
  std::ostringstream out;
  write_model(out, model);
  return out.str();
}

HmmModel model_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_model(in);
}

void save_model(const HmmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(ParseError::Kind::kIo, "cannot write " + path.string());
  write_model(out, model);
}

HmmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseError::Kind::kIo, "cannot read " + path.string());
  try {
    return read_model(in);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), path.string() + ": " + e.what());
  }
}

void save_model_set(const std::vector<HmmModel>& models, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& m : models) save_model(m, dir / (m.label + ".hmm"));
}

std::vector<HmmModel> load_model_set(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ParseError(ParseError::Kind::kIo, "model directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".hmm") files.push_back(entry.path());
  std::vector<HmmModel> models;
  for (const auto& f : files) models.push_back(load_model(f));
  std::sort(models.begin(), models.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  if (models.empty()) throw UsageError("no *.hmm models in " + dir.string());
  return models;
}

}  // namespace hmmtopo
