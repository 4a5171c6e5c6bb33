// Copyright 2026 The AGT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "agt/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string_view>

#include "agt/errors.hpp"
#include "agt/random.hpp"

namespace agt {
namespace {

void shuffle_in_place(std::vector<LabeledExample>& examples, Rng& rng) {
  for (std::size_t i = examples.size(); i > 1; --i) std::swap(examples[i - 1], examples[rng.index(i)]);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("cannot parse '" + std::string(field) + "' as a number", line);
  }
  return value;
}

int parse_label(std::string_view field, std::size_t line) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("label '" + std::string(field) + "' is not an integer", line);
  }
  if (value < 0 || value > 1'000'000) throw ParseError("label out of range", line);
  return static_cast<int>(value);
}

std::string format_double(double v) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

}  // namespace

void DatasetSpec::validate() const {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw ConfigError("split_fraction must lie in (0, 1)");
  }
  if (source == DataSource::kBlobs) {
    if (n_samples < 2) throw ConfigError("blobs need at least 2 samples");
    if (n_features < 1) throw ConfigError("blobs need at least 1 feature");
    if (!(noise_sd > 0.0)) throw ConfigError("noise_sd must be positive");
    if (!(class_separation >= 0.0)) throw ConfigError("class_separation must be non-negative");
  } else if (csv_path.empty()) {
    throw ConfigError("csv source requires csv_path");
  }
}

DatasetSplit make_blobs(const DatasetSpec& spec) {
  spec.validate();
  if (spec.source != DataSource::kBlobs) throw ConfigError("make_blobs: spec source is not blobs");
  Rng rng(mix_seed(spec.seed, 0));
  const double offset = 0.5 * spec.class_separation / std::sqrt(static_cast<double>(spec.n_features));

  Dataset data;
  data.n_features = spec.n_features;
  data.n_classes = 2;
  data.examples.reserve(spec.n_samples);
  const std::size_t n0 = spec.n_samples / 2;
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    const int label = i < n0 ? 0 : 1;
    const double centre = label == 0 ? -offset : offset;
    LabeledExample example{Vector(spec.n_features), label};
    for (double& v : example.x) v = centre + spec.noise_sd * rng.normal();
    data.examples.push_back(std::move(example));
  }
  return stratified_split(data, spec.split_fraction, mix_seed(spec.seed, 1));
}

DatasetSplit stratified_split(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
  Rng rng(seed);
  DatasetSplit split;
  split.train.n_features = split.test.n_features = data.n_features;
  split.train.n_classes = split.test.n_classes = data.n_classes;
  for (std::size_t c = 0; c < data.n_classes; ++c) {
    std::vector<LabeledExample> members;
    for (const LabeledExample& e : data.examples)
      if (static_cast<std::size_t>(e.label) == c) members.push_back(e);
    shuffle_in_place(members, rng);
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < members.size(); ++i) {
      (i < n_train ? split.train : split.test).examples.push_back(std::move(members[i]));
    }
  }
  shuffle_in_place(split.train.examples, rng);
  shuffle_in_place(split.test.examples, rng);
  return split;
}

CsvLoadResult load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  const std::vector<std::string_view> header = split_fields(line);
  std::vector<std::string> names(header.begin(), header.end());
  const auto label_it = std::find(names.begin(), names.end(), label_column);
  if (label_it == names.end()) throw ParseError("no column named '" + label_column + "'", 1);
  const auto label_index = static_cast<std::size_t>(label_it - names.begin());

  CsvLoadResult result;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (i != label_index) result.feature_names.push_back(names[i]);
  result.data.n_features = result.feature_names.size();

  int max_label = -1;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields.size() != names.size()) {
      throw ParseError("expected " + std::to_string(names.size()) + " fields, found " +
                       std::to_string(fields.size()), line_number);
    }
    LabeledExample example;
    example.x.reserve(result.data.n_features);
    bool finite = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == label_index) {
        example.label = parse_label(fields[i], line_number);
      } else {
        const double v = parse_double(fields[i], line_number);
        finite = finite && std::isfinite(v);
        example.x.push_back(v);
      }
    }
    if (!finite) {
      ++result.skipped_rows;
      continue;
    }
    max_label = std::max(max_label, example.label);
    result.data.examples.push_back(std::move(example));
  }
  result.data.n_classes = static_cast<std::size_t>(std::max(2, max_label + 1));
  if (result.skipped_rows > 0) {
    std::cerr << "warning: " << path.string() << ": skipped " << result.skipped_rows
              << " row(s) with non-finite values\n";
  }
  return result;
}

void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::vector<std::string>& feature_names, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path.string());
  for (std::size_t i = 0; i < data.n_features; ++i) {
    out << (i < feature_names.size() ? feature_names[i] : "x" + std::to_string(i)) << ',';
  }
  out << label_column << '\n';
  for (const LabeledExample& e : data.examples) {
    for (double v : e.x) out << format_double(v) << ',';
    out << e.label << '\n';
  }
}

MinMaxScaler MinMaxScaler::fit(const Dataset& data) {
  MinMaxScaler scaler;
  scaler.lo_.assign(data.n_features, std::numeric_limits<double>::infinity());
  scaler.hi_.assign(data.n_features, -std::numeric_limits<double>::infinity());
  for (const LabeledExample& e : data.examples) {
    for (std::size_t j = 0; j < e.x.size(); ++j) {
      scaler.lo_[j] = std::min(scaler.lo_[j], e.x[j]);
      scaler.hi_[j] = std::max(scaler.hi_[j], e.x[j]);
    }
  }
  return scaler;
}

void MinMaxScaler::apply(Dataset& data) const {
  for (LabeledExample& e : data.examples) {
    for (std::size_t j = 0; j < e.x.size() && j < lo_.size(); ++j) {
      const double range = hi_[j] - lo_[j];
      e.x[j] = range > 0.0 ? (e.x[j] - lo_[j]) / range : 0.0;
    }
  }
}

DatasetSplit load_dataset(const DatasetSpec& spec) {
  spec.validate();
  DatasetSplit split;
  if (spec.source == DataSource::kBlobs) {
    split = make_blobs(spec);
  } else {
    split = stratified_split(load_csv(spec.csv_path, spec.label_column).data, spec.split_fraction,
                             mix_seed(spec.seed, 1));
  }
  if (spec.min_max_scale) {
    const MinMaxScaler scaler = MinMaxScaler::fit(split.train);
    scaler.apply(split.train);
    scaler.apply(split.test);
  }
  return split;
}

}  // namespace agt
