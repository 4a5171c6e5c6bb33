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
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "agt/mlp.hpp"

namespace agt {

struct Dataset {
  std::vector<LabeledExample> examples;
  std::size_t n_features = 0;
  std::size_t n_classes = 2;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }
  bool operator==(const Dataset&) const = default;
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

enum class DataSource { kBlobs, kCsv };

struct DatasetSpec {
  DataSource source = DataSource::kBlobs;
  std::size_t n_samples = 300;
  std::size_t n_features = 2;
  double class_separation = 6.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  double split_fraction = 0.8;
  // csv source only
  std::filesystem::path csv_path;
  std::string label_column = "label";
  // Min-max scaling fitted on the training split.
  bool min_max_scale = false;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Two isotropic Gaussian clusters with standard deviation noise_sd, centred
/// at -/+ (class_separation / 2) * (1, ..., 1) / sqrt(n_features). Class 0
/// gets floor(n/2) samples. Split is stratified by class.
DatasetSplit make_blobs(const DatasetSpec& spec);

/// Per class, a seeded shuffle puts round(fraction * n_c) examples into
/// train; both parts are then shuffled.
DatasetSplit stratified_split(const Dataset& data, double fraction, std::uint64_t seed);

struct CsvLoadResult {
  Dataset data;
  std::vector<std::string> feature_names;
  std::size_t skipped_rows = 0;  // rows with NaN/Inf features
};

/// Comma-separated, header row required. Every column except label_column
/// is a numeric feature; labels are non-negative integers. Rows with
/// non-finite features are dropped and counted (with a warning on stderr).
/// Throws ParseError carrying the 1-based line number for malformed input.
CsvLoadResult load_csv(const std::filesystem::path& path, const std::string& label_column);

/// Writes features as shortest round-trip decimals followed by the label.
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::vector<std::string>& feature_names = {},
              const std::string& label_column = "label");

class MinMaxScaler {
 public:
  static MinMaxScaler fit(const Dataset& data);
  void apply(Dataset& data) const;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

/// Builds the train/test split described by spec (blobs or csv).
DatasetSplit load_dataset(const DatasetSpec& spec);

}  // namespace agt
