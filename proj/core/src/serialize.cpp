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

#include "agt/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "agt/errors.hpp"
#include "json.hpp"

namespace agt {
namespace {

using nlohmann::json;

json tensor_to_json(const Tensor& t) {
  return json{{"rows", t.rows()}, {"cols", t.cols()},
              {"data", std::vector<double>(t.values().begin(), t.values().end())}};
}

Tensor tensor_from_json(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw FormatError("tensor data does not match its shape");
  return Tensor(rows, cols, std::move(data));
}

json model_json(const Mlp& model) {
  json layers = json::array();
  for (const DenseLayer& layer : model.layers()) {
    layers.push_back({{"weight", tensor_to_json(layer.weight)}, {"bias", tensor_to_json(layer.bias)}});
  }
  return json{{"format", "agt-model"}, {"version", kArtifactVersion}, {"layers", layers}};
}

void check_header(const json& j, const char* format) {
  if (j.at("format").get<std::string>() != format) {
    throw FormatError(std::string("expected a ") + format + " document");
  }
  if (j.at("version").get<int>() != kArtifactVersion) {
    throw FormatError("unsupported " + std::string(format) + " version " +
                      std::to_string(j.at("version").get<int>()));
  }
}

Mlp model_parse(const json& j) {
  check_header(j, "agt-model");
  std::vector<DenseLayer> layers;
  for (const json& layer : j.at("layers")) {
    layers.push_back({tensor_from_json(layer.at("weight")), tensor_from_json(layer.at("bias"))});
  }
  return Mlp(std::move(layers));
}

json interval_to_json(const IntervalTensor& t) {
  return json{{"lo", tensor_to_json(t.lo())}, {"hi", tensor_to_json(t.hi())}};
}

IntervalTensor interval_from_json(const json& j) {
  return IntervalTensor(tensor_from_json(j.at("lo")), tensor_from_json(j.at("hi")));
}

json box_json(const ParamBox& box) {
  json bounds = json::array();
  for (const IntervalLayer& layer : box.bounds()) {
    bounds.push_back({{"weight", interval_to_json(layer.weight)}, {"bias", interval_to_json(layer.bias)}});
  }
  return json{{"format", "agt-box"}, {"version", kArtifactVersion},
              {"nominal", model_json(box.nominal())}, {"bounds", bounds}};
}

ParamBox box_parse(const json& j) {
  check_header(j, "agt-box");
  std::vector<IntervalLayer> bounds;
  for (const json& layer : j.at("bounds")) {
    bounds.push_back({interval_from_json(layer.at("weight")), interval_from_json(layer.at("bias"))});
  }
  return ParamBox(model_parse(j.at("nominal")), std::move(bounds));
}

// Maps library and JSON exceptions from a decoder onto FormatError.
template <typename F>
auto decode(std::string_view text, const char* what, F&& parse) {
  try {
    return parse(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid ") + what + ": " + e.what());
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

std::uint64_t parse_hex64(std::string_view text) {
  if (text.size() != 16) throw FormatError("expected 16 hex digits, got '" + std::string(text) + "'");
  std::uint64_t value = 0;
  for (char c : text) {
    int digit;
    if (c >= '0' && c <= '9') digit = c - '0';
    else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
    else throw FormatError("expected 16 hex digits, got '" + std::string(text) + "'");
    value = value << 4 | static_cast<std::uint64_t>(digit);
  }
  return value;
}

std::string model_to_json(const Mlp& model) { return model_json(model).dump(); }

Mlp model_from_json(std::string_view text) { return decode(text, "model", model_parse); }

std::string box_to_json(const ParamBox& box) { return box_json(box).dump(); }

ParamBox box_from_json(std::string_view text) { return decode(text, "box", box_parse); }

std::string bundle_to_json(const CertificateBundle& bundle) {
  bundle.validate();
  json boxes = json::array();
  for (const ParamBox& box : bundle.boxes) boxes.push_back(box_json(box));
  const json j{{"format", "agt-bundle"},
               {"version", kArtifactVersion},
               {"config_hash", hex64(bundle.config_hash)},
               {"mode", to_string(bundle.mode)},
               {"beta", bundle.beta},
               {"kset", bundle.kset},
               {"boxes", boxes}};
  return j.dump();
}

CertificateBundle bundle_from_json(std::string_view text) {
  return decode(text, "bundle", [](const json& j) {
    check_header(j, "agt-bundle");
    CertificateBundle bundle;
    bundle.config_hash = parse_hex64(j.at("config_hash").get<std::string>());
    bundle.mode = parse_perturbation_mode(j.at("mode").get<std::string>());
    bundle.beta = j.at("beta").get<double>();
    bundle.kset = j.at("kset").get<std::vector<std::size_t>>();
    for (const json& box : j.at("boxes")) bundle.boxes.push_back(box_parse(box));
    bundle.validate();
    return bundle;
  });
}

void save_bundle(const CertificateBundle& bundle, const std::filesystem::path& path) {
  write_text_file(path, bundle_to_json(bundle));
}

CertificateBundle load_bundle(const std::filesystem::path& path) {
  return bundle_from_json(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace agt
