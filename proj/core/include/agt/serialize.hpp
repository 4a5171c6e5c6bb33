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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "agt/certifier.hpp"
#include "agt/mlp.hpp"
#include "agt/param_box.hpp"

namespace agt {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr int kArtifactVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = kFnvOffsetBasis);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);
/// Inverse of hex64. Throws FormatError on anything else.
std::uint64_t parse_hex64(std::string_view text);

// JSON encodings. Doubles are written in shortest round-trip form, so
// decode(encode(v)) == v exactly. Decoders throw FormatError.
std::string model_to_json(const Mlp& model);
Mlp model_from_json(std::string_view text);

std::string box_to_json(const ParamBox& box);
ParamBox box_from_json(std::string_view text);

std::string bundle_to_json(const CertificateBundle& bundle);
CertificateBundle bundle_from_json(std::string_view text);

void save_bundle(const CertificateBundle& bundle, const std::filesystem::path& path);
CertificateBundle load_bundle(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace agt
