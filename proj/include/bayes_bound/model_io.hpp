/*
 * Copyright 2026 The bayes_bound Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BAYES_BOUND_MODEL_IO_HPP
#define BAYES_BOUND_MODEL_IO_HPP

#include "bayes_bound/gaussian_model.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bayes_bound {

/// On-disk layout of a GCM file (little-endian):
///   "GCM1" | u32 version=1 | u32 K | u32 d | u8 cov_kind |
///   f64 priors[K] | f64 means[K*d] (row-major) | f64 cov[d*d | d | 1]
/// The JSON twin carries {"k","d","cov_kind","priors","means","cov"} and is
/// accepted for files under 1 MiB.
enum class ModelFormat { binary, json };

inline constexpr std::uint32_t kGcmVersion = 1;
inline constexpr std::size_t kMaxJsonModelBytes = std::size_t{1} << 20;

/// Parses either encoding, dispatching on the "GCM1" magic.
GaussianClassModel parse_model(std::span<const std::byte> bytes);

/// Reads and parses a model file. Throws Error(io) when unreadable and
/// Error(format) when malformed.
GaussianClassModel load_model(const std::string& path);

std::vector<std::byte> encode_model_binary(const GaussianClassModel& model);
std::string encode_model_json(const GaussianClassModel& model);

void save_model(const GaussianClassModel& model, const std::string& path, ModelFormat format = ModelFormat::binary);

}  // namespace bayes_bound

#endif
