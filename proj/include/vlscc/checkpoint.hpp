/**
 * Copyright 2026 The VL-SCC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <json.hpp>
#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace vlscc {

/// Versioned parameter container.
///
/// Little-endian layout:
///
///     char[8]  "VLSCCKPT"
///     u32      format version
///     i64      training step
///     u32 n, n bytes   metadata JSON (task, codec config, run config)
///     u32      tensor count
///     per tensor:
///       u16 n, n bytes  name
///       u8              dtype (0 f32, 1 f64, 2 i64)
///       u8              rank
///       i64 * rank      shape
///       raw             contiguous data
///     u32      CRC-32 of all preceding bytes
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    std::int64_t step = 0;
    nlohmann::json metadata;
    std::vector<std::pair<std::string, torch::Tensor>> tensors;

    const torch::Tensor* find(const std::string& name) const;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Parameters and buffers of `module`, names prefixed with `prefix`.
void append_module_state(Checkpoint& ckpt, const torch::nn::Module& module, const std::string& prefix);

/// Copies tensors named prefix + local name into the module. Throws if a
/// parameter is missing or has the wrong shape.
void restore_module_state(const Checkpoint& ckpt, torch::nn::Module& module, const std::string& prefix);

}  // namespace vlscc
