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

#include "vlscc/codec1d.hpp"
#include "vlscc/codec2d.hpp"
#include "vlscc/datasrc.hpp"
#include "vlscc/losses.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vlscc {

enum class Task { Vector, Image };

std::string to_string(Task task);
Task parse_task(const std::string& name);

struct ImageSourceConfig {
    std::string source = "procedural";  // "procedural" | "folder"
    std::string folder;
    std::string image_template = "half";
    int height = 64;  // procedural image size
    int width = 64;
    int patch_size = 128;  // folder patches
    bool augment = true;
};

struct OptimizerConfig {
    double learning_rate = 1e-4;
    int batch_size = 64;
    // Initial steps trained with a uniformly random rate in place of the
    // rate network, which is not updated during them.
    int rate_warmup_steps = 0;
    // After warm-up, each training rate is shifted by a uniform offset of up
    // to this many quantization levels either way before it is quantized.
    double rate_dither_levels = 0.0;
};

/// Everything a run needs. Validated before any work starts.
struct RunConfig {
    std::string run_id = "run";
    Task task = Task::Vector;
    Codec1dConfig codec1d{.dim = 64, .fixed_symbols = std::nullopt};  // matches the default mixture
    Codec2dConfig codec2d;
    MixtureSpec mixture;
    ImageSourceConfig images;
    double train_snr_db = 10.0;
    std::vector<double> eval_snr_db{10.0};
    LossWeights loss;
    OptimizerConfig optimizer;
    int epochs = 10;
    int steps_per_epoch = 100;
    int validation_samples = 256;
    int eval_samples = 1024;
    std::optional<double> budget;  // mean real symbols per sample
    std::uint64_t seed = 0;
    std::uint64_t test_seed = 0x7e57;
    std::vector<std::uint64_t> eval_seeds{1};
    std::string output_dir = "runs";

    void validate() const;
};

void to_json(nlohmann::json& j, const Codec1dConfig& c);
void from_json(const nlohmann::json& j, Codec1dConfig& c);
void to_json(nlohmann::json& j, const Codec2dConfig& c);
void from_json(const nlohmann::json& j, Codec2dConfig& c);
void to_json(nlohmann::json& j, const MixtureSpec& m);
void from_json(const nlohmann::json& j, MixtureSpec& m);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

RunConfig load_run_config(const std::filesystem::path& path);

// Environment variable that, when set, replaces the root of relative output
// directories.
inline constexpr const char* kOutputRootEnv = "VLSCC_OUTPUT_ROOT";

std::filesystem::path resolve_output_dir(const RunConfig& cfg);

}  // namespace vlscc
