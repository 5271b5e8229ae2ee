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

#include "vlscc/checkpoint.hpp"
#include "vlscc/codec1d.hpp"
#include "vlscc/codec2d.hpp"
#include "vlscc/config.hpp"
#include "vlscc/metrics_log.hpp"

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vlscc {

class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The codec a run trains, either the vector or the image variant.
class CodecModel {
public:
    explicit CodecModel(const RunConfig& cfg);

    Task task() const { return task_; }
    torch::nn::Module& module();
    std::vector<torch::Tensor> parameters();
    Codec1d& vector_codec();
    Codec2d& image_codec();

    int symbols() const;
    int levels() const;
    bool fixed_length() const;

    void train(bool on = true) { module().train(on); }

private:
    Task task_;
    Codec1d vector_{nullptr};
    Codec2d image_{nullptr};
};

/// Evaluation data for a run: the vector test set or the image test set.
struct Dataset {
    torch::Tensor inputs;  // [M, D] or [M, 3, H, W]
    std::vector<std::vector<std::uint8_t>> textured;  // per image, procedural sources only
};

Dataset validation_set(const RunConfig& cfg);
Dataset test_set(const RunConfig& cfg);

// Training batch for a given step; a pure function of (cfg.seed, step).
torch::Tensor training_batch(const RunConfig& cfg, std::int64_t step);

struct TrainOptions {
    std::optional<std::filesystem::path> resume;
    bool write_outputs = true;  // checkpoints and metrics.csv under the output dir
    bool verbose = false;
};

struct TrainResult {
    std::filesystem::path output_dir;
    Checkpoint last;
    Checkpoint best;
    MetricsLog log;
    std::int64_t first_step = 0;
    std::vector<double> step_losses;  // one per optimizer step taken in this call
};

/// Optimizes the configured objective. A train row and a val row are logged
/// per epoch; `last.ckpt` is rewritten every epoch and `best.ckpt` whenever
/// validation distortion improves. Throws TrainingDiverged on a non-finite
/// loss.
TrainResult train(const RunConfig& cfg, const TrainOptions& opts = {});

// Rebuilds the codec stored in a checkpoint.
CodecModel load_model(const Checkpoint& ckpt);
RunConfig checkpoint_config(const Checkpoint& ckpt);
Checkpoint make_checkpoint(CodecModel& model, const RunConfig& cfg, std::int64_t step);

/// Per-sample accounting behind one evaluation row.
struct EvalAccounting {
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    int height = 0;  // images only
    int width = 0;
    int symbols = 0;
    int levels = 0;
    std::vector<QuantMap> quant;               // empty for fixed-length runs
    std::vector<std::size_t> kept;             // real symbols sent per sample
    std::vector<std::size_t> sidelink_bits;    // packet table + payload per sample
};

struct EvalResult {
    MetricsLog log;
    std::vector<EvalAccounting> accounting;  // parallel to log rows
};

/// Transmission-path evaluation: frames are physically shortened, sent over
/// a seeded AWGN link, padded and decoded. One row per (snr, seed).
EvalResult evaluate(CodecModel& model, const RunConfig& cfg, const Dataset& data,
                    std::span<const double> snr_list, std::span<const std::uint64_t> seeds);
EvalResult evaluate(const Checkpoint& ckpt, const RunConfig& cfg, std::span<const double> snr_list,
                    std::span<const std::uint64_t> seeds);

enum class SweepAxis { Gamma, Snr };

struct SweepPoint {
    double value = 0.0;  // gamma or training SNR
    std::filesystem::path checkpoint;
    EvalResult eval;
};

struct SweepResult {
    MetricsLog log;  // train, val and eval rows of every point
    std::vector<SweepPoint> points;
};

/// One train + evaluate per axis value with shared seeds. The merged log is
/// written to <output_dir>/<run_id>-sweep.csv.
SweepResult sweep(const RunConfig& cfg, SweepAxis axis, std::span<const double> values,
                  const TrainOptions& opts = {});

/// Gamma whose evaluation has the largest mean kept symbols not above the
/// budget. Throws std::runtime_error when no point qualifies.
double select_gamma(double budget, const MetricsLog& log);

struct BaselineResult {
    TrainResult training;
    EvalResult eval;
};

// Same codec with the rate path removed and a constant prefix of n symbols.
BaselineResult fixed_length_baseline(const RunConfig& cfg, int n_symbols, const TrainOptions& opts = {});

struct RateContrast {
    double textured = 0.0;  // mean rate over locations whose 16x16 block is fully textured
    double flat = 0.0;      // mean rate over fully flat blocks
    std::int64_t textured_cells = 0;
    std::int64_t flat_cells = 0;
};

/// Compares the rate map over textured and flat regions of an annotated
/// procedural image set. Blocks that straddle a boundary are ignored.
RateContrast rate_contrast(CodecModel& model, const Dataset& data);

/// Writes the rate maps of the first `count` test images as one PGM grid,
/// each map upscaled to image resolution. Returns the grid size (rows, cols).
std::pair<int, int> export_rate_maps(CodecModel& model, const RunConfig& cfg, int count,
                                     const std::filesystem::path& path);

}  // namespace vlscc
