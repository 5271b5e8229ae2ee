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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vlscc {

/// One row of the metrics CSV. Optional columns are written empty when they
/// do not apply (no PSNR for vector sources, no rate for fixed-length runs).
struct MetricsRow {
    std::string run_id;
    std::string phase;  // train | val | eval
    int epoch = 0;
    std::int64_t step = 0;
    double snr_db = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> loss;
    std::optional<double> distortion;
    std::optional<double> psnr;
    std::optional<double> lpips;
    std::optional<double> mpjpe;
    std::optional<double> mean_rate;
    std::optional<double> mean_kept_symbols;
    std::optional<double> mask_density;
    std::optional<double> spp;
    std::optional<double> sidelink_bits;
    std::optional<double> sidelink_bpp;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

/// Column order of schema version 1. Never reorder; append new columns under
/// a new major version.
inline constexpr const char* kMetricsHeader =
    "run_id,phase,epoch,step,snr_db,gamma,lambda,seed,loss,distortion,psnr,lpips,mpjpe,"
    "mean_rate,mean_kept_symbols,mask_density,spp,sidelink_bits,sidelink_bpp";

std::string format_row(const MetricsRow& row);
MetricsRow parse_row(const std::string& line);

class MetricsLog {
public:
    void append(MetricsRow row) { rows_.push_back(std::move(row)); }
    void append(const MetricsLog& other) { rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end()); }

    const std::vector<MetricsRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    // Writes header and rows, replacing the file.
    void write_csv(const std::filesystem::path& path) const;
    static MetricsLog read_csv(const std::filesystem::path& path);

private:
    std::vector<MetricsRow> rows_;
};

/// Append-only CSV sink: writes the header when the file is new, otherwise
/// checks that the existing header matches.
class MetricsWriter {
public:
    explicit MetricsWriter(std::filesystem::path path);
    void write(const MetricsRow& row);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace vlscc
