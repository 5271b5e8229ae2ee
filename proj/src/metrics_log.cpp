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

#include "vlscc/metrics_log.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vlscc {

namespace {

std::string fmt_double(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

double parse_double(const std::string& s)
{
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

std::optional<double> parse_opt(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    return parse_double(s);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

}  // namespace

std::string format_row(const MetricsRow& r)
{
    if (r.run_id.find(',') != std::string::npos || r.phase.find(',') != std::string::npos)
        throw std::invalid_argument("run id and phase must not contain commas");
    std::ostringstream out;
    out << r.run_id << ',' << r.phase << ',' << r.epoch << ',' << r.step << ',' << fmt_double(r.snr_db) << ','
        << fmt_double(r.gamma) << ',' << fmt_double(r.lambda) << ',' << r.seed << ',' << fmt_opt(r.loss) << ','
        << fmt_opt(r.distortion) << ',' << fmt_opt(r.psnr) << ',' << fmt_opt(r.lpips) << ',' << fmt_opt(r.mpjpe)
        << ',' << fmt_opt(r.mean_rate) << ',' << fmt_opt(r.mean_kept_symbols) << ',' << fmt_opt(r.mask_density)
        << ',' << fmt_opt(r.spp) << ',' << fmt_opt(r.sidelink_bits) << ',' << fmt_opt(r.sidelink_bpp);
    return out.str();
}

MetricsRow parse_row(const std::string& line)
{
    const auto f = split(line);
    if (f.size() != 19)
        throw std::invalid_argument("metrics row has " + std::to_string(f.size()) + " fields, expected 19");
    MetricsRow r;
    r.run_id = f[0];
    r.phase = f[1];
    r.epoch = std::stoi(f[2]);
    r.step = std::stoll(f[3]);
    r.snr_db = parse_double(f[4]);
    r.gamma = parse_double(f[5]);
    r.lambda = parse_double(f[6]);
    r.seed = std::stoull(f[7]);
    r.loss = parse_opt(f[8]);
    r.distortion = parse_opt(f[9]);
    r.psnr = parse_opt(f[10]);
    r.lpips = parse_opt(f[11]);
    r.mpjpe = parse_opt(f[12]);
    r.mean_rate = parse_opt(f[13]);
    r.mean_kept_symbols = parse_opt(f[14]);
    r.mask_density = parse_opt(f[15]);
    r.spp = parse_opt(f[16]);
    r.sidelink_bits = parse_opt(f[17]);
    r.sidelink_bpp = parse_opt(f[18]);
    return r;
}

void MetricsLog::write_csv(const std::filesystem::path& path) const
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << kMetricsHeader << '\n';
    for (const auto& r : rows_)
        out << format_row(r) << '\n';
}

MetricsLog MetricsLog::read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader)
        throw std::runtime_error(path.string() + ": unexpected metrics header");
    MetricsLog log;
    while (std::getline(in, line))
        if (!line.empty())
            log.append(parse_row(line));
    return log;
}

MetricsWriter::MetricsWriter(std::filesystem::path path) : path_(std::move(path))
{
    if (path_.has_parent_path())
        std::filesystem::create_directories(path_.parent_path());
    if (std::filesystem::exists(path_) && std::filesystem::file_size(path_) > 0) {
        std::ifstream in(path_);
        std::string header;
        std::getline(in, header);
        if (header != kMetricsHeader)
            throw std::runtime_error(path_.string() + " has a different metrics schema");
        return;
    }
    std::ofstream out(path_, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path_.string());
    out << kMetricsHeader << '\n';
}

void MetricsWriter::write(const MetricsRow& row)
{
    std::ofstream out(path_, std::ios::app);
    if (!out)
        throw std::runtime_error("cannot append to " + path_.string());
    out << format_row(row) << '\n';
}

}  // namespace vlscc
