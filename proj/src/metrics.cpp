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

#include "vlscc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace vlscc {

double mean_squared_error(std::span<const float> x, std::span<const float> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("shape mismatch");
    if (x.empty())
        return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(x.size());
}

double psnr_from_mse(double mse)
{
    if (mse <= 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double psnr(std::span<const float> x, std::span<const float> y)
{
    return psnr_from_mse(mean_squared_error(x, y));
}

double mpjpe(std::span<const JointSet> truth, std::span<const JointSet> estimate)
{
    if (truth.size() != estimate.size() || truth.empty())
        throw std::invalid_argument("joint batches must be non-empty and of equal size");
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t m = 0; m < truth.size(); ++m) {
        if (truth[m].size() != estimate[m].size())
            throw std::invalid_argument("joint count mismatch");
        for (std::size_t k = 0; k < truth[m].size(); ++k) {
            const auto& a = truth[m][k];
            const auto& b = estimate[m][k];
            acc += std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                             (a[2] - b[2]) * (a[2] - b[2]));
            ++count;
        }
    }
    return count == 0 ? 0.0 : acc / static_cast<double>(count);
}

JointSet as_joints(std::span<const float> flat)
{
    if (flat.size() % 3 != 0)
        throw std::invalid_argument("vector length is not a multiple of 3");
    JointSet joints(flat.size() / 3);
    for (std::size_t k = 0; k < joints.size(); ++k)
        joints[k] = {flat[3 * k], flat[3 * k + 1], flat[3 * k + 2]};
    return joints;
}

double spp(double real_symbols, int height, int width)
{
    if (height <= 0 || width <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    return real_symbols / 2.0 / (static_cast<double>(height) * static_cast<double>(width));
}

double mask_density(std::span<const QuantMap> frames, int symbols)
{
    if (frames.empty())
        throw std::invalid_argument("mask_density needs at least one frame");
    double kept = 0.0;
    double slots = 0.0;
    for (const auto& f : frames) {
        kept += static_cast<double>(kept_symbols(f, symbols));
        slots += static_cast<double>(f.size()) * symbols;
    }
    return slots == 0.0 ? 0.0 : kept / slots;
}

}  // namespace vlscc
