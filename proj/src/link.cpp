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

#include "vlscc/link.hpp"

#include <cmath>
#include <stdexcept>

namespace vlscc {

std::size_t SymbolFrame::expected_kept() const
{
    if (fixed_length())
        return locations() * static_cast<std::size_t>(fixed_kept);
    return kept_symbols(quant, symbols);
}

MaskTensor SymbolFrame::mask() const
{
    if (!fixed_length())
        return make_mask_tensor(quant, symbols);
    MaskTensor m{rows, cols, symbols, std::vector<std::uint8_t>(locations() * static_cast<std::size_t>(symbols), 0)};
    for (std::size_t loc = 0; loc < locations(); ++loc)
        std::fill_n(m.bits.begin() + static_cast<std::ptrdiff_t>(loc * static_cast<std::size_t>(symbols)), fixed_kept,
                    std::uint8_t{1});
    return m;
}

std::vector<double> SymbolFrame::padded() const
{
    if (!fixed_length())
        return zero_pad(kept, quant, symbols);
    if (kept.size() != expected_kept())
        throw std::invalid_argument("fixed-length frame carries the wrong number of symbols");
    std::vector<double> out(locations() * static_cast<std::size_t>(symbols), 0.0);
    for (std::size_t loc = 0; loc < locations(); ++loc)
        std::copy_n(kept.begin() + static_cast<std::ptrdiff_t>(loc * static_cast<std::size_t>(fixed_kept)), fixed_kept,
                    out.begin() + static_cast<std::ptrdiff_t>(loc * static_cast<std::size_t>(symbols)));
    return out;
}

void transmit(std::span<SymbolFrame> frames, AwgnChannel& channel)
{
    for (auto& f : frames)
        f.kept = channel.transmit(f.kept);
}

SymbolChannel noiseless_channel()
{
    return [](const torch::Tensor& z, const torch::Tensor&) { return z; };
}

SymbolChannel awgn_channel(double snr_db, torch::Generator generator)
{
    const double sigma = std::sqrt(noise_variance(snr_db));
    return [sigma, generator](const torch::Tensor& z, const torch::Tensor& mask) mutable {
        auto noise = at::normal(0.0, sigma, z.sizes(), generator, z.options().requires_grad(false));
        return z + noise * mask;
    };
}

torch::Tensor normalize_power(const torch::Tensor& y, const torch::Tensor& mask)
{
    if (y.sizes() != mask.sizes())
        throw std::invalid_argument("symbol and mask shapes differ");
    const auto flat_y = (y * mask).reshape({y.size(0), -1});
    const auto kept = mask.reshape({y.size(0), -1}).sum(1, true);
    const auto energy = flat_y.pow(2).sum(1, true);
    const auto safe_energy = torch::where(energy > 0, energy, torch::ones_like(energy));
    // keep sqrt away from 0 so the unused branch cannot poison the gradient
    const auto safe_kept = torch::where(kept > 0, kept, torch::ones_like(kept));
    const auto scale = torch::where(kept > 0, torch::sqrt(safe_kept / safe_energy), torch::ones_like(kept));
    return (flat_y * scale).reshape(y.sizes());
}

}  // namespace vlscc
