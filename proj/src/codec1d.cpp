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

#include "vlscc/codec1d.hpp"

#include "vlscc/nn.hpp"
#include "vlscc/ste.hpp"

#include <stdexcept>
#include <string>

namespace vlscc {

void Codec1dConfig::validate() const
{
    if (dim < 1 || symbols < 1 || hidden < 1)
        throw std::invalid_argument("codec dimensions must be positive");
    check_levels(levels);
    if (encoder_layers < 1 || decoder_layers < 1 || rate_layers < 1)
        throw std::invalid_argument("layer counts must be >= 1");
    if (fixed_symbols && (*fixed_symbols < 0 || *fixed_symbols > symbols))
        throw std::invalid_argument("fixed symbol count must lie in [0, N]");
}

Codec1dImpl::Codec1dImpl(Codec1dConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
    const int cond = cfg_.fixed_length() ? 0 : 1;
    if (!cfg_.fixed_length())
        ran_ = register_module("ran", make_mlp(cfg_.dim, cfg_.hidden, 1, cfg_.rate_layers));
    sce_ = register_module("sce", make_mlp(cfg_.dim + cond, cfg_.hidden, cfg_.symbols, cfg_.encoder_layers));
    scd_ = register_module("scd", make_mlp(cfg_.symbols + cond, cfg_.hidden, cfg_.dim, cfg_.decoder_layers));
    init_weights(*this, cfg_.seed);
    // A decoder that starts near zero output keeps the early distortion gradient
    // from rewarding an empty mask before the encoder has learned anything.
    scale_output_layer(scd_, 0.1);
}

void Codec1dImpl::check_input(const torch::Tensor& x) const
{
    if (x.dim() != 2 || x.size(1) != cfg_.dim)
        throw std::invalid_argument("expected input [B, " + std::to_string(cfg_.dim) + "]");
}

torch::Tensor Codec1dImpl::rate(const torch::Tensor& x)
{
    check_input(x);
    if (cfg_.fixed_length())
        throw std::logic_error("fixed-length codec has no rate network");
    return torch::sigmoid(ran_->forward(x)).squeeze(1);
}

torch::Tensor Codec1dImpl::encode_symbols(const torch::Tensor& x, const torch::Tensor& r)
{
    check_input(x);
    if (cfg_.fixed_length())
        return sce_->forward(x);
    return sce_->forward(torch::cat({x, r.reshape({-1, 1})}, 1));
}

torch::Tensor Codec1dImpl::reconstruct(const torch::Tensor& padded, const torch::Tensor& quant)
{
    if (padded.dim() != 2 || padded.size(1) != cfg_.symbols)
        throw std::invalid_argument("expected padded symbols [B, " + std::to_string(cfg_.symbols) + "]");
    if (cfg_.fixed_length())
        return scd_->forward(padded);
    const auto cond = (quant / static_cast<double>(cfg_.levels - 1)).reshape({-1, 1}).to(padded.dtype());
    return scd_->forward(torch::cat({padded, cond}, 1));
}

torch::Tensor Codec1dImpl::fixed_mask(int64_t batch, const torch::TensorOptions& opts) const
{
    auto m = torch::zeros({batch, cfg_.symbols}, opts);
    m.narrow(1, 0, *cfg_.fixed_symbols).fill_(1.0);
    return m;
}

Forward1d Codec1dImpl::forward(const torch::Tensor& x, const SymbolChannel& channel, const torch::Tensor& rate_override,
                                const torch::Tensor& rate_offset)
{
    check_input(x);
    Forward1d out;
    if (cfg_.fixed_length()) {
        out.mask = fixed_mask(x.size(0), x.options());
        out.symbols = encode_symbols(x, {});
    } else {
        if (rate_override.defined()) {
            if (rate_override.dim() != 1 || rate_override.size(0) != x.size(0))
                throw std::invalid_argument("rate override must be [B]");
            out.rate = rate_override.detach().to(x.dtype());
        } else {
            out.rate = rate(x);
        }
        torch::Tensor r = out.rate;
        if (rate_offset.defined()) {
            if (!rate_offset.sizes().equals(r.sizes()))
                throw std::invalid_argument("rate offset must be [B]");
            r = (r + rate_offset.detach().to(r.dtype())).clamp(0.0, 1.0);
        }
        out.quant = quantize_ste(r, cfg_.levels);
        out.mask = mask_ste(out.quant, cfg_.symbols, cfg_.levels);
        out.symbols = encode_symbols(x, r);
    }
    const auto z = normalize_power(out.symbols, out.mask);
    out.received = channel(z, out.mask);
    out.reconstruction = reconstruct(out.received, out.quant);
    return out;
}

std::vector<SymbolFrame> Codec1dImpl::encode(const torch::Tensor& x)
{
    check_input(x);
    torch::NoGradGuard guard;
    torch::Tensor r;
    if (!cfg_.fixed_length())
        r = rate(x);
    const auto y = encode_symbols(x, r).to(torch::kFloat64).contiguous();
    if (r.defined())
        r = r.to(torch::kFloat64).contiguous();

    std::vector<SymbolFrame> frames;
    frames.reserve(static_cast<std::size_t>(x.size(0)));
    for (int64_t b = 0; b < x.size(0); ++b) {
        SymbolFrame f;
        f.symbols = cfg_.symbols;
        int kept = 0;
        if (cfg_.fixed_length()) {
            f.fixed_kept = *cfg_.fixed_symbols;
            kept = f.fixed_kept;
        } else {
            const int q = quantize_clamped(r.data_ptr<double>()[b], cfg_.levels);
            f.quant = QuantMap::scalar(q, cfg_.levels);
            kept = mask_popcount(q, cfg_.symbols, cfg_.levels);
        }
        const double* row = y.data_ptr<double>() + b * cfg_.symbols;
        f.kept = normalize_power(std::span<const double>(row, static_cast<std::size_t>(kept))).symbols;
        frames.push_back(std::move(f));
    }
    return frames;
}

torch::Tensor Codec1dImpl::decode(std::span<const SymbolFrame> frames)
{
    torch::NoGradGuard guard;
    const auto dtype = parameters().front().scalar_type();
    const auto batch = static_cast<int64_t>(frames.size());
    auto padded = torch::zeros({batch, cfg_.symbols}, torch::kFloat64);
    auto quant = torch::zeros({batch}, torch::kFloat64);
    for (int64_t b = 0; b < batch; ++b) {
        const auto& f = frames[static_cast<std::size_t>(b)];
        if (f.symbols != cfg_.symbols || f.locations() != 1 || f.fixed_length() != cfg_.fixed_length())
            throw std::invalid_argument("frame does not match codec configuration");
        const auto p = f.padded();
        std::copy(p.begin(), p.end(), padded.data_ptr<double>() + b * cfg_.symbols);
        if (!f.fixed_length())
            quant[b] = f.quant.values.front();
    }
    return reconstruct(padded.to(dtype), quant.to(dtype));
}

}  // namespace vlscc
