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

#include "vlscc/codec2d.hpp"

#include "vlscc/nn.hpp"
#include "vlscc/ste.hpp"

#include <stdexcept>
#include <string>

namespace vlscc {

namespace nn = torch::nn;

std::vector<double> gather_kept(std::span<const double> symbols, const MaskTensor& mask)
{
    if (symbols.size() != mask.bits.size())
        throw std::invalid_argument("symbol tensor and mask tensor differ in size");
    std::vector<double> out;
    out.reserve(mask.popcount());
    for (std::size_t k = 0; k < symbols.size(); ++k)
        if (mask.bits[k])
            out.push_back(symbols[k]);
    return out;
}

std::vector<double> scatter_padded(std::span<const double> received, const QuantMap& quant, int symbols)
{
    return zero_pad(received, quant, symbols);
}

torch::Tensor images_to_tensor(std::span<const Image> images)
{
    if (images.empty())
        throw std::invalid_argument("no images");
    const int h = images.front().height;
    const int w = images.front().width;
    auto out = torch::empty({static_cast<int64_t>(images.size()), h, w, 3}, torch::kFloat32);
    float* dst = out.data_ptr<float>();
    for (const auto& img : images) {
        if (img.height != h || img.width != w)
            throw std::invalid_argument("images in a batch must share one size");
        dst = std::copy(img.pixels.begin(), img.pixels.end(), dst);
    }
    return out.permute({0, 3, 1, 2}).contiguous();
}

std::vector<Image> tensor_to_images(const torch::Tensor& batch)
{
    if (batch.dim() != 4 || batch.size(1) != 3)
        throw std::invalid_argument("expected [B, 3, H, W]");
    const auto hwc = batch.detach().to(torch::kFloat32).permute({0, 2, 3, 1}).contiguous();
    std::vector<Image> out;
    const auto h = static_cast<int>(batch.size(2));
    const auto w = static_cast<int>(batch.size(3));
    const float* src = hwc.data_ptr<float>();
    for (int64_t b = 0; b < batch.size(0); ++b) {
        Image img(h, w);
        std::copy_n(src + b * h * w * 3, img.pixels.size(), img.pixels.begin());
        out.push_back(std::move(img));
    }
    return out;
}

void Codec2dConfig::validate() const
{
    if (feature_channels < 1 || sce_channels < 1 || symbols < 1 || rate_channels < 1)
        throw std::invalid_argument("codec widths must be positive");
    check_levels(levels);
    if (fixed_symbols && (*fixed_symbols < 0 || *fixed_symbols > symbols))
        throw std::invalid_argument("fixed symbol count must lie in [0, N]");
}

namespace {

nn::Conv2d conv(int64_t in, int64_t out, int64_t k, int64_t stride)
{
    return nn::Conv2d(nn::Conv2dOptions(in, out, k).stride(stride).padding(k / 2));
}

// Transposed counterpart of conv(): doubles the spatial size when stride is 2.
nn::ConvTranspose2d deconv(int64_t in, int64_t out, int64_t k, int64_t stride)
{
    return nn::ConvTranspose2d(
        nn::ConvTranspose2dOptions(in, out, k).stride(stride).padding(k / 2).output_padding(stride - 1));
}

}  // namespace

Codec2dImpl::Codec2dImpl(Codec2dConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
    const int64_t c1 = cfg_.feature_channels;
    const int64_t cs = cfg_.sce_channels;
    const int64_t cr = cfg_.rate_channels;
    const int64_t n = cfg_.symbols;
    const int64_t cond = cfg_.fixed_length() ? 0 : 1;

    encoder_ = register_module(
        "encoder", nn::Sequential(conv(3, c1, 9, 2), nn::PReLU(), conv(c1, c1, 5, 2), nn::PReLU(), conv(c1, c1, 5, 1)));
    if (!cfg_.fixed_length())
        ran_ = register_module("ran", nn::Sequential(conv(c1, cr, 5, 1), nn::PReLU(), conv(cr, cr, 5, 1), nn::PReLU(),
                                                     conv(cr, cr, 5, 2), nn::PReLU(), conv(cr, 1, 3, 2)));
    sce_ = register_module("sce", nn::Sequential(conv(c1 + cond, cs, 5, 2), nn::PReLU(), conv(cs, cs, 5, 1),
                                                 nn::PReLU(), conv(cs, cs, 5, 1), conv(cs, n, 3, 2)));
    scd_ = register_module("scd", nn::Sequential(deconv(n + cond, cs, 3, 2), nn::PReLU(), deconv(cs, cs, 5, 1),
                                                 nn::PReLU(), deconv(cs, cs, 5, 1), nn::PReLU(),
                                                 deconv(cs, c1, 5, 2)));
    decoder_ = register_module("decoder", nn::Sequential(deconv(c1, c1, 5, 1), nn::PReLU(), deconv(c1, c1, 5, 2),
                                                         nn::PReLU(), deconv(c1, 3, 9, 2)));
    init_weights(*this, cfg_.seed);
    scale_output_layer(scd_, 0.1);
}

void Codec2dImpl::check_images(const torch::Tensor& images) const
{
    if (images.dim() != 4 || images.size(1) != 3 || images.size(2) % 16 != 0 || images.size(3) % 16 != 0 ||
        images.size(2) == 0 || images.size(3) == 0)
        throw std::invalid_argument("expected images [B, 3, H, W] with H, W positive multiples of 16");
}

torch::Tensor Codec2dImpl::semantic_encode(const torch::Tensor& images)
{
    check_images(images);
    return encoder_->forward(images);
}

torch::Tensor Codec2dImpl::rate_map(const torch::Tensor& features)
{
    if (cfg_.fixed_length())
        throw std::logic_error("fixed-length codec has no rate network");
    if (features.dim() != 4 || features.size(1) != cfg_.feature_channels || features.size(2) % 4 != 0 ||
        features.size(3) % 4 != 0)
        throw std::invalid_argument("feature tensor shape does not match the codec");
    return torch::sigmoid(ran_->forward(features)).squeeze(1);
}

torch::Tensor Codec2dImpl::encode_symbols(const torch::Tensor& features, const torch::Tensor& rate_map)
{
    if (features.dim() != 4 || features.size(1) != cfg_.feature_channels)
        throw std::invalid_argument("feature tensor shape does not match the codec");
    if (cfg_.fixed_length())
        return sce_->forward(features);
    if (rate_map.dim() != 3 || rate_map.size(1) * 4 != features.size(2) || rate_map.size(2) * 4 != features.size(3))
        throw std::invalid_argument("rate map must be a quarter of the feature resolution");
    const auto up = torch::nn::functional::interpolate(
        rate_map.unsqueeze(1),
        torch::nn::functional::InterpolateFuncOptions()
            .size(std::vector<int64_t>{features.size(2), features.size(3)})
            .mode(torch::kNearest));
    return sce_->forward(torch::cat({features, up}, 1));
}

torch::Tensor Codec2dImpl::reconstruct_features(const torch::Tensor& padded, const torch::Tensor& quant)
{
    if (padded.dim() != 4 || padded.size(1) != cfg_.symbols)
        throw std::invalid_argument("padded symbols must be [B, N, H2, W2]");
    if (cfg_.fixed_length())
        return scd_->forward(padded);
    if (quant.dim() != 3 || quant.size(1) != padded.size(2) || quant.size(2) != padded.size(3))
        throw std::invalid_argument("quant map shape does not match padded symbols");
    const auto plane = (quant / static_cast<double>(cfg_.levels - 1)).unsqueeze(1).to(padded.dtype());
    return scd_->forward(torch::cat({padded, plane}, 1));
}

torch::Tensor Codec2dImpl::semantic_decode(const torch::Tensor& features)
{
    if (features.dim() != 4 || features.size(1) != cfg_.feature_channels)
        throw std::invalid_argument("feature tensor shape does not match the codec");
    // The clamp passes gradients straight through; a hard clamp would leave
    // saturated pixels without any signal to pull them back into range.
    const auto raw = decoder_->forward(features) + 0.5;
    return raw + (raw.clamp(0.0, 1.0) - raw).detach();
}

torch::Tensor Codec2dImpl::fixed_mask(int64_t batch, int64_t rows, int64_t cols, const torch::TensorOptions& opts) const
{
    auto m = torch::zeros({batch, cfg_.symbols, rows, cols}, opts);
    m.narrow(1, 0, *cfg_.fixed_symbols).fill_(1.0);
    return m;
}

Forward2d Codec2dImpl::forward(const torch::Tensor& images, const SymbolChannel& channel,
                               const torch::Tensor& rate_override, const torch::Tensor& rate_offset)
{
    Forward2d out;
    out.features = semantic_encode(images);
    if (cfg_.fixed_length()) {
        out.symbols = encode_symbols(out.features, {});
        out.mask = fixed_mask(images.size(0), out.symbols.size(2), out.symbols.size(3), images.options());
    } else {
        if (rate_override.defined()) {
            if (rate_override.dim() != 3 || rate_override.size(0) != images.size(0) ||
                rate_override.size(1) * 16 != images.size(2) || rate_override.size(2) * 16 != images.size(3))
                throw std::invalid_argument("rate override must be [B, H/16, W/16]");
            out.rate_map = rate_override.detach().to(out.features.dtype());
        } else {
            out.rate_map = rate_map(out.features);
        }
        torch::Tensor r = out.rate_map;
        if (rate_offset.defined()) {
            if (!rate_offset.sizes().equals(r.sizes()))
                throw std::invalid_argument("rate offset must be [B, H/16, W/16]");
            r = (r + rate_offset.detach().to(r.dtype())).clamp(0.0, 1.0);
        }
        out.quant = quantize_ste(r, cfg_.levels);
        out.mask = mask_ste(out.quant, cfg_.symbols, cfg_.levels);
        out.symbols = encode_symbols(out.features, r);
    }
    const auto z = normalize_power(out.symbols, out.mask);
    out.received = channel(z, out.mask);
    out.features_hat = reconstruct_features(out.received, out.quant);
    out.reconstruction = semantic_decode(out.features_hat);
    return out;
}

std::vector<SymbolFrame> Codec2dImpl::encode(const torch::Tensor& images)
{
    torch::NoGradGuard guard;
    const auto x = semantic_encode(images);
    torch::Tensor r;
    if (!cfg_.fixed_length())
        r = rate_map(x);
    // [B, H2, W2, N] so each sample is a location-major, symbol-fastest buffer
    const auto y = encode_symbols(x, r).permute({0, 2, 3, 1}).to(torch::kFloat64).contiguous();
    if (r.defined())
        r = r.to(torch::kFloat64).contiguous();

    const int rows = static_cast<int>(y.size(1));
    const int cols = static_cast<int>(y.size(2));
    const std::size_t per_sample = static_cast<std::size_t>(rows) * cols * cfg_.symbols;
    std::vector<SymbolFrame> frames;
    for (int64_t b = 0; b < images.size(0); ++b) {
        SymbolFrame f;
        f.symbols = cfg_.symbols;
        f.rows = rows;
        f.cols = cols;
        if (cfg_.fixed_length()) {
            f.fixed_kept = *cfg_.fixed_symbols;
        } else {
            f.quant = QuantMap(rows, cols, cfg_.levels);
            const double* rb = r.data_ptr<double>() + b * rows * cols;
            for (std::size_t k = 0; k < f.quant.values.size(); ++k)
                f.quant.values[k] = quantize_clamped(rb[k], cfg_.levels);
        }
        const std::span<const double> yb(y.data_ptr<double>() + static_cast<std::size_t>(b) * per_sample, per_sample);
        const auto kept = gather_kept(yb, f.mask());
        f.kept = normalize_power(kept).symbols;
        frames.push_back(std::move(f));
    }
    return frames;
}

torch::Tensor Codec2dImpl::decode(std::span<const SymbolFrame> frames)
{
    torch::NoGradGuard guard;
    if (frames.empty())
        throw std::invalid_argument("nothing to decode");
    const auto dtype = parameters().front().scalar_type();
    const int rows = frames.front().rows;
    const int cols = frames.front().cols;
    const auto batch = static_cast<int64_t>(frames.size());
    auto padded = torch::zeros({batch, rows, cols, cfg_.symbols}, torch::kFloat64);
    auto quant = torch::zeros({batch, rows, cols}, torch::kFloat64);
    const std::size_t per_sample = static_cast<std::size_t>(rows) * cols * cfg_.symbols;
    for (int64_t b = 0; b < batch; ++b) {
        const auto& f = frames[static_cast<std::size_t>(b)];
        if (f.symbols != cfg_.symbols || f.rows != rows || f.cols != cols || f.fixed_length() != cfg_.fixed_length())
            throw std::invalid_argument("frame does not match codec configuration");
        const auto p = f.padded();
        std::copy(p.begin(), p.end(), padded.data_ptr<double>() + static_cast<std::size_t>(b) * per_sample);
        if (!f.fixed_length())
            for (std::size_t k = 0; k < f.quant.values.size(); ++k)
                quant.data_ptr<double>()[static_cast<std::size_t>(b) * rows * cols + k] = f.quant.values[k];
    }
    const auto p = padded.permute({0, 3, 1, 2}).to(dtype);
    return semantic_decode(reconstruct_features(p, quant.to(dtype)));
}

}  // namespace vlscc
