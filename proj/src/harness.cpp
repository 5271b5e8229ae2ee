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

#include "vlscc/harness.hpp"

#include "vlscc/channel.hpp"
#include "vlscc/datasrc.hpp"
#include "vlscc/losses.hpp"
#include "vlscc/metrics.hpp"
#include "vlscc/nn.hpp"
#include "vlscc/sidelink.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>

namespace vlscc {

namespace {

namespace fs = std::filesystem;

// Stream tags for seeds derived from RunConfig::seed.
constexpr std::uint64_t kBatchStream = 0x100;
constexpr std::uint64_t kNoiseStream = 0x200;
constexpr std::uint64_t kDiscStream = 0x300;
constexpr std::uint64_t kValidationStream = 0x400;
constexpr std::uint64_t kWarmupStream = 0x500;
constexpr std::uint64_t kDitherStream = 0x600;

torch::Generator cpu_generator(std::uint64_t seed)
{
    return at::make_generator<at::CPUGeneratorImpl>(seed);
}

torch::Tensor vectors_to_tensor(const VectorBatch& batch)
{
    return torch::from_blob(const_cast<float*>(batch.values.data()), {batch.count, batch.dim}, torch::kFloat32)
        .clone();
}

ImageTemplate image_template(const RunConfig& cfg)
{
    return parse_image_template(cfg.images.image_template).value_or(ImageTemplate::HalfSplit);
}

Dataset procedural_set(const RunConfig& cfg, int count, std::uint64_t seed)
{
    auto generated = gen_procedural_images(count, cfg.images.height, cfg.images.width, seed, image_template(cfg));
    std::vector<Image> images;
    Dataset data;
    for (auto& g : generated) {
        images.push_back(std::move(g.image));
        data.textured.push_back(std::move(g.textured));
    }
    data.inputs = images_to_tensor(images);
    return data;
}

Dataset folder_set(const RunConfig& cfg, int count, std::uint64_t seed)
{
    auto images = load_image_folder(cfg.images.folder, cfg.images.patch_size, false, seed);
    if (static_cast<int>(images.size()) > count)
        images.resize(static_cast<std::size_t>(count));
    Dataset data;
    data.inputs = images_to_tensor(images);
    return data;
}

Dataset make_set(const RunConfig& cfg, int count, std::uint64_t seed)
{
    if (cfg.task == Task::Vector) {
        Dataset data;
        data.inputs = vectors_to_tensor(gen_vectors(count, cfg.mixture, seed));
        return data;
    }
    if (cfg.images.source == "folder")
        return folder_set(cfg, count, seed);
    return procedural_set(cfg, count, seed);
}

// One augmented pass over an image folder, reused for the steps it covers.
struct FolderPass {
    std::string key;
    std::vector<Image> images;
};

torch::Tensor folder_batch(const RunConfig& cfg, std::int64_t step)
{
    static std::mutex mutex;
    static FolderPass cache;
    static std::map<std::string, std::size_t> sizes;

    const auto batch = static_cast<std::size_t>(cfg.optimizer.batch_size);
    const std::string base = cfg.images.folder + "|" + std::to_string(cfg.images.patch_size) + "|" +
                             std::to_string(cfg.images.augment) + "|" + std::to_string(cfg.seed);
    std::lock_guard lock(mutex);
    auto load = [&](std::uint64_t pass) {
        const std::string key = base + "|" + std::to_string(pass);
        if (cache.key != key) {
            cache.images = load_image_folder(cfg.images.folder, cfg.images.patch_size, cfg.images.augment,
                                             mix_seed(mix_seed(cfg.seed, kBatchStream), pass));
            cache.key = key;
            sizes[base] = cache.images.size();
        }
        return &cache.images;
    };
    if (!sizes.count(base))
        load(0);
    const std::size_t pool = sizes[base];

    std::vector<Image> out;
    for (std::size_t i = 0; i < batch; ++i) {
        const std::size_t global = static_cast<std::size_t>(step) * batch + i;
        const auto* images = load(global / pool);
        out.push_back((*images)[global % pool]);
    }
    return images_to_tensor(out);
}

bool finite(double v) { return std::isfinite(v); }

std::string format_value(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

fs::path run_dir(const RunConfig& cfg) { return resolve_output_dir(cfg) / cfg.run_id; }

// Adam moments are keyed by parameter identity inside the optimizer, so they
// are stored by position in the parameter list.
void append_adam_state(Checkpoint& ckpt, torch::optim::Adam& opt, const std::vector<torch::Tensor>& params,
                       const std::string& prefix)
{
    auto& state = opt.state();
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto it = state.find(params[i].unsafeGetTensorImpl());
        if (it == state.end())
            continue;
        const auto& s = static_cast<const torch::optim::AdamParamState&>(*it->second);
        const std::string name = prefix + std::to_string(i);
        ckpt.tensors.emplace_back(name + ".step", torch::full({1}, static_cast<int64_t>(s.step()), torch::kInt64));
        ckpt.tensors.emplace_back(name + ".exp_avg", s.exp_avg().detach().clone());
        ckpt.tensors.emplace_back(name + ".exp_avg_sq", s.exp_avg_sq().detach().clone());
    }
}

void restore_adam_state(const Checkpoint& ckpt, torch::optim::Adam& opt, const std::vector<torch::Tensor>& params,
                        const std::string& prefix)
{
    auto& state = opt.state();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string name = prefix + std::to_string(i);
        const auto* step = ckpt.find(name + ".step");
        if (!step)
            continue;
        const auto* avg = ckpt.find(name + ".exp_avg");
        const auto* avg_sq = ckpt.find(name + ".exp_avg_sq");
        if (!avg || !avg_sq || !avg->sizes().equals(params[i].sizes()) || !avg_sq->sizes().equals(params[i].sizes()))
            throw std::runtime_error("checkpoint optimizer state for " + name + " is incomplete");
        auto s = std::make_unique<torch::optim::AdamParamState>();
        s->step(step->item<int64_t>());
        s->exp_avg(avg->to(params[i].dtype()).clone());
        s->exp_avg_sq(avg_sq->to(params[i].dtype()).clone());
        state[params[i].unsafeGetTensorImpl()] = std::move(s);
    }
}

struct EpochStats {
    double loss = 0.0;
    double distortion = 0.0;
    double rate = 0.0;
    double kept = 0.0;
    int steps = 0;

    void reset() { *this = {}; }
};

MetricsRow base_row(const RunConfig& cfg, const std::string& phase)
{
    MetricsRow row;
    row.run_id = cfg.run_id;
    row.phase = phase;
    row.gamma = cfg.loss.gamma;
    row.lambda = cfg.loss.lambda;
    row.seed = cfg.seed;
    return row;
}

// Locations per sample (1 for vectors) and pixel size for image runs.
struct Geometry {
    int rows = 1;
    int cols = 1;
    int height = 0;
    int width = 0;
};

Geometry geometry(const RunConfig& cfg, const torch::Tensor& inputs)
{
    Geometry g;
    if (cfg.task == Task::Image) {
        g.height = static_cast<int>(inputs.size(2));
        g.width = static_cast<int>(inputs.size(3));
        g.rows = g.height / 16;
        g.cols = g.width / 16;
    }
    return g;
}

}  // namespace

CodecModel::CodecModel(const RunConfig& cfg) : task_(cfg.task)
{
    if (task_ == Task::Vector)
        vector_ = Codec1d(cfg.codec1d);
    else
        image_ = Codec2d(cfg.codec2d);
}

torch::nn::Module& CodecModel::module()
{
    if (task_ == Task::Vector)
        return *vector_;
    return *image_;
}

std::vector<torch::Tensor> CodecModel::parameters() { return module().parameters(); }



Codec1d& CodecModel::vector_codec()
{
    if (task_ != Task::Vector)
        throw std::logic_error("not a vector codec");
    return vector_;
}

Codec2d& CodecModel::image_codec()
{
    if (task_ != Task::Image)
        throw std::logic_error("not an image codec");
    return image_;
}

int CodecModel::symbols() const
{
    return task_ == Task::Vector ? vector_->config().symbols : image_->config().symbols;
}

int CodecModel::levels() const
{
    return task_ == Task::Vector ? vector_->config().levels : image_->config().levels;
}

bool CodecModel::fixed_length() const
{
    return task_ == Task::Vector ? vector_->config().fixed_length() : image_->config().fixed_length();
}

Dataset validation_set(const RunConfig& cfg)
{
    return make_set(cfg, cfg.validation_samples, mix_seed(cfg.test_seed, kValidationStream));
}

Dataset test_set(const RunConfig& cfg) { return make_set(cfg, cfg.eval_samples, cfg.test_seed); }

torch::Tensor training_batch(const RunConfig& cfg, std::int64_t step)
{
    const std::uint64_t seed = mix_seed(mix_seed(cfg.seed, kBatchStream), static_cast<std::uint64_t>(step));
    if (cfg.task == Task::Vector)
        return vectors_to_tensor(gen_vectors(cfg.optimizer.batch_size, cfg.mixture, seed));
    if (cfg.images.source == "folder")
        return folder_batch(cfg, step);
    return procedural_set(cfg, cfg.optimizer.batch_size, seed).inputs;
}

RunConfig checkpoint_config(const Checkpoint& ckpt)
{
    if (!ckpt.metadata.contains("run"))
        throw std::runtime_error("checkpoint carries no run configuration");
    return ckpt.metadata.at("run").get<RunConfig>();
}

Checkpoint make_checkpoint(CodecModel& model, const RunConfig& cfg, std::int64_t step)
{
    Checkpoint ckpt;
    ckpt.step = step;
    ckpt.metadata = {{"task", to_string(cfg.task)}, {"run", cfg}};
    append_module_state(ckpt, model.module(), "codec.");
    return ckpt;
}

CodecModel load_model(const Checkpoint& ckpt)
{
    const RunConfig cfg = checkpoint_config(ckpt);
    CodecModel model(cfg);
    restore_module_state(ckpt, model.module(), "codec.");
    return model;
}

TrainResult train(const RunConfig& cfg, const TrainOptions& opts)
{
    cfg.validate();
    TrainResult result;
    result.output_dir = run_dir(cfg);

    CodecModel model(cfg);
    auto params = model.parameters();
    torch::optim::Adam optimizer(params, torch::optim::AdamOptions(cfg.optimizer.learning_rate));

    const bool adversarial = cfg.task == Task::Vector && cfg.loss.lambda > 0.0;
    torch::nn::Sequential disc{nullptr};
    std::unique_ptr<torch::optim::Adam> disc_opt;
    std::vector<torch::Tensor> disc_params;
    if (adversarial) {
        disc = make_mlp(cfg.codec1d.dim, std::min(cfg.codec1d.hidden, 256), 1, 3);
        init_weights(*disc, mix_seed(cfg.seed, kDiscStream));
        disc_params = disc->parameters();
        disc_opt = std::make_unique<torch::optim::Adam>(disc_params,
                                                        torch::optim::AdamOptions(cfg.optimizer.learning_rate));
    }
    PerceptualExtractor extractor{nullptr};
    if (cfg.task == Task::Image && cfg.loss.lambda > 0.0)
        extractor = PerceptualExtractor();

    double best_distortion = std::numeric_limits<double>::infinity();
    std::int64_t step = 0;
    std::optional<Checkpoint> resumed_best;
    if (opts.resume) {
        Checkpoint ckpt = load_checkpoint(*opts.resume);
        const RunConfig saved = checkpoint_config(ckpt);
        if (saved.task != cfg.task || nlohmann::json(saved.codec1d) != nlohmann::json(cfg.codec1d) ||
            nlohmann::json(saved.codec2d) != nlohmann::json(cfg.codec2d))
            throw std::runtime_error("checkpoint " + opts.resume->string() + " does not match the run's codec");
        restore_module_state(ckpt, model.module(), "codec.");
        restore_adam_state(ckpt, optimizer, params, "opt.codec.");
        if (adversarial) {
            restore_module_state(ckpt, *disc, "disc.");
            restore_adam_state(ckpt, *disc_opt, disc_params, "opt.disc.");
        }
        step = ckpt.step;
        best_distortion = ckpt.metadata.value("best_distortion", best_distortion);
        const fs::path best_path = opts.resume->parent_path() / "best.ckpt";
        if (fs::exists(best_path))
            resumed_best = load_checkpoint(best_path);
    }
    result.first_step = step;

    std::optional<MetricsWriter> writer;
    if (opts.write_outputs) {
        fs::create_directories(result.output_dir);
        const fs::path csv = result.output_dir / "metrics.csv";
        if (!opts.resume)
            fs::remove(csv);
        writer.emplace(csv);
    }
    auto log_row = [&](const MetricsRow& row) {
        result.log.append(row);
        if (writer)
            writer->write(row);
    };

    auto snapshot = [&](int epoch) {
        Checkpoint ckpt = make_checkpoint(model, cfg, step);
        ckpt.metadata["epoch"] = epoch;
        ckpt.metadata["best_distortion"] = best_distortion;
        append_adam_state(ckpt, optimizer, params, "opt.codec.");
        if (adversarial) {
            append_module_state(ckpt, *disc, "disc.");
            append_adam_state(ckpt, *disc_opt, disc_params, "opt.disc.");
        }
        return ckpt;
    };

    const std::int64_t total = static_cast<std::int64_t>(cfg.epochs) * cfg.steps_per_epoch;
    result.last = snapshot(static_cast<int>(step / cfg.steps_per_epoch));
    result.best = resumed_best ? *resumed_best : result.last;
    if (opts.write_outputs && !opts.resume) {
        save_checkpoint(result.output_dir / "last.ckpt", result.last);
        save_checkpoint(result.output_dir / "best.ckpt", result.best);
    }
    if (step >= total)
        return result;

    const Dataset val = validation_set(cfg);
    const Geometry geo = geometry(cfg, val.inputs);
    const double locations = static_cast<double>(geo.rows) * geo.cols;
    const int n_symbols = model.symbols();
    EpochStats stats;

    model.train(true);
    while (step < total) {
        const torch::Tensor x = training_batch(cfg, step);
        const std::uint64_t noise_seed = mix_seed(mix_seed(cfg.seed, kNoiseStream), static_cast<std::uint64_t>(step));
        const SymbolChannel channel = awgn_channel(cfg.train_snr_db, cpu_generator(noise_seed));

        // During warm-up the rate is drawn uniformly per sample or location
        // so the coder learns to work at every length before the rate
        // network starts allocating.
        torch::Tensor rate_override;
        if (step < cfg.optimizer.rate_warmup_steps && !model.fixed_length()) {
            auto gen = cpu_generator(mix_seed(mix_seed(cfg.seed, kWarmupStream), static_cast<std::uint64_t>(step)));
            const auto shape = cfg.task == Task::Vector
                                   ? std::vector<int64_t>{x.size(0)}
                                   : std::vector<int64_t>{x.size(0), x.size(2) / 16, x.size(3) / 16};
            rate_override = torch::rand(shape, gen, x.options());
        }
        // Afterwards a small random shift keeps the coder working at lengths
        // near the ones the rate network picks.
        torch::Tensor rate_offset;
        if (!rate_override.defined() && cfg.optimizer.rate_dither_levels > 0.0 && !model.fixed_length()) {
            auto gen = cpu_generator(mix_seed(mix_seed(cfg.seed, kDitherStream), static_cast<std::uint64_t>(step)));
            const auto shape = cfg.task == Task::Vector
                                   ? std::vector<int64_t>{x.size(0)}
                                   : std::vector<int64_t>{x.size(0), x.size(2) / 16, x.size(3) / 16};
            const int levels = cfg.task == Task::Vector ? cfg.codec1d.levels : cfg.codec2d.levels;
            const double width = cfg.optimizer.rate_dither_levels / (levels - 1);
            rate_offset = (torch::rand(shape, gen, x.options()) * 2.0 - 1.0) * width;
        }
        torch::Tensor recon, rate, mask;
        torch::Tensor rate_term = torch::zeros({}, torch::kFloat32);
        if (cfg.task == Task::Vector) {
            Forward1d out = model.vector_codec()->forward(x, channel, rate_override, rate_offset);
            recon = out.reconstruction;
            mask = out.mask;
            if (out.rate.defined()) {
                rate = out.rate;
                rate_term = rate_loss_1d(out.rate);
            }
        } else {
            Forward2d out = model.image_codec()->forward(x, channel, rate_override, rate_offset);
            recon = out.reconstruction;
            mask = out.mask;
            if (out.rate_map.defined()) {
                rate = out.rate_map;
                rate_term = rate_loss_2d(out.rate_map);
            }
        }
        const torch::Tensor distortion = l2_distortion(recon, x);
        torch::Tensor semantic = torch::zeros({}, torch::kFloat32);
        if (adversarial)
            semantic = lsgan_generator_loss(disc->forward(recon));
        else if (extractor)
            semantic = perceptual_distance(extractor, recon, x);
        const torch::Tensor loss = total_loss(distortion, semantic, rate_term, cfg.loss);

        const double loss_v = loss.item<double>();
        if (!finite(loss_v)) {
            throw TrainingDiverged("non-finite loss at step " + std::to_string(step) + " (distortion " +
                                   format_value(distortion.item<double>()) + ", semantic " +
                                   format_value(semantic.item<double>()) + ", rate " +
                                   format_value(rate_term.item<double>()) + ")");
        }
        optimizer.zero_grad();
        loss.backward();
        optimizer.step();

        if (adversarial) {
            disc_opt->zero_grad();
            const auto d_loss = lsgan_discriminator_loss(disc->forward(x), disc->forward(recon.detach()));
            d_loss.backward();
            disc_opt->step();
        }

        result.step_losses.push_back(loss_v);
        stats.loss += loss_v;
        stats.distortion += distortion.item<double>();
        if (rate.defined())
            stats.rate += rate.mean().item<double>();
        stats.kept += mask.detach().reshape({mask.size(0), -1}).sum(1).mean().item<double>();
        ++stats.steps;
        ++step;

        if (step % cfg.steps_per_epoch != 0 && step != total)
            continue;

        const int epoch = static_cast<int>((step + cfg.steps_per_epoch - 1) / cfg.steps_per_epoch);
        MetricsRow row = base_row(cfg, "train");
        row.epoch = epoch;
        row.step = step;
        row.snr_db = cfg.train_snr_db;
        row.loss = stats.loss / stats.steps;
        row.distortion = stats.distortion / stats.steps;
        if (!model.fixed_length())
            row.mean_rate = stats.rate / stats.steps;
        row.mean_kept_symbols = stats.kept / stats.steps;
        row.mask_density = *row.mean_kept_symbols / (n_symbols * locations);
        if (cfg.task == Task::Image) {
            row.psnr = psnr_from_mse(*row.distortion);
            row.spp = spp(*row.mean_kept_symbols, geo.height, geo.width);
        }
        log_row(row);
        stats.reset();

        const std::array<double, 1> snr{cfg.train_snr_db};
        const std::array<std::uint64_t, 1> seeds{mix_seed(cfg.seed, kValidationStream)};
        EvalResult v = evaluate(model, cfg, val, snr, seeds);
        model.train(true);
        MetricsRow vrow = v.log.rows().front();
        vrow.phase = "val";
        vrow.epoch = epoch;
        vrow.step = step;
        log_row(vrow);

        const double val_distortion = vrow.distortion.value_or(std::numeric_limits<double>::infinity());
        const bool improved = val_distortion < best_distortion;
        if (improved)
            best_distortion = val_distortion;
        result.last = snapshot(epoch);
        if (improved)
            result.best = result.last;
        if (opts.write_outputs) {
            save_checkpoint(result.output_dir / "last.ckpt", result.last);
            if (improved)
                save_checkpoint(result.output_dir / "best.ckpt", result.best);
        }
        if (opts.verbose) {
            std::clog << cfg.run_id << " epoch " << epoch << " step " << step << " loss " << *row.loss
                      << " val distortion " << val_distortion << " kept " << vrow.mean_kept_symbols.value_or(0.0)
                      << '\n';
        }
    }
    return result;
}

EvalResult evaluate(CodecModel& model, const RunConfig& cfg, const Dataset& data, std::span<const double> snr_list,
                    std::span<const std::uint64_t> seeds)
{
    if (snr_list.empty() || seeds.empty())
        throw std::invalid_argument("evaluation needs at least one SNR and one seed");
    if (model.task() != cfg.task)
        throw std::invalid_argument("checkpoint task differs from the evaluation data");
    if (!data.inputs.defined() || data.inputs.size(0) == 0)
        throw std::invalid_argument("empty evaluation set");

    torch::NoGradGuard no_grad;
    model.train(false);

    const Geometry geo = geometry(cfg, data.inputs);
    const int n_symbols = model.symbols();
    const int levels = model.levels();
    const int64_t count = data.inputs.size(0);
    const int64_t chunk = cfg.task == Task::Vector ? 256 : 16;

    // Encoding does not depend on the link, so frames and rates are computed once.
    std::vector<SymbolFrame> frames;
    double rate_sum = 0.0;
    int64_t rate_count = 0;
    for (int64_t begin = 0; begin < count; begin += chunk) {
        const auto x = data.inputs.slice(0, begin, std::min(count, begin + chunk));
        std::vector<SymbolFrame> part;
        if (cfg.task == Task::Vector) {
            auto& codec = model.vector_codec();
            part = codec->encode(x);
            if (!model.fixed_length()) {
                const auto r = codec->rate(x);
                rate_sum += r.sum().item<double>();
                rate_count += r.numel();
            }
        } else {
            auto& codec = model.image_codec();
            part = codec->encode(x);
            if (!model.fixed_length()) {
                const auto r = codec->rate_map(codec->semantic_encode(x));
                rate_sum += r.sum().item<double>();
                rate_count += r.numel();
            }
        }
        std::move(part.begin(), part.end(), std::back_inserter(frames));
    }

    EvalAccounting base;
    base.height = geo.height;
    base.width = geo.width;
    base.symbols = n_symbols;
    base.levels = levels;
    double kept_sum = 0.0;
    double sidelink_sum = 0.0;
    for (const auto& f : frames) {
        base.kept.push_back(f.kept.size());
        kept_sum += static_cast<double>(f.kept.size());
        if (!f.fixed_length()) {
            base.quant.push_back(f.quant);
            const std::size_t bits = sidelink_encode(f.quant).cost_bits();
            base.sidelink_bits.push_back(bits);
            sidelink_sum += static_cast<double>(bits);
        }
    }
    const double mean_kept = kept_sum / static_cast<double>(count);
    const double locations = static_cast<double>(geo.rows) * geo.cols;

    PerceptualExtractor extractor{nullptr};
    if (cfg.task == Task::Image)
        extractor = PerceptualExtractor();

    EvalResult result;
    for (const double snr : snr_list) {
        for (const std::uint64_t seed : seeds) {
            AwgnChannel link({snr, seed});
            std::vector<SymbolFrame> sent = frames;
            transmit(sent, link);

            double sq_err = 0.0;
            double psnr_sum = 0.0;
            double lpips_sum = 0.0;
            std::vector<JointSet> truth, estimate;
            const bool joints = cfg.task == Task::Vector && data.inputs.size(1) % 3 == 0;
            for (int64_t begin = 0; begin < count; begin += chunk) {
                const int64_t end = std::min(count, begin + chunk);
                const auto x = data.inputs.slice(0, begin, end);
                const std::span<const SymbolFrame> part(sent.data() + begin, static_cast<std::size_t>(end - begin));
                const auto y = cfg.task == Task::Vector ? model.vector_codec()->decode(part)
                                                        : model.image_codec()->decode(part);
                const auto xd = x.to(torch::kFloat64);
                const auto yd = y.to(torch::kFloat64);
                sq_err += (xd - yd).pow(2).sum().item<double>();
                if (cfg.task == Task::Image) {
                    const auto per_image = (xd - yd).pow(2).reshape({end - begin, -1}).mean(1);
                    for (int64_t i = 0; i < end - begin; ++i)
                        psnr_sum += psnr_from_mse(per_image[i].item<double>());
                    lpips_sum += perceptual_distance(extractor, y, x).item<double>() * static_cast<double>(end - begin);
                }
                if (joints) {
                    const auto xf = x.contiguous();
                    const auto yf = y.to(torch::kFloat32).contiguous();
                    const int64_t d = x.size(1);
                    for (int64_t i = 0; i < end - begin; ++i) {
                        truth.push_back(as_joints({xf.data_ptr<float>() + i * d, static_cast<std::size_t>(d)}));
                        estimate.push_back(as_joints({yf.data_ptr<float>() + i * d, static_cast<std::size_t>(d)}));
                    }
                }
            }

            MetricsRow row = base_row(cfg, "eval");
            row.snr_db = snr;
            row.seed = seed;
            row.distortion = sq_err / static_cast<double>(data.inputs.numel());
            if (cfg.task == Task::Image) {
                row.psnr = psnr_sum / static_cast<double>(count);
                row.lpips = lpips_sum / static_cast<double>(count);
                row.spp = spp(mean_kept, geo.height, geo.width);
            }
            if (joints)
                row.mpjpe = mpjpe(truth, estimate);
            if (rate_count > 0)
                row.mean_rate = rate_sum / static_cast<double>(rate_count);
            row.mean_kept_symbols = mean_kept;
            row.mask_density = mean_kept / (n_symbols * locations);
            if (!model.fixed_length()) {
                row.sidelink_bits = sidelink_sum / static_cast<double>(count);
                if (cfg.task == Task::Image)
                    row.sidelink_bpp = sidelink_bpp(geo.height, geo.width, levels);
            }
            result.log.append(row);

            EvalAccounting acc = base;
            acc.snr_db = snr;
            acc.seed = seed;
            result.accounting.push_back(std::move(acc));
        }
    }
    return result;
}

EvalResult evaluate(const Checkpoint& ckpt, const RunConfig& cfg, std::span<const double> snr_list,
                    std::span<const std::uint64_t> seeds)
{
    const RunConfig trained = checkpoint_config(ckpt);
    if (trained.task != cfg.task)
        throw std::invalid_argument("checkpoint was trained for the " + to_string(trained.task) +
                                    " task, evaluation asks for " + to_string(cfg.task));
    if (cfg.task == Task::Vector && cfg.mixture.dim != trained.codec1d.dim)
        throw std::invalid_argument("evaluation source dimension differs from the checkpoint codec");
    CodecModel model = load_model(ckpt);
    // Labels come from the trained run, data from the evaluation config.
    RunConfig labelled = cfg;
    labelled.run_id = trained.run_id;
    labelled.loss = trained.loss;
    labelled.seed = trained.seed;
    labelled.codec1d = trained.codec1d;
    labelled.codec2d = trained.codec2d;
    return evaluate(model, labelled, test_set(cfg), snr_list, seeds);
}

SweepResult sweep(const RunConfig& cfg, SweepAxis axis, std::span<const double> values, const TrainOptions& opts)
{
    if (values.empty())
        throw std::invalid_argument("sweep axis is empty");
    cfg.validate();
    SweepResult result;
    for (const double v : values) {
        RunConfig point = cfg;
        if (axis == SweepAxis::Gamma) {
            point.loss.gamma = v;
            point.run_id = cfg.run_id + "-gamma" + format_value(v);
        } else {
            point.train_snr_db = v;
            point.eval_snr_db = {v};
            point.run_id = cfg.run_id + "-snr" + format_value(v);
        }
        TrainOptions point_opts = opts;
        point_opts.resume.reset();
        TrainResult trained = train(point, point_opts);
        CodecModel model = load_model(trained.last);
        EvalResult eval = evaluate(model, point, test_set(point), point.eval_snr_db, point.eval_seeds);
        if (opts.write_outputs)
            eval.log.write_csv(trained.output_dir / "eval.csv");

        result.log.append(trained.log);
        result.log.append(eval.log);
        result.points.push_back({v, trained.output_dir / "last.ckpt", std::move(eval)});
    }
    if (opts.write_outputs) {
        fs::create_directories(resolve_output_dir(cfg));
        result.log.write_csv(resolve_output_dir(cfg) / (cfg.run_id + "-sweep.csv"));
    }
    return result;
}

double select_gamma(double budget, const MetricsLog& log)
{
    std::map<double, std::pair<double, int>> by_gamma;
    for (const auto& row : log.rows()) {
        if (row.phase != "eval" || !row.mean_kept_symbols)
            continue;
        auto& [sum, n] = by_gamma[row.gamma];
        sum += *row.mean_kept_symbols;
        ++n;
    }
    if (by_gamma.empty())
        throw std::runtime_error("sweep log has no evaluation rows");
    std::optional<std::pair<double, double>> best;  // (mean symbols, gamma)
    for (const auto& [gamma, acc] : by_gamma) {
        const double mean = acc.first / acc.second;
        if (mean <= budget && (!best || mean > best->first))
            best = std::make_pair(mean, gamma);
    }
    if (!best)
        throw std::runtime_error("no sweep point stays within the budget of " + format_value(budget) + " symbols");
    return best->second;
}

BaselineResult fixed_length_baseline(const RunConfig& cfg, int n_symbols, const TrainOptions& opts)
{
    RunConfig fixed = cfg;
    const int n_max = cfg.task == Task::Vector ? cfg.codec1d.symbols : cfg.codec2d.symbols;
    if (n_symbols < 1 || n_symbols > n_max)
        throw std::invalid_argument("fixed-length baseline needs 1 <= n_symbols <= " + std::to_string(n_max));
    if (cfg.task == Task::Vector)
        fixed.codec1d.fixed_symbols = n_symbols;
    else
        fixed.codec2d.fixed_symbols = n_symbols;
    fixed.loss.gamma = 0.0;
    fixed.run_id = cfg.run_id + "-fixed" + std::to_string(n_symbols);

    BaselineResult result;
    result.training = train(fixed, opts);
    CodecModel model = load_model(result.training.last);
    result.eval = evaluate(model, fixed, test_set(fixed), fixed.eval_snr_db, fixed.eval_seeds);
    if (opts.write_outputs)
        result.eval.log.write_csv(result.training.output_dir / "eval.csv");
    return result;
}

RateContrast rate_contrast(CodecModel& model, const Dataset& data)
{
    if (model.task() != Task::Image || model.fixed_length())
        throw std::invalid_argument("rate maps exist only for variable-length image codecs");
    if (!data.inputs.defined() || data.textured.size() != static_cast<std::size_t>(data.inputs.size(0)))
        throw std::invalid_argument("rate contrast needs an annotation per image");
    torch::NoGradGuard no_grad;
    model.train(false);
    auto& codec = model.image_codec();
    const int64_t h = data.inputs.size(2);
    const int64_t w = data.inputs.size(3);
    RateContrast out;
    double sum_t = 0.0;
    double sum_f = 0.0;
    for (int64_t begin = 0; begin < data.inputs.size(0); begin += 16) {
        const int64_t end = std::min<int64_t>(begin + 16, data.inputs.size(0));
        const auto maps =
            codec->rate_map(codec->semantic_encode(data.inputs.slice(0, begin, end))).to(torch::kFloat64).contiguous();
        const auto acc = maps.accessor<double, 3>();
        for (int64_t k = begin; k < end; ++k) {
            const auto& region = data.textured[static_cast<std::size_t>(k)];
            for (int64_t by = 0; by < h / 16; ++by)
                for (int64_t bx = 0; bx < w / 16; ++bx) {
                    int64_t count = 0;
                    for (int64_t y = by * 16; y < by * 16 + 16; ++y)
                        for (int64_t x = bx * 16; x < bx * 16 + 16; ++x)
                            count += region[static_cast<std::size_t>(y * w + x)] != 0;
                    const double r = acc[k - begin][by][bx];
                    if (count == 256) {
                        sum_t += r;
                        ++out.textured_cells;
                    } else if (count == 0) {
                        sum_f += r;
                        ++out.flat_cells;
                    }
                }
        }
    }
    if (out.textured_cells == 0 || out.flat_cells == 0)
        throw std::invalid_argument("rate contrast needs both fully textured and fully flat blocks");
    out.textured = sum_t / static_cast<double>(out.textured_cells);
    out.flat = sum_f / static_cast<double>(out.flat_cells);
    return out;
}

std::pair<int, int> export_rate_maps(CodecModel& model, const RunConfig& cfg, int count, const fs::path& path)
{
    if (model.task() != Task::Image || model.fixed_length())
        throw std::invalid_argument("rate maps exist only for variable-length image codecs");
    if (count < 1)
        throw std::invalid_argument("export needs at least one image");
    RunConfig small = cfg;
    small.eval_samples = count;
    const Dataset data = test_set(small);
    torch::NoGradGuard no_grad;
    model.train(false);
    auto& codec = model.image_codec();
    const auto maps = codec->rate_map(codec->semantic_encode(data.inputs)).to(torch::kFloat32).contiguous();

    const int n = static_cast<int>(maps.size(0));
    const int h = static_cast<int>(maps.size(1)) * 16;
    const int w = static_cast<int>(maps.size(2)) * 16;
    const int grid_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const int grid_rows = (n + grid_cols - 1) / grid_cols;
    constexpr int gap = 2;
    const int out_h = grid_rows * h + (grid_rows - 1) * gap;
    const int out_w = grid_cols * w + (grid_cols - 1) * gap;
    std::vector<float> gray(static_cast<std::size_t>(out_h) * out_w, 1.0f);
    const auto acc = maps.accessor<float, 3>();
    for (int k = 0; k < n; ++k) {
        const int top = (k / grid_cols) * (h + gap);
        const int left = (k % grid_cols) * (w + gap);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                gray[static_cast<std::size_t>(top + y) * out_w + left + x] = acc[k][y / 16][x / 16];
    }
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    write_pgm(path, out_h, out_w, gray);
    return {grid_rows, grid_cols};
}

}  // namespace vlscc
