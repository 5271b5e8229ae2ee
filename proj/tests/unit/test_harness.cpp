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
#include "vlscc/metrics.hpp"
#include "vlscc/sidelink.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace vlscc {
namespace {

namespace fs = std::filesystem;

RunConfig tiny_vector(const std::string& name)
{
    RunConfig cfg;
    cfg.run_id = name;
    cfg.task = Task::Vector;
    cfg.mixture.dim = 8;
    cfg.mixture.components = {{0.5, 2, 0.0}, {0.5, 8, 0.0}};
    cfg.codec1d.dim = 8;
    cfg.codec1d.symbols = 12;
    cfg.codec1d.levels = 8;
    cfg.codec1d.hidden = 16;
    cfg.codec1d.encoder_layers = 2;
    cfg.codec1d.decoder_layers = 2;
    cfg.codec1d.rate_layers = 2;
    cfg.optimizer = {1e-3, 16};
    cfg.epochs = 2;
    cfg.steps_per_epoch = 5;
    cfg.validation_samples = 32;
    cfg.eval_samples = 64;
    cfg.loss.gamma = 0.05;
    cfg.output_dir = (fs::temp_directory_path() / "vlscc_harness").string();
    return cfg;
}

RunConfig tiny_image(const std::string& name)
{
    RunConfig cfg = tiny_vector(name);
    cfg.task = Task::Image;
    cfg.codec2d = {8, 8, 8, 8, 16, 3, std::nullopt};
    cfg.images.height = 32;
    cfg.images.width = 32;
    cfg.optimizer.batch_size = 4;
    cfg.steps_per_epoch = 2;
    cfg.epochs = 1;
    cfg.validation_samples = 4;
    cfg.eval_samples = 6;
    return cfg;
}

std::size_t line_count(const fs::path& p)
{
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        ++n;
    return n;
}

TEST(Train, ZeroEpochsWritesInitialCheckpointAndHeader)
{
    RunConfig cfg = tiny_vector("zero");
    cfg.epochs = 0;
    const TrainResult r = train(cfg);
    EXPECT_EQ(r.log.size(), 0u);
    EXPECT_TRUE(r.step_losses.empty());
    EXPECT_EQ(line_count(r.output_dir / "metrics.csv"), 1u);
    const Checkpoint ckpt = load_checkpoint(r.output_dir / "last.ckpt");
    EXPECT_EQ(ckpt.step, 0);
    CodecModel fresh(cfg);
    CodecModel loaded = load_model(ckpt);
    const auto a = fresh.parameters();
    const auto b = loaded.parameters();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_TRUE(torch::equal(a[i], b[i]));
}

TEST(Train, RowsPerEpochAndDeterminism)
{
    const RunConfig cfg = tiny_vector("det");
    const TrainResult a = train(cfg);
    const TrainResult b = train(cfg);
    ASSERT_EQ(a.log.size(), 4u);  // train + val per epoch
    EXPECT_EQ(a.log.rows()[0].phase, "train");
    EXPECT_EQ(a.log.rows()[1].phase, "val");
    EXPECT_EQ(a.log.rows(), b.log.rows());
    EXPECT_EQ(a.step_losses, b.step_losses);
    EXPECT_EQ(MetricsLog::read_csv(a.output_dir / "metrics.csv").rows(), a.log.rows());
    EXPECT_TRUE(fs::exists(a.output_dir / "best.ckpt"));
}

TEST(Train, ResumeReproducesUninterruptedRun)
{
    RunConfig full = tiny_vector("resume-full");
    full.loss.lambda = 0.1;  // include the discriminator state
    full.optimizer.rate_warmup_steps = 3;  // resume crosses the end of warm-up
    full.optimizer.rate_dither_levels = 1.5;
    const TrainResult a = train(full);

    RunConfig half = full;
    half.run_id = "resume-half";
    half.epochs = 1;
    const TrainResult b = train(half);

    RunConfig rest = full;
    rest.run_id = "resume-half";
    TrainOptions opts;
    opts.resume = b.output_dir / "last.ckpt";
    const TrainResult c = train(rest, opts);
    EXPECT_EQ(c.first_step, 5);
    ASSERT_EQ(c.step_losses.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i)
        EXPECT_EQ(c.step_losses[i], a.step_losses[5 + i]) << i;
    // The appended CSV now holds both epochs.
    EXPECT_EQ(MetricsLog::read_csv(c.output_dir / "metrics.csv").size(), 4u);
}

TEST(Train, ResumeRejectsOtherCodec)
{
    RunConfig cfg = tiny_vector("resume-mismatch");
    cfg.epochs = 1;
    const TrainResult r = train(cfg);
    RunConfig other = cfg;
    other.codec1d.hidden = 20;
    TrainOptions opts;
    opts.resume = r.output_dir / "last.ckpt";
    EXPECT_THROW(train(other, opts), std::runtime_error);
}

TEST(Train, DivergenceAborts)
{
    RunConfig cfg = tiny_vector("diverge");
    cfg.optimizer.learning_rate = 1e30;
    cfg.epochs = 3;
    EXPECT_THROW(train(cfg), TrainingDiverged);
}

TEST(Evaluate, RowAccountingAndRepeatability)
{
    RunConfig cfg = tiny_vector("eval");
    cfg.epochs = 1;
    const TrainResult r = train(cfg);
    const std::vector<double> snrs{-10, 0, 5, 10};
    const std::vector<std::uint64_t> seeds{1, 2};
    const EvalResult e1 = evaluate(r.last, cfg, snrs, seeds);
    const EvalResult e2 = evaluate(r.last, cfg, snrs, seeds);
    ASSERT_EQ(e1.log.size(), 8u);
    EXPECT_EQ(e1.log.rows(), e2.log.rows());
    for (std::size_t i = 0; i < e1.log.size(); ++i) {
        const auto& row = e1.log.rows()[i];
        const auto& acc = e1.accounting[i];
        double kept = 0.0, bits = 0.0;
        for (std::size_t s = 0; s < acc.kept.size(); ++s) {
            EXPECT_EQ(acc.kept[s], kept_symbols(acc.quant[s], acc.symbols));
            EXPECT_EQ(acc.sidelink_bits[s], sidelink_encode(acc.quant[s]).cost_bits());
            kept += static_cast<double>(acc.kept[s]);
            bits += static_cast<double>(acc.sidelink_bits[s]);
        }
        EXPECT_EQ(*row.mean_kept_symbols, kept / static_cast<double>(acc.kept.size()));
        EXPECT_EQ(*row.sidelink_bits, bits / static_cast<double>(acc.kept.size()));
        EXPECT_FALSE(row.spp.has_value());
    }
    // Lower SNR hurts.
    EXPECT_GT(*e1.log.rows()[0].distortion, *e1.log.rows()[7].distortion);

    RunConfig image = tiny_image("eval-mismatch");
    EXPECT_THROW(evaluate(r.last, image, snrs, seeds), std::invalid_argument);
}

TEST(Sweep, EmptyAxisFails)
{
    EXPECT_THROW(sweep(tiny_vector("sweep-empty"), SweepAxis::Gamma, std::vector<double>{}), std::invalid_argument);
}

TEST(Sweep, ThreeGammasGiveThreeCheckpoints)
{
    RunConfig cfg = tiny_vector("sweep");
    cfg.epochs = 1;
    const std::vector<double> gammas{0.0, 0.1, 0.5};
    const SweepResult s = sweep(cfg, SweepAxis::Gamma, gammas);
    ASSERT_EQ(s.points.size(), 3u);
    for (const auto& p : s.points)
        EXPECT_TRUE(fs::exists(p.checkpoint));
    EXPECT_EQ(s.log.size(), 3u * (2u + 1u));
    EXPECT_TRUE(fs::exists(resolve_output_dir(cfg) / "sweep-sweep.csv"));
    EXPECT_NO_THROW(select_gamma(1e9, s.log));
}

MetricsLog sweep_log(std::initializer_list<std::pair<double, double>> points)
{
    MetricsLog log;
    for (const auto& [gamma, symbols] : points) {
        MetricsRow row;
        row.run_id = "x";
        row.phase = "eval";
        row.gamma = gamma;
        row.mean_kept_symbols = symbols;
        log.append(row);
        row.phase = "train";  // ignored by the selection
        row.mean_kept_symbols = 1.0;
        log.append(row);
    }
    return log;
}

TEST(SelectGamma, Rule)
{
    EXPECT_EQ(select_gamma(2000, sweep_log({{0.01, 2300}, {0.05, 1800}, {0.1, 1200}})), 0.05);
    EXPECT_THROW(select_gamma(1000, sweep_log({{0.01, 2300}, {0.05, 1800}, {0.1, 1200}})), std::runtime_error);
    EXPECT_EQ(select_gamma(2000, sweep_log({{0.3, 1500}})), 0.3);
    EXPECT_EQ(select_gamma(2000, sweep_log({{0.01, 2000}, {0.02, 1990}})), 0.01);  // budget is inclusive
    EXPECT_THROW(select_gamma(2000, MetricsLog{}), std::runtime_error);
}

TEST(Baseline, ConstantDensity)
{
    RunConfig cfg = tiny_vector("base");
    cfg.epochs = 1;
    const BaselineResult b = fixed_length_baseline(cfg, 6);
    for (const auto& row : b.eval.log.rows()) {
        EXPECT_EQ(*row.mask_density, 0.5);
        EXPECT_EQ(*row.mean_kept_symbols, 6.0);
        EXPECT_FALSE(row.mean_rate.has_value());
        EXPECT_FALSE(row.sidelink_bits.has_value());
    }
    EXPECT_THROW(fixed_length_baseline(cfg, 13), std::invalid_argument);
    EXPECT_THROW(fixed_length_baseline(cfg, 0), std::invalid_argument);
}

TEST(ImageRun, TrainEvaluateExport)
{
    const RunConfig cfg = tiny_image("image");
    const TrainResult r = train(cfg);
    ASSERT_EQ(r.log.size(), 2u);
    const std::vector<double> snrs{10};
    const std::vector<std::uint64_t> seeds{4};
    const EvalResult e = evaluate(r.last, cfg, snrs, seeds);
    const auto& row = e.log.rows().front();
    const auto& acc = e.accounting.front();
    ASSERT_EQ(acc.quant.size(), 6u);
    EXPECT_EQ(acc.quant[0].rows, 2);
    double kept = 0.0;
    for (const auto& q : acc.quant)
        kept += static_cast<double>(kept_symbols(q, 8));
    EXPECT_EQ(*row.spp, spp(kept / 6.0, 32, 32));
    EXPECT_EQ(*row.sidelink_bpp, sidelink_bpp(32, 32, 16));
    EXPECT_TRUE(row.psnr.has_value());
    EXPECT_TRUE(row.lpips.has_value());
    EXPECT_DOUBLE_EQ(*row.mask_density, mask_density(acc.quant, 8));

    CodecModel model = load_model(r.last);
    const auto grid = resolve_output_dir(cfg) / "maps.pgm";
    const auto [rows, cols] = export_rate_maps(model, cfg, 5, grid);
    EXPECT_EQ(rows, 2);
    EXPECT_EQ(cols, 3);
    const Image back = read_image(grid);
    EXPECT_EQ(back.height, 2 * 32 + 2);
    EXPECT_EQ(back.width, 3 * 32 + 2 * 2);
}

}  // namespace
}  // namespace vlscc
