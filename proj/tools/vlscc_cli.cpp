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

// Command-line front end: train, eval, sweep, baseline, select-gamma, export.

#include "vlscc/checkpoint.hpp"
#include "vlscc/config.hpp"
#include "vlscc/harness.hpp"
#include "vlscc/metrics_log.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace vlscc;
namespace fs = std::filesystem;

// Command-line values that override fields of the configuration file.
struct Overrides {
    std::string config;
    std::optional<std::string> run_id;
    std::optional<std::string> task;
    std::optional<std::string> output_dir;
    std::optional<int> epochs;
    std::optional<int> steps_per_epoch;
    std::optional<int> batch_size;
    std::optional<double> learning_rate;
    std::optional<double> gamma;
    std::optional<double> lambda;
    std::optional<double> train_snr;
    std::vector<double> eval_snr;
    std::optional<std::uint64_t> seed;
    std::vector<std::uint64_t> eval_seeds;
    std::optional<double> budget;
    std::optional<int> eval_samples;
};

void add_run_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("-c,--config", o.config, "JSON run configuration (comments allowed)");
    cmd->add_option("--run-id", o.run_id);
    cmd->add_option("--task", o.task, "vector | image");
    cmd->add_option("--output-dir", o.output_dir);
    cmd->add_option("--epochs", o.epochs);
    cmd->add_option("--steps-per-epoch", o.steps_per_epoch);
    cmd->add_option("--batch-size", o.batch_size);
    cmd->add_option("--lr", o.learning_rate);
    cmd->add_option("--gamma", o.gamma);
    cmd->add_option("--lambda", o.lambda);
    cmd->add_option("--train-snr", o.train_snr, "training SNR in dB");
    cmd->add_option("--eval-snr", o.eval_snr, "evaluation SNRs in dB");
    cmd->add_option("--seed", o.seed);
    cmd->add_option("--eval-seeds", o.eval_seeds);
    cmd->add_option("--budget", o.budget, "mean real symbols per sample");
    cmd->add_option("--eval-samples", o.eval_samples);
}

RunConfig apply(RunConfig cfg, const Overrides& o)
{
    if (o.run_id) cfg.run_id = *o.run_id;
    if (o.task) cfg.task = parse_task(*o.task);
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.epochs) cfg.epochs = *o.epochs;
    if (o.steps_per_epoch) cfg.steps_per_epoch = *o.steps_per_epoch;
    if (o.batch_size) cfg.optimizer.batch_size = *o.batch_size;
    if (o.learning_rate) cfg.optimizer.learning_rate = *o.learning_rate;
    if (o.gamma) cfg.loss.gamma = *o.gamma;
    if (o.lambda) cfg.loss.lambda = *o.lambda;
    if (o.train_snr) cfg.train_snr_db = *o.train_snr;
    if (!o.eval_snr.empty()) cfg.eval_snr_db = o.eval_snr;
    if (o.seed) cfg.seed = *o.seed;
    if (!o.eval_seeds.empty()) cfg.eval_seeds = o.eval_seeds;
    if (o.budget) cfg.budget = *o.budget;
    if (o.eval_samples) cfg.eval_samples = *o.eval_samples;
    cfg.validate();
    return cfg;
}

RunConfig resolve(const Overrides& o) { return apply(o.config.empty() ? RunConfig{} : load_run_config(o.config), o); }

void print_log(const MetricsLog& log)
{
    std::cout << kMetricsHeader << '\n';
    for (const auto& row : log.rows())
        std::cout << format_row(row) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Variable-length semantic-channel coding: training and evaluation harness"};
    app.require_subcommand(1);

    Overrides train_o, eval_o, sweep_o, base_o, export_o;
    std::string resume;
    bool verbose = false;
    auto* train_cmd = app.add_subcommand("train", "Train a codec and write checkpoints plus metrics.csv");
    add_run_flags(train_cmd, train_o);
    train_cmd->add_option("--resume", resume, "continue from a checkpoint");
    train_cmd->add_flag("-v,--verbose", verbose);

    std::string checkpoint, eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint over SNRs and seeds");
    add_run_flags(eval_cmd, eval_o);
    eval_cmd->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("-o,--out", eval_out, "write rows to this CSV instead of stdout");

    std::string axis = "gamma";
    std::vector<double> values;
    auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate once per axis value");
    add_run_flags(sweep_cmd, sweep_o);
    sweep_cmd->add_option("--axis", axis)->check(CLI::IsMember({"gamma", "snr"}));
    sweep_cmd->add_option("--values", values)->required();
    sweep_cmd->add_flag("-v,--verbose", verbose);

    int n_symbols = 0;
    auto* base_cmd = app.add_subcommand("baseline", "Train the fixed-length codec with n symbols");
    add_run_flags(base_cmd, base_o);
    base_cmd->add_option("--symbols", n_symbols)->required();
    base_cmd->add_flag("-v,--verbose", verbose);

    std::string sweep_log;
    double budget = 0.0;
    auto* select_cmd = app.add_subcommand("select-gamma", "Pick the gamma that fits a symbol budget");
    select_cmd->add_option("--log", sweep_log, "sweep CSV")->required()->check(CLI::ExistingFile);
    select_cmd->add_option("--budget", budget)->required();

    std::string grid_path = "rate_maps.pgm";
    int count = 16;
    auto* export_cmd = app.add_subcommand("export", "Write rate maps of test images as a PGM grid");
    add_run_flags(export_cmd, export_o);
    export_cmd->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
    export_cmd->add_option("--count", count);
    export_cmd->add_option("-o,--out", grid_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            const RunConfig cfg = resolve(train_o);
            TrainOptions opts;
            opts.verbose = verbose;
            if (!resume.empty())
                opts.resume = fs::path(resume);
            const TrainResult r = train(cfg, opts);
            std::cout << "checkpoints in " << r.output_dir.string() << '\n';
        } else if (*eval_cmd) {
            const Checkpoint ckpt = load_checkpoint(checkpoint);
            // Without a config file the checkpoint's own run describes the data.
            const RunConfig cfg =
                apply(eval_o.config.empty() ? checkpoint_config(ckpt) : load_run_config(eval_o.config), eval_o);
            const EvalResult r = evaluate(ckpt, cfg, cfg.eval_snr_db, cfg.eval_seeds);
            if (eval_out.empty())
                print_log(r.log);
            else
                r.log.write_csv(eval_out);
        } else if (*sweep_cmd) {
            const RunConfig cfg = resolve(sweep_o);
            TrainOptions opts;
            opts.verbose = verbose;
            const SweepResult r = sweep(cfg, axis == "gamma" ? SweepAxis::Gamma : SweepAxis::Snr, values, opts);
            std::cout << "merged log: " << (resolve_output_dir(cfg) / (cfg.run_id + "-sweep.csv")).string() << '\n';
            if (axis == "gamma" && cfg.budget)
                std::cout << "gamma within budget: " << select_gamma(*cfg.budget, r.log) << '\n';
        } else if (*base_cmd) {
            const RunConfig cfg = resolve(base_o);
            TrainOptions opts;
            opts.verbose = verbose;
            const BaselineResult r = fixed_length_baseline(cfg, n_symbols, opts);
            print_log(r.eval.log);
        } else if (*select_cmd) {
            std::cout << select_gamma(budget, MetricsLog::read_csv(sweep_log)) << '\n';
        } else if (*export_cmd) {
            const Checkpoint ckpt = load_checkpoint(checkpoint);
            const RunConfig cfg =
                apply(export_o.config.empty() ? checkpoint_config(ckpt) : load_run_config(export_o.config), export_o);
            CodecModel model = load_model(ckpt);
            const auto [rows, cols] = export_rate_maps(model, cfg, count, grid_path);
            std::cout << "wrote " << rows << "x" << cols << " grid to " << grid_path << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
