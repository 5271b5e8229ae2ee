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

#include "vlscc/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace vlscc {

using nlohmann::json;

std::string to_string(Task task) { return task == Task::Vector ? "vector" : "image"; }

Task parse_task(const std::string& name)
{
    if (name == "vector")
        return Task::Vector;
    if (name == "image")
        return Task::Image;
    throw std::invalid_argument("unknown task '" + name + "' (expected vector or image)");
}

namespace {

// Reads j[key] into out when present; unknown keys are rejected by the caller.
template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end())
        it->get_to(out);
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where)
{
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw std::invalid_argument(std::string("unknown key '") + key + "' in " + where);
    }
}

}  // namespace

void to_json(json& j, const Codec1dConfig& c)
{
    j = json{{"dim", c.dim},
             {"symbols", c.symbols},
             {"levels", c.levels},
             {"hidden", c.hidden},
             {"encoder_layers", c.encoder_layers},
             {"decoder_layers", c.decoder_layers},
             {"rate_layers", c.rate_layers},
             {"seed", c.seed}};
    j["fixed_symbols"] = c.fixed_symbols ? json(*c.fixed_symbols) : json(nullptr);
}

void from_json(const json& j, Codec1dConfig& c)
{
    reject_unknown(j, {"dim", "symbols", "levels", "hidden", "encoder_layers", "decoder_layers", "rate_layers", "seed",
                       "fixed_symbols"},
                   "codec1d");
    read(j, "dim", c.dim);
    read(j, "symbols", c.symbols);
    read(j, "levels", c.levels);
    read(j, "hidden", c.hidden);
    read(j, "encoder_layers", c.encoder_layers);
    read(j, "decoder_layers", c.decoder_layers);
    read(j, "rate_layers", c.rate_layers);
    read(j, "seed", c.seed);
    if (auto it = j.find("fixed_symbols"); it != j.end() && !it->is_null())
        c.fixed_symbols = it->get<int>();
}

void to_json(json& j, const Codec2dConfig& c)
{
    j = json{{"feature_channels", c.feature_channels},
             {"sce_channels", c.sce_channels},
             {"symbols", c.symbols},
             {"rate_channels", c.rate_channels},
             {"levels", c.levels},
             {"seed", c.seed}};
    j["fixed_symbols"] = c.fixed_symbols ? json(*c.fixed_symbols) : json(nullptr);
}

void from_json(const json& j, Codec2dConfig& c)
{
    reject_unknown(j, {"feature_channels", "sce_channels", "symbols", "rate_channels", "levels", "seed", "fixed_symbols"},
                   "codec2d");
    read(j, "feature_channels", c.feature_channels);
    read(j, "sce_channels", c.sce_channels);
    read(j, "symbols", c.symbols);
    read(j, "rate_channels", c.rate_channels);
    read(j, "levels", c.levels);
    read(j, "seed", c.seed);
    if (auto it = j.find("fixed_symbols"); it != j.end() && !it->is_null())
        c.fixed_symbols = it->get<int>();
}

void to_json(json& j, const MixtureSpec& m)
{
    j = json{{"dim", m.dim}, {"basis_seed", m.basis_seed}, {"components", json::array()}};
    for (const auto& c : m.components)
        j["components"].push_back({{"weight", c.weight}, {"intrinsic_dim", c.intrinsic_dim}, {"noise", c.noise}});
}

void from_json(const json& j, MixtureSpec& m)
{
    reject_unknown(j, {"dim", "basis_seed", "components"}, "mixture");
    read(j, "dim", m.dim);
    read(j, "basis_seed", m.basis_seed);
    if (auto it = j.find("components"); it != j.end()) {
        m.components.clear();
        for (const auto& c : *it) {
            reject_unknown(c, {"weight", "intrinsic_dim", "noise"}, "mixture component");
            MixtureComponent comp;
            read(c, "weight", comp.weight);
            read(c, "intrinsic_dim", comp.intrinsic_dim);
            read(c, "noise", comp.noise);
            m.components.push_back(comp);
        }
    }
}

void to_json(json& j, const RunConfig& c)
{
    j = json{{"run_id", c.run_id},
             {"task", to_string(c.task)},
             {"codec1d", c.codec1d},
             {"codec2d", c.codec2d},
             {"mixture", c.mixture},
             {"images",
              {{"source", c.images.source},
               {"folder", c.images.folder},
               {"template", c.images.image_template},
               {"height", c.images.height},
               {"width", c.images.width},
               {"patch_size", c.images.patch_size},
               {"augment", c.images.augment}}},
             {"train_snr_db", c.train_snr_db},
             {"eval_snr_db", c.eval_snr_db},
             {"loss", {{"gamma", c.loss.gamma}, {"lambda", c.loss.lambda}}},
             {"optimizer", {{"learning_rate", c.optimizer.learning_rate}, {"batch_size", c.optimizer.batch_size},
                            {"rate_warmup_steps", c.optimizer.rate_warmup_steps},
                            {"rate_dither_levels", c.optimizer.rate_dither_levels}}},
             {"epochs", c.epochs},
             {"steps_per_epoch", c.steps_per_epoch},
             {"validation_samples", c.validation_samples},
             {"eval_samples", c.eval_samples},
             {"seed", c.seed},
             {"test_seed", c.test_seed},
             {"eval_seeds", c.eval_seeds},
             {"output_dir", c.output_dir}};
    j["budget"] = c.budget ? json(*c.budget) : json(nullptr);
}

void from_json(const json& j, RunConfig& c)
{
    reject_unknown(j, {"run_id", "task", "codec1d", "codec2d", "mixture", "images", "train_snr_db", "eval_snr_db", "loss",
                       "optimizer", "epochs", "steps_per_epoch", "validation_samples", "eval_samples", "budget", "seed",
                       "test_seed", "eval_seeds", "output_dir"},
                   "run config");
    read(j, "run_id", c.run_id);
    if (auto it = j.find("task"); it != j.end())
        c.task = parse_task(it->get<std::string>());
    read(j, "codec1d", c.codec1d);
    read(j, "codec2d", c.codec2d);
    read(j, "mixture", c.mixture);
    if (auto it = j.find("images"); it != j.end()) {
        reject_unknown(*it, {"source", "folder", "template", "height", "width", "patch_size", "augment"}, "images");
        read(*it, "source", c.images.source);
        read(*it, "folder", c.images.folder);
        read(*it, "template", c.images.image_template);
        read(*it, "height", c.images.height);
        read(*it, "width", c.images.width);
        read(*it, "patch_size", c.images.patch_size);
        read(*it, "augment", c.images.augment);
    }
    read(j, "train_snr_db", c.train_snr_db);
    read(j, "eval_snr_db", c.eval_snr_db);
    if (auto it = j.find("loss"); it != j.end()) {
        reject_unknown(*it, {"gamma", "lambda"}, "loss");
        read(*it, "gamma", c.loss.gamma);
        read(*it, "lambda", c.loss.lambda);
    }
    if (auto it = j.find("optimizer"); it != j.end()) {
        reject_unknown(*it, {"learning_rate", "batch_size", "rate_warmup_steps", "rate_dither_levels"},
                       "optimizer");
        read(*it, "learning_rate", c.optimizer.learning_rate);
        read(*it, "batch_size", c.optimizer.batch_size);
        read(*it, "rate_warmup_steps", c.optimizer.rate_warmup_steps);
        read(*it, "rate_dither_levels", c.optimizer.rate_dither_levels);
    }
    read(j, "epochs", c.epochs);
    read(j, "steps_per_epoch", c.steps_per_epoch);
    read(j, "validation_samples", c.validation_samples);
    read(j, "eval_samples", c.eval_samples);
    if (auto it = j.find("budget"); it != j.end() && !it->is_null())
        c.budget = it->get<double>();
    read(j, "seed", c.seed);
    read(j, "test_seed", c.test_seed);
    read(j, "eval_seeds", c.eval_seeds);
    read(j, "output_dir", c.output_dir);
}

void RunConfig::validate() const
{
    if (run_id.empty())
        throw std::invalid_argument("run_id must not be empty");
    loss.validate();
    if (epochs < 0 || steps_per_epoch < 1)
        throw std::invalid_argument("epochs must be >= 0 and steps_per_epoch >= 1");
    if (optimizer.batch_size < 1 || !(optimizer.learning_rate > 0.0))
        throw std::invalid_argument("optimizer needs a positive batch size and learning rate");
    if (optimizer.rate_warmup_steps < 0)
        throw std::invalid_argument("rate_warmup_steps must be >= 0");
    if (!(optimizer.rate_dither_levels >= 0.0))
        throw std::invalid_argument("rate_dither_levels must be >= 0");
    if (validation_samples < 1 || eval_samples < 1)
        throw std::invalid_argument("validation and evaluation sample counts must be positive");
    if (eval_snr_db.empty() || eval_seeds.empty())
        throw std::invalid_argument("evaluation needs at least one SNR and one seed");
    if (budget && !(*budget > 0.0))
        throw std::invalid_argument("symbol budget must be positive");
    if (task == Task::Vector) {
        codec1d.validate();
        mixture.validate();
        if (mixture.dim != codec1d.dim)
            throw std::invalid_argument("mixture dimension differs from codec dimension");
    } else {
        codec2d.validate();
        if (images.source == "procedural") {
            if (!parse_image_template(images.image_template))
                throw std::invalid_argument("unknown image template '" + images.image_template + "'");
            if (images.height <= 0 || images.width <= 0 || images.height % 16 || images.width % 16)
                throw std::invalid_argument("procedural image size must be a positive multiple of 16");
        } else if (images.source == "folder") {
            if (images.folder.empty())
                throw std::invalid_argument("folder image source needs a folder path");
            if (images.patch_size <= 0 || images.patch_size % 16)
                throw std::invalid_argument("patch size must be a positive multiple of 16");
        } else {
            throw std::invalid_argument("unknown image source '" + images.source + "'");
        }
    }
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config " + path.string());
    RunConfig cfg = json::parse(in, nullptr, true, /*ignore_comments=*/true).get<RunConfig>();
    cfg.validate();
    return cfg;
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg)
{
    std::filesystem::path dir(cfg.output_dir);
    if (dir.is_absolute())
        return dir;
    if (const char* root = std::getenv(kOutputRootEnv); root && *root)
        return std::filesystem::path(root) / dir;
    return dir;
}

}  // namespace vlscc
