#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "sradapt/networks.hpp"

namespace sradapt {

struct TrainConfig {
    int stage = 1;
    int epochs = 200;
    int batch_size = 16;  // "4x4" blocks per step
    double lr = 1e-4;
    double lr_decay_factor = 0.1;
    int lr_decay_every = 100;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int block_size = 96;
    std::uint64_t seed = 0;

    // Scale knobs.
    int num_residual_blocks = 16;
    int channels = 64;
    int blocks_per_band = 1024;     // training pairs drawn from the band's frames
    int disc_base_channels = 64;    // stage widths are 1,2,2,4,4,8,8 x this
    int disc_dense_width = 1024;
    bool augment = true;

    void validate() const;
    // Learning rate in effect during `epoch` (0-based); changes only at epoch boundaries.
    double lr_at_epoch(int epoch) const;

    GeneratorConfig generator_config() const;
    DiscriminatorConfig discriminator_config() const;
};

// Flat "key = value" text; '#' starts a comment. Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin);
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

// Applies recognized keys; any unknown key or malformed value throws.
void apply_train_config(const std::map<std::string, std::string>& values, TrainConfig& config);
std::string format_train_config(const TrainConfig& config);

}  // namespace sradapt
