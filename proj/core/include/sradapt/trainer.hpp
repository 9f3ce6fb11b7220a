#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sradapt/config.hpp"
#include "sradapt/dataset.hpp"
#include "sradapt/networks.hpp"

namespace sradapt {

// One line-oriented "key=value key=value ..." log line.
struct LogRecord {
    std::vector<std::pair<std::string, std::string>> fields;
    void add(const std::string& key, const std::string& value) { fields.emplace_back(key, value); }
    void add(const std::string& key, double value);
    void add(const std::string& key, long long value);
    std::string str() const;
};

struct StepRecord {
    int epoch = 0;
    int step = 0;  // global, 0-based
    double lr = 0.0;
    std::vector<std::pair<std::string, double>> values;  // e.g. loss, l1, ssim, adversarial, d_loss
    double value(const std::string& key) const;
};

struct TrainResult {
    ModelBundle bundle;
    std::vector<LogRecord> epoch_log;
    std::vector<StepRecord> steps;
    // Stage 1: ms_ssim_loss averaged over the whole pool before and after
    // training. Stage 2: generator_total_loss averaged over the first and the
    // last epoch.
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

// Generator seed, discriminator seed and data seed all derive from config.seed.
std::uint64_t generator_seed(const TrainConfig& config, int band);
std::uint64_t discriminator_seed(const TrainConfig& config, int band);
std::uint64_t data_seed(const TrainConfig& config, int band);

// Mean ms_ssim_loss of the generator over the pool, without recording.
double pool_ms_ssim_loss(const Generator& generator, const std::vector<BlockPair>& pool, int batch_size);

// Generator-only training on MS-SSIM. Starts from `init` when given.
TrainResult train_stage1(const std::vector<BlockPair>& pool, int band, const TrainConfig& config,
                         const Generator* init = nullptr);
TrainResult train_stage1(const DatasetManifest& manifest, int band, const TrainConfig& config);

// Alternating discriminator / generator updates from a stage-1 bundle; the
// discriminator starts fresh.
TrainResult train_stage2(const std::vector<BlockPair>& pool, const ModelBundle& init, const TrainConfig& config);
TrainResult train_stage2(const DatasetManifest& manifest, const ModelBundle& init, const TrainConfig& config);

}  // namespace sradapt
