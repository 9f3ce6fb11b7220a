#include "sradapt/trainer.hpp"

#include <charconv>
#include <numeric>

#include "sradapt/error.hpp"
#include "sradapt/losses.hpp"
#include "sradapt/rng.hpp"

namespace sradapt {

void LogRecord::add(const std::string& key, double value) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    fields.emplace_back(key, std::string(buf, r.ptr));
}

void LogRecord::add(const std::string& key, long long value) { fields.emplace_back(key, std::to_string(value)); }

std::string LogRecord::str() const {
    std::string out;
    for (const auto& [k, v] : fields) {
        if (!out.empty()) out += ' ';
        out += k + "=" + v;
    }
    return out;
}

double StepRecord::value(const std::string& key) const {
    for (const auto& [k, v] : values)
        if (k == key) return v;
    throw Error("step record has no value '" + key + "'");
}

namespace {

enum Stream : std::uint64_t { kGeneratorInit = 1, kDiscriminatorInit = 2, kData = 3, kOrder = 4 };

CounterRng band_stream(const TrainConfig& c, int band, Stream s) {
    return CounterRng(c.seed).split(static_cast<std::uint64_t>(band)).split(s);
}

// Per-epoch visiting order and rotations.
struct EpochPlan {
    std::vector<std::vector<std::size_t>> batches;
    std::vector<std::vector<int>> rotations;
};

EpochPlan plan_epoch(std::size_t pool_size, const TrainConfig& c, CounterRng rng) {
    std::vector<std::size_t> order(pool_size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = pool_size; i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);
    const std::size_t bs = std::min<std::size_t>(static_cast<std::size_t>(c.batch_size), pool_size);
    EpochPlan plan;
    for (std::size_t start = 0; start + bs <= pool_size; start += bs) {
        plan.batches.emplace_back(order.begin() + start, order.begin() + start + bs);
        std::vector<int> rot;
        if (c.augment)
            for (std::size_t i = 0; i < bs; ++i) rot.push_back(static_cast<int>(rng.next_below(4)));
        plan.rotations.push_back(std::move(rot));
    }
    return plan;
}

void check_pool(const std::vector<BlockPair>& pool, const TrainConfig& c) {
    if (pool.empty()) throw Error("training: empty block pool");
    for (const auto& p : pool)
        if (p.input.size != c.block_size || p.target.size != c.block_size)
            throw Error("training: pool block size " + std::to_string(p.input.size) + " differs from block_size " +
                        std::to_string(c.block_size));
}

AdamOptions adam_for(const TrainConfig& c, int epoch) {
    AdamOptions o;
    o.lr = c.lr_at_epoch(epoch);
    o.beta1 = c.beta1;
    o.beta2 = c.beta2;
    return o;
}

}  // namespace

std::uint64_t generator_seed(const TrainConfig& c, int band) { return band_stream(c, band, kGeneratorInit).next_u64(); }
std::uint64_t discriminator_seed(const TrainConfig& c, int band) {
    return band_stream(c, band, kDiscriminatorInit).next_u64();
}
std::uint64_t data_seed(const TrainConfig& c, int band) { return band_stream(c, band, kData).next_u64(); }

double pool_ms_ssim_loss(const Generator& generator, const std::vector<BlockPair>& pool, int batch_size) {
    NoGradGuard guard;
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t start = 0; start < pool.size(); start += static_cast<std::size_t>(batch_size)) {
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i < std::min(pool.size(), start + static_cast<std::size_t>(batch_size)); ++i)
            idx.push_back(i);
        const Batch b = make_batch(pool, idx, {});
        total += ms_ssim_loss(generator.forward(b.input), b.target).item() * static_cast<double>(idx.size());
        n += idx.size();
    }
    return total / static_cast<double>(n);
}

TrainResult train_stage1(const std::vector<BlockPair>& pool, int band, const TrainConfig& config,
                         const Generator* init) {
    config.validate();
    check_pool(pool, config);
    Generator gen = init ? *init : Generator(config.generator_config(), generator_seed(config, band));
    if (!(gen.config() == config.generator_config()))
        throw Error("training: initial generator does not match the configured architecture");

    gen.parameters().reset_optimizer_state();  // same start whether init came from memory or a checkpoint
    TrainResult result{ModelBundle{band, gen, std::nullopt}, {}, {}, 0.0, 0.0};
    Generator& g = result.bundle.generator;
    result.initial_loss = pool_ms_ssim_loss(g, pool, config.batch_size);
    const CounterRng order = band_stream(config, band, kOrder).split(1);
    int step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const EpochPlan plan = plan_epoch(pool.size(), config, order.split(static_cast<std::uint64_t>(epoch)));
        const AdamOptions adam = adam_for(config, epoch);
        double sum = 0.0;
        for (std::size_t b = 0; b < plan.batches.size(); ++b, ++step) {
            const Batch batch = make_batch(pool, plan.batches[b], plan.rotations[b]);
            g.parameters().zero_grads();
            const Tensor loss = ms_ssim_loss(g.forward(batch.input), batch.target);
            backward(loss);
            adam_step(g.parameters(), adam);
            sum += loss.item();
            result.steps.push_back({epoch, step, adam.lr, {{"loss", loss.item()}}});
        }
        LogRecord rec;
        rec.add("stage", "1");
        rec.add("band", static_cast<long long>(band));
        rec.add("epoch", static_cast<long long>(epoch));
        rec.add("lr", adam.lr);
        rec.add("ms_ssim_loss", sum / static_cast<double>(plan.batches.size()));
        result.epoch_log.push_back(std::move(rec));
    }
    result.final_loss = pool_ms_ssim_loss(g, pool, config.batch_size);
    return result;
}

TrainResult train_stage1(const DatasetManifest& manifest, int band, const TrainConfig& config) {
    config.validate();
    const auto pool =
        load_band_blocks(manifest, band, config.block_size, config.blocks_per_band, data_seed(config, band));
    return train_stage1(pool, band, config);
}

TrainResult train_stage2(const std::vector<BlockPair>& pool, const ModelBundle& init, const TrainConfig& config) {
    config.validate();
    check_pool(pool, config);
    if (!(init.generator.config() == config.generator_config()))
        throw Error("training: stage-1 generator shapes do not match the configured architecture");
    const int band = init.qp_band;
    Discriminator fresh(config.discriminator_config(), discriminator_seed(config, band));
    fresh.set_input_extent(config.block_size);
    TrainResult result{ModelBundle{band, init.generator, std::move(fresh)}, {}, {}, 0.0, 0.0};
    Generator& g = result.bundle.generator;
    Discriminator& d = *result.bundle.discriminator;
    g.parameters().reset_optimizer_state();

    const CounterRng order = band_stream(config, band, kOrder).split(2);
    int step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const EpochPlan plan = plan_epoch(pool.size(), config, order.split(static_cast<std::uint64_t>(epoch)));
        const AdamOptions adam = adam_for(config, epoch);
        double g_sum = 0.0, d_sum = 0.0;
        for (std::size_t b = 0; b < plan.batches.size(); ++b, ++step) {
            const Batch batch = make_batch(pool, plan.batches[b], plan.rotations[b]);

            // discriminator step on a detached fake
            Tensor fake;
            {
                NoGradGuard guard;
                fake = g.forward(batch.input);
            }
            d.parameters().zero_grads();
            const Tensor d_loss = ragan_discriminator_loss(
                {d.forward(batch.target, BatchNormMode::kTrain), d.forward(fake, BatchNormMode::kTrain)});
            backward(d_loss);
            adam_step(d.parameters(), adam);

            // generator step against the updated critic
            Tensor real_scores;
            {
                NoGradGuard guard;
                real_scores = d.forward(batch.target, BatchNormMode::kTrain);
            }
            g.parameters().zero_grads();
            const Tensor pred = g.forward(batch.input);
            const LossValue total =
                generator_total_loss(pred, batch.target, {real_scores, d.forward(pred, BatchNormMode::kTrain)});
            backward(total.scalar);
            adam_step(g.parameters(), adam);

            StepRecord rec{epoch, step, adam.lr, {{"loss", total.scalar.item()}, {"d_loss", d_loss.item()}}};
            for (const auto& c : total.components) rec.values.push_back(c);
            result.steps.push_back(std::move(rec));
            g_sum += total.scalar.item();
            d_sum += d_loss.item();
        }
        const double n = static_cast<double>(plan.batches.size());
        if (epoch == 0) result.initial_loss = g_sum / n;
        result.final_loss = g_sum / n;
        LogRecord rec;
        rec.add("stage", "2");
        rec.add("band", static_cast<long long>(band));
        rec.add("epoch", static_cast<long long>(epoch));
        rec.add("lr", adam.lr);
        rec.add("g_loss", g_sum / n);
        rec.add("d_loss", d_sum / n);
        result.epoch_log.push_back(std::move(rec));
    }
    return result;
}

TrainResult train_stage2(const DatasetManifest& manifest, const ModelBundle& init, const TrainConfig& config) {
    config.validate();
    const int band = init.qp_band;
    const auto pool =
        load_band_blocks(manifest, band, config.block_size, config.blocks_per_band, data_seed(config, band));
    return train_stage2(pool, init, config);
}

}  // namespace sradapt
