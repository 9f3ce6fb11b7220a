#include "sradapt/networks.hpp"

#include <algorithm>

#include "sradapt/error.hpp"
#include "sradapt/rng.hpp"

namespace sradapt {

namespace {

std::vector<double> truncated_normal(std::size_t n, CounterRng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next_truncated_normal(kInitStddev);
    return v;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (num_residual_blocks < 1) throw Error("generator: num_residual_blocks must be >= 1");
    if (channels < 1) throw Error("generator: channels must be >= 1");
    if (kernel != 3) throw Error("generator: only 3x3 kernels are supported");
    if (in_channels != out_channels)
        throw Error("generator: the global skip needs in_channels == out_channels");
}

void DiscriminatorConfig::validate() const {
    if (conv_specs.size() != 7)
        throw Error("discriminator: expected exactly 7 conv stages, got " + std::to_string(conv_specs.size()));
    if (stem_channels < 1 || dense_width < 1) throw Error("discriminator: widths must be >= 1");
    int prev = stem_channels;
    for (const auto& s : conv_specs) {
        if (s.stride != 1 && s.stride != 2) throw Error("discriminator: strides must be 1 or 2");
        if (s.out_channels < prev) throw Error("discriminator: stage widths must be nondecreasing");
        prev = s.out_channels;
    }
}

int DiscriminatorConfig::pre_dense_extent(int input_extent) const {
    int e = input_extent;  // 3x3, padding 1
    for (const auto& s : conv_specs) e = (e + 2 - 3) / s.stride + 1;
    return e;
}

Generator::Generator(GeneratorConfig config, std::uint64_t seed) : config_(config) {
    config_.validate();
    CounterRng rng(seed);
    const int c = config_.channels;
    const int k = config_.kernel;
    auto add_conv = [&](const std::string& name, int in, int out) {
        ConvRef ref{};
        ref.weight = params_.add(name + ".weight", {out, in, k, k},
                                 truncated_normal(static_cast<std::size_t>(out) * in * k * k, rng));
        ref.bias = params_.add(name + ".bias", {out}, std::vector<double>(out, 0.0));
        return ref;
    };
    auto add_slope = [&](const std::string& name) {
        return params_.add(name, {c}, std::vector<double>(c, kPreluInitSlope));
    };
    stem_ = add_conv("generator.stem.conv", config_.in_channels, c);
    stem_slope_ = add_slope("generator.stem.prelu");
    for (int b = 0; b < config_.num_residual_blocks; ++b) {
        const std::string prefix = "generator.block" + std::to_string(b);
        BlockRef blk{};
        blk.conv1 = add_conv(prefix + ".conv1", c, c);
        blk.slope = add_slope(prefix + ".prelu");
        blk.conv2 = add_conv(prefix + ".conv2", c, c);
        blocks_.push_back(blk);
    }
    final_ = add_conv("generator.final.conv", c, config_.out_channels);
}

Tensor Generator::conv(const Tensor& x, const ConvRef& c) const {
    return conv2d(x, params_.tensor(c.weight), params_.tensor(c.bias), 1, config_.kernel / 2);
}

Tensor Generator::forward(const Tensor& input) const {
    if (input.rank() != 4 || input.dim(1) != config_.in_channels)
        throw Error("generator: expected (N," + std::to_string(config_.in_channels) + ",H,W) input, got " +
                    shape_string(input.shape()));
    const Tensor stem = prelu(conv(input, stem_), params_.tensor(stem_slope_));
    Tensor h = stem;
    for (const auto& blk : blocks_) {
        const Tensor r = conv(prelu(conv(h, blk.conv1), params_.tensor(blk.slope)), blk.conv2);
        h = add(h, r);
    }
    h = add(h, stem);
    const Tensor residual = tanh_act(conv(h, final_));
    return clamp(add(input, residual), -1.0, 1.0);
}

void Generator::zero_residual() {
    auto zero = [&](const ConvRef& c) {
        for (const auto idx : {c.weight, c.bias}) {
            auto v = params_[idx].tensor.mutable_values();
            std::fill(v.begin(), v.end(), 0.0);
        }
    };
    zero(stem_);
    for (const auto& b : blocks_) {
        zero(b.conv1);
        zero(b.conv2);
    }
    zero(final_);
}

Discriminator::Discriminator(DiscriminatorConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed) {
    config_.validate();
    CounterRng rng(seed);
    auto conv_weight = [&](const std::string& name, int in, int out) {
        return params_.add(name, {out, in, 3, 3}, truncated_normal(static_cast<std::size_t>(out) * in * 9, rng));
    };
    stem_weight_ = conv_weight("discriminator.stem.conv.weight", 3, config_.stem_channels);
    stem_bias_ = params_.add("discriminator.stem.conv.bias", {config_.stem_channels},
                             std::vector<double>(config_.stem_channels, 0.0));
    int in = config_.stem_channels;
    for (std::size_t i = 0; i < config_.conv_specs.size(); ++i) {
        const auto& spec = config_.conv_specs[i];
        const int out = spec.out_channels;
        const std::string prefix = "discriminator.stage" + std::to_string(i);
        Stage s{};
        s.stride = spec.stride;
        s.weight = conv_weight(prefix + ".conv.weight", in, out);
        s.bias = params_.add(prefix + ".conv.bias", {out}, std::vector<double>(out, 0.0));
        s.gamma = params_.add(prefix + ".bn.gamma", {out}, std::vector<double>(out, 1.0));
        s.beta = params_.add(prefix + ".bn.beta", {out}, std::vector<double>(out, 0.0));
        s.running_mean = params_.add(prefix + ".bn.running_mean", {out}, std::vector<double>(out, 0.0), false);
        s.running_var = params_.add(prefix + ".bn.running_var", {out}, std::vector<double>(out, 1.0), false);
        s.batches_seen = params_.add(prefix + ".bn.batches_seen", {1}, {0.0}, false);
        stages_.push_back(s);
        in = out;
    }
}

void Discriminator::set_input_extent(int extent) {
    if (extent < 1) throw Error("discriminator: input extent must be positive, got " + std::to_string(extent));
    if (input_extent_ == extent) return;
    if (input_extent_ != 0)
        throw Error("discriminator: built for " + std::to_string(input_extent_) + "px inputs, got " +
                    std::to_string(extent) + "px");
    build_dense(extent);
}

void Discriminator::build_dense(int extent) {
    const int e = extent < 1 ? 0 : config_.pre_dense_extent(extent);
    if (e < 1) throw Error("discriminator: spatial extent collapses to zero before the dense layers");
    const int features = config_.conv_specs.back().out_channels * e * e;
    CounterRng rng = CounterRng(seed_).split(1);
    const int width = config_.dense_width;
    dense1_w_ = params_.add("discriminator.dense1.weight", {width, features},
                            truncated_normal(static_cast<std::size_t>(width) * features, rng));
    dense1_b_ = params_.add("discriminator.dense1.bias", {width}, std::vector<double>(width, 0.0));
    dense2_w_ = params_.add("discriminator.dense2.weight", {1, width}, truncated_normal(width, rng));
    dense2_b_ = params_.add("discriminator.dense2.bias", {1}, {0.0});
    input_extent_ = extent;
}

Tensor Discriminator::forward(const Tensor& input, BatchNormMode mode) {
    if (input.rank() != 4 || input.dim(1) != 3 || input.dim(2) != input.dim(3))
        throw Error("discriminator: expected square (N,3,S,S) input, got " + shape_string(input.shape()));
    set_input_extent(input.dim(2));
    const double slope = config_.leaky_slope;
    Tensor h = leaky_relu(conv2d(input, params_.tensor(stem_weight_), params_.tensor(stem_bias_), 1, 1), slope);
    for (const auto& s : stages_) {
        h = leaky_relu(conv2d(h, params_.tensor(s.weight), params_.tensor(s.bias), s.stride, 1), slope);
        BatchNormBuffers buffers{params_[s.running_mean].tensor, params_[s.running_var].tensor,
                                 params_[s.batches_seen].tensor};
        h = batch_norm(h, params_.tensor(s.gamma), params_.tensor(s.beta), mode, buffers);
    }
    h = leaky_relu(dense(h, params_.tensor(dense1_w_), params_.tensor(dense1_b_)), slope);
    return dense(h, params_.tensor(dense2_w_), params_.tensor(dense2_b_));
}

int QpModelSelector::band_for_adjusted(double qp) const {
    for (std::size_t i = 0; i < boundaries.size(); ++i)
        if (qp <= boundaries[i]) return static_cast<int>(i) + 1;
    return static_cast<int>(boundaries.size()) + 1;
}

const ModelBundle& select_model(int base_qp, const std::vector<ModelBundle>& bundles,
                                const QpModelSelector& selector) {
    const int band = selector.band_for_base(base_qp);
    for (const auto& b : bundles)
        if (b.qp_band == band) return b;
    throw Error("no model bundle for QP band " + std::to_string(band) + " (base QP " + std::to_string(base_qp) +
                ")");
}

}  // namespace sradapt
