#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sradapt/ops.hpp"
#include "sradapt/parameters.hpp"

namespace sradapt {

struct GeneratorConfig {
    int num_residual_blocks = 16;
    int channels = 64;
    int kernel = 3;
    int in_channels = 3;
    int out_channels = 3;

    void validate() const;
    bool operator==(const GeneratorConfig&) const = default;
};

struct ConvSpec {
    int out_channels = 64;
    int stride = 1;
    bool operator==(const ConvSpec&) const = default;
};

struct DiscriminatorConfig {
    int stem_channels = 64;
    std::vector<ConvSpec> conv_specs{{64, 2}, {128, 1}, {128, 2}, {256, 1}, {256, 2}, {512, 1}, {512, 2}};
    int dense_width = 1024;
    double leaky_slope = 0.2;

    void validate() const;
    // Spatial extent reaching the dense layers for a square input.
    int pre_dense_extent(int input_extent) const;
    bool operator==(const DiscriminatorConfig&) const = default;
};

inline constexpr double kInitStddev = 0.02;
inline constexpr double kPreluInitSlope = 0.25;

// 3x3 restoration network: stem conv + PReLU, residual blocks without batch
// norm, long skip from the stem, final conv + Tanh, global skip from the input,
// clamp to [-1, 1]. Input and output are (N,3,H,W) normalized blocks.
class Generator {
public:
    explicit Generator(GeneratorConfig config, std::uint64_t seed = 0);

    Tensor forward(const Tensor& input) const;

    const GeneratorConfig& config() const { return config_; }
    ParameterSet& parameters() { return params_; }
    const ParameterSet& parameters() const { return params_; }

    // Zeroes every convolution weight and bias; PReLU slopes are kept.
    void zero_residual();

    // Number of stacked 3x3 convolutions on the longest path; equals the
    // receptive-field radius in pixels.
    int receptive_radius() const { return 2 + 2 * config_.num_residual_blocks; }

private:
    struct ConvRef {
        std::size_t weight, bias;
    };
    struct BlockRef {
        ConvRef conv1, conv2;
        std::size_t slope;
    };
    Tensor conv(const Tensor& x, const ConvRef& c) const;

    GeneratorConfig config_;
    ParameterSet params_;
    ConvRef stem_{};
    std::size_t stem_slope_ = 0;
    std::vector<BlockRef> blocks_;
    ConvRef final_{};
};

// Critic: stem conv + LeakyReLU, seven conv/LeakyReLU/BN stages, two dense
// layers. Returns the raw score per item, shape (N,1); no sigmoid.
class Discriminator {
public:
    explicit Discriminator(DiscriminatorConfig config, std::uint64_t seed = 0);

    Tensor forward(const Tensor& input, BatchNormMode mode = BatchNormMode::kTrain);

    const DiscriminatorConfig& config() const { return config_; }
    ParameterSet& parameters() { return params_; }
    const ParameterSet& parameters() const { return params_; }

    // Spatial extent seen by the dense layers; fixed by the first forward or by
    // set_input_extent() (the dense weights depend on it).
    int input_extent() const { return input_extent_; }
    void set_input_extent(int extent);

private:
    struct Stage {
        std::size_t weight, bias, gamma, beta, running_mean, running_var, batches_seen;
        int stride;
    };
    void build_dense(int extent);

    DiscriminatorConfig config_;
    std::uint64_t seed_;
    ParameterSet params_;
    std::size_t stem_weight_ = 0, stem_bias_ = 0;
    std::vector<Stage> stages_;
    std::size_t dense1_w_ = 0, dense1_b_ = 0, dense2_w_ = 0, dense2_b_ = 0;
    int input_extent_ = 0;
};

struct QpModelSelector {
    std::array<double, 3> boundaries{18.5, 23.5, 28.5};
    int qp_offset = -6;

    // 1..4 for an already-offset QP.
    int band_for_adjusted(double qp_adjusted) const;
    int band_for_base(int base_qp) const { return band_for_adjusted(base_qp + qp_offset); }
};

struct ModelBundle {
    int qp_band = 1;
    Generator generator;
    std::optional<Discriminator> discriminator;
};

// Bundle serving the band that base_qp resolves to.
const ModelBundle& select_model(int base_qp, const std::vector<ModelBundle>& bundles,
                                const QpModelSelector& selector = {});

}  // namespace sradapt
