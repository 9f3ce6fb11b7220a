#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "sradapt/tensor.hpp"

namespace sradapt {

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
// Normalized-sample range for data in [-1, 1].
inline constexpr double kNormalizedRange = 2.0;
inline constexpr std::array<double, 5> kMsSsimWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

inline constexpr double kL1Weight = 0.025;
inline constexpr double kAdversarialWeight = 5e-3;
inline constexpr double kLogFloor = 1e-12;

// Mean of |pred - target|; the subgradient at ties is 0.
Tensor l1_loss(const Tensor& pred, const Tensor& target);

enum class SsimStatistic {
    kFull,               // luminance * contrast * structure
    kContrastStructure,  // contrast * structure only
};

// Mean of the local statistic over every (item, channel, valid window
// position) of (N,C,H,W) inputs, 11x11 Gaussian window, sigma 1.5.
Tensor ssim_statistic(const Tensor& pred, const Tensor& target, double dynamic_range,
                      SsimStatistic statistic);

Tensor ssim(const Tensor& pred, const Tensor& target, double dynamic_range);

// Number of dyadic scales whose smaller side still fits the window (max 5).
int ms_ssim_scale_count(int height, int width);
std::vector<double> ms_ssim_weights(int scales);

Tensor ms_ssim(const Tensor& pred, const Tensor& target, double dynamic_range);

// 1 - SSIM and 1 - MS-SSIM on normalized data (range 2).
Tensor ssim_loss(const Tensor& pred, const Tensor& target);
Tensor ms_ssim_loss(const Tensor& pred, const Tensor& target);

// Raw (pre-sigmoid) critic scores, one per batch item.
struct CriticOutputs {
    Tensor real_scores;
    Tensor fake_scores;
};

Tensor ragan_generator_loss(const CriticOutputs& critic);
Tensor ragan_discriminator_loss(const CriticOutputs& critic);

struct LossValue {
    Tensor scalar;
    std::vector<std::pair<std::string, double>> components;  // unweighted

    double component(const std::string& name) const;
};

// 0.025 * l1 + ssim_term + 0.005 * adversarial, from already-computed parts.
LossValue weighted_generator_loss(const Tensor& l1, const Tensor& ssim_term, const Tensor& adversarial);

LossValue generator_total_loss(const Tensor& pred, const Tensor& target, const CriticOutputs& critic);

}  // namespace sradapt
