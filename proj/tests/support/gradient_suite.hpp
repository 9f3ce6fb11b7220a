#pragma once

#include <string>
#include <vector>

#include "support.hpp"

namespace sradapt::testing {

struct NamedGradCheck {
    std::string op;
    GradCheckResult result;
};

// Central-difference checks of every differentiable op used by the networks
// and losses, on small random inputs in [-1, 1].
NamedGradCheck check_conv2d();
NamedGradCheck check_conv2d_strided();
NamedGradCheck check_dense();
NamedGradCheck check_prelu();
NamedGradCheck check_leaky_relu();
NamedGradCheck check_tanh();
NamedGradCheck check_sigmoid();
NamedGradCheck check_batch_norm();
NamedGradCheck check_l1();
NamedGradCheck check_ssim();
NamedGradCheck check_ms_ssim();
NamedGradCheck check_ragan_generator();
NamedGradCheck check_ragan_discriminator();
NamedGradCheck check_generator_total_loss();

std::vector<NamedGradCheck> run_gradient_suite();

}  // namespace sradapt::testing
