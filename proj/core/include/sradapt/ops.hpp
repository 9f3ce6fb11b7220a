#pragma once

#include "sradapt/tensor.hpp"

namespace sradapt {

// Cross-correlation. input (N,C,H,W), weight (O,C,k,k), bias (O).
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              int padding);

// input (N, F...) flattened to (N, F); weight (O, F); bias (O) -> (N, O).
Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias);

// Per-channel slope over dim 1.
Tensor prelu(const Tensor& input, const Tensor& slope);
Tensor leaky_relu(const Tensor& input, double slope);
Tensor tanh_act(const Tensor& input);
Tensor sigmoid_act(const Tensor& input);
Tensor exp_act(const Tensor& input);
// ln(max(x, floor)); the gradient is zero where the floor is active.
Tensor log_clamped(const Tensor& input, double floor = 1e-12);
// Gradient passes only strictly inside (lo, hi) or on the boundary when unclamped.
Tensor clamp(const Tensor& input, double lo, double hi);

enum class BatchNormMode { kTrain, kEval };

// Running statistics are plain (non-trainable) tensors mutated in train mode.
struct BatchNormBuffers {
    Tensor running_mean;  // (C)
    Tensor running_var;   // (C)
    Tensor batches_seen;  // (1)
};

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

// Normalizes over every dim except 1.
Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta, BatchNormMode mode,
                  BatchNormBuffers& buffers);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor add_constant(const Tensor& a, double constant);
// a + s where s holds a single element broadcast over a.
Tensor add_broadcast(const Tensor& a, const Tensor& s);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// (N,C,H,W) -> (N,C,H/2,W/2), floor division, mean of each 2x2 cell.
Tensor avg_pool2x2(const Tensor& input);

Tensor reshape(const Tensor& a, Shape shape);

}  // namespace sradapt
