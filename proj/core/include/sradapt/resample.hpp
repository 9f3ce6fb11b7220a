#pragma once

#include <cstdint>
#include <vector>

#include "sradapt/frame.hpp"

namespace sradapt {

// Normalized-sinc Lanczos window with a = 3; zero outside |x| < 3.
double lanczos3_kernel(double x);

// Fractional bits used for quantized filter weights. With 10-bit samples every
// product and partial sum is exact in double precision, so the two separable
// pass orders produce identical results.
inline constexpr int kWeightFractionBits = 20;

// Taps of the 2:1 decimation filter for one output sample. Output sample k sits
// at input coordinate 2k + 0.5; the kernel is stretched by the decimation
// factor, so taps cover input samples 2k-5 .. 2k+6.
struct DecimationTaps {
    int first_offset = -5;          // relative to 2k
    std::vector<double> raw;        // lanczos3((i - 2k - 0.5) / 2), unnormalized
    std::vector<double> weights;    // quantized, sum exactly 1
};
const DecimationTaps& decimation_taps();

enum class PassOrder { kRowsFirst, kColumnsFirst };

// Lanczos3 2:1 decimation of one plane; clamp-to-edge, single final rounding.
Plane downsample_plane_2x(const Plane& plane, int bit_depth,
                          PassOrder order = PassOrder::kRowsFirst);
Frame downsample_2x(const Frame& frame);

Plane upsample_plane_nn_2x(const Plane& plane);
// out(i, j) = in(i / 2, j / 2) on each plane; dims exactly doubled.
Frame upsample_nn_2x(const Frame& frame);

}  // namespace sradapt
