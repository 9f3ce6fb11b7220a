#pragma once

#include "sradapt/frame.hpp"
#include "sradapt/networks.hpp"

namespace sradapt {

struct TileOptions {
    int tile = 96;
    int overlap = 16;
};

// (1,3,H,W) normalized tensor from a 4:4:4 frame, and back.
Tensor frame_to_tensor(const Frame& frame444);
Frame tensor_to_frame(const Tensor& image, int bit_depth);

// Runs the generator tile by tile. Each tile is evaluated with enough
// surrounding context that its output matches whole-image inference; tiles are
// blended with linear ramps across the overlap.
Tensor run_tiled(const Generator& generator, const Tensor& image, const TileOptions& options);

// NN x2 up-sampling, 4:4:4 conversion, tiled restoration, back to the input's
// chroma format. Output dims are twice the input dims.
Frame enhance_frame(const Frame& decoded_lo, const Generator& generator, const TileOptions& options = {});
Frame enhance_frame(const Frame& decoded_lo, const ModelBundle& bundle, const TileOptions& options = {});

}  // namespace sradapt
