#pragma once

#include <cstdint>
#include <vector>

#include "sradapt/frame.hpp"

namespace sradapt {

// Deterministic textured test clip: oriented gratings, hard-edged shapes and a
// slow global drift between frames. Used by the smoke and acceptance suites
// in place of real camera content.
std::vector<Frame> synthetic_clip(const Geometry& geometry, int frames, std::uint64_t seed);

}  // namespace sradapt
