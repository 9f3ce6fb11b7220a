#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace sradapt {

enum class ChromaFormat { k420, k444 };

// One 2-D array of unsigned samples, row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> samples;

    Plane() = default;
    Plane(int w, int h, std::uint16_t fill = 0)
        : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {}

    std::uint16_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
    std::uint16_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const Plane&) const = default;
};

// Everything needed to interpret a raw planar file; never inferred from data.
struct Geometry {
    int width = 0;
    int height = 0;
    int bit_depth = 8;
    ChromaFormat format = ChromaFormat::k420;

    bool operator==(const Geometry&) const = default;
};

std::pair<int, int> chroma_dims(int width, int height, ChromaFormat format);

// Bytes occupied by one frame in a raw file with this geometry.
std::size_t frame_byte_count(const Geometry& geometry);

struct Frame {
    int width = 0;
    int height = 0;
    int bit_depth = 8;
    ChromaFormat format = ChromaFormat::k420;
    std::array<Plane, 3> planes;  // Y, Cb, Cr

    Frame() = default;
    explicit Frame(const Geometry& geometry, std::uint16_t fill = 0);

    Geometry geometry() const { return {width, height, bit_depth, format}; }
    std::uint16_t max_value() const { return static_cast<std::uint16_t>((1u << bit_depth) - 1); }

    Plane& y() { return planes[0]; }
    const Plane& y() const { return planes[0]; }

    bool operator==(const Frame&) const = default;
};

// Throws if plane dimensions or sample ranges violate the frame invariants.
void validate_frame(const Frame& frame);

std::vector<Frame> read_yuv(const std::filesystem::path& path, const Geometry& geometry);
void write_yuv(const std::vector<Frame>& frames, const std::filesystem::path& path);

// 4:2:0 -> 4:4:4 by sample replication; 4:4:4 input is returned unchanged.
Frame to_444(const Frame& frame);
// 4:4:4 -> 4:2:0 by averaging each 2x2 chroma neighbourhood, rounding half up.
Frame to_420(const Frame& frame);

// Training block: 3 channels of size x size normalized samples, CHW order.
struct Block {
    int size = 0;
    std::vector<double> samples;

    double& at(int c, int x, int y) {
        return samples[(static_cast<std::size_t>(c) * size + y) * size + x];
    }
    double at(int c, int x, int y) const {
        return samples[(static_cast<std::size_t>(c) * size + y) * size + x];
    }
    bool operator==(const Block&) const = default;
};

struct BlockPair {
    Block input;   // decoded, up-sampled
    Block target;  // original
    int x = 0;
    int y = 0;
};

// s -> 2 s / (2^depth - 1) - 1
double normalize_sample(std::uint16_t sample, int bit_depth);
// Inverse of normalize_sample with rounding and clipping to the legal range.
std::uint16_t denormalize_sample(double value, int bit_depth);

// Co-located square blocks from two frames of identical geometry. Offsets are a
// pure function of (frame dims, size, count, seed).
std::vector<BlockPair> extract_blocks(const Frame& lo, const Frame& hi, int size, int count,
                                      std::uint64_t seed);

Block rotate_block(const Block& block, int k);
// Rotates both blocks by k * 90 degrees counter-clockwise.
BlockPair augment_rotate(const BlockPair& pair, int k);

}  // namespace sradapt
