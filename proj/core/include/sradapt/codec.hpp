#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "sradapt/frame.hpp"

namespace sradapt {

struct ToyCodecConfig {
    int block_size = 8;
    int base_qp = 32;
    int qp_offset = -6;

    int effective_qp() const { return base_qp + qp_offset; }
};

struct CodedResult {
    std::vector<Frame> decoded;
    std::int64_t bits = 0;
    double fps = 30.0;

    // bits * fps / (1000 * frames)
    double rate_kbps() const;
};

double rate_kbps(std::int64_t bits, double fps, std::size_t frame_count);

// 2^((qp - 4) / 6)
double quantizer_step(int qp);

// Bits of the signed Exp-Golomb codeword for v (0 -> 1 bit, +-1 -> 3 bits, ...).
int signed_exp_golomb_length(std::int64_t v);

// Intra-only 8x8 DCT-II coder: uniform quantization, inverse transform, clip.
// Planes whose dims are not multiples of the block size are mirror-padded and
// cropped after decoding.
CodedResult toy_encode_decode(const std::vector<Frame>& frames, const ToyCodecConfig& config, double fps = 30.0);

// Per-frame bit counts from a two-column text file "frame_index bits" (comma or
// whitespace separated; '#' comments allowed).
std::vector<std::int64_t> read_frame_bits(const std::filesystem::path& path);

// Wraps frames decoded by an external codec together with the rate it reported.
CodedResult ingest_external(const std::filesystem::path& decoded_path, const Geometry& geometry,
                            std::int64_t total_bits, double fps);
CodedResult ingest_external(const std::filesystem::path& decoded_path, const Geometry& geometry,
                            const std::filesystem::path& frame_bits_path, double fps);

}  // namespace sradapt
