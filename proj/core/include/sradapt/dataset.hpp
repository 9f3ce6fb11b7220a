#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sradapt/codec.hpp"
#include "sradapt/manifest.hpp"
#include "sradapt/tensor.hpp"

namespace sradapt {

enum class CodecKind { kToy, kExternal };

struct SourceSpec {
    std::filesystem::path path;
    Geometry geometry;  // full resolution, 4:2:0
};

struct PrepareOptions {
    std::vector<int> base_qps{22, 27, 32, 37};
    QpModelSelector selector;
    double fps = 30.0;
    CodecKind codec = CodecKind::kToy;
    // Externally decoded low-resolution files; "{stem}" and "{qp}" are
    // replaced by the source file stem and the base QP.
    std::string external_pattern;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
};

std::string expand_pattern(const std::string& pattern, const std::string& stem, int qp);

// For every (source, QP): Lanczos down-sampling, coding at QP + offset, NN
// up-sampling, written to out_dir next to a manifest.txt. All sources are
// checked for even dimensions before any coding starts.
DatasetManifest prepare_dataset(const std::vector<SourceSpec>& sources, const PrepareOptions& options);

// Co-located training pairs from every frame of one band's entries.
std::vector<BlockPair> load_band_blocks(const DatasetManifest& manifest, int band, int block_size, int count,
                                        std::uint64_t seed);

struct Batch {
    Tensor input;   // (B,3,S,S)
    Tensor target;  // (B,3,S,S)
};

Batch make_batch(const std::vector<BlockPair>& pool, const std::vector<std::size_t>& indices,
                 const std::vector<int>& rotations);

}  // namespace sradapt
