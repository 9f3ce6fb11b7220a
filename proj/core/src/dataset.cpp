#include "sradapt/dataset.hpp"

#include <algorithm>

#include "sradapt/error.hpp"
#include "sradapt/resample.hpp"
#include "sradapt/rng.hpp"

namespace sradapt {

std::string expand_pattern(const std::string& pattern, const std::string& stem, int qp) {
    std::string out = pattern;
    auto replace = [&](const std::string& key, const std::string& value) {
        for (std::size_t pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
            out.replace(pos, key.size(), value);
    };
    replace("{stem}", stem);
    replace("{qp}", std::to_string(qp));
    return out;
}

DatasetManifest prepare_dataset(const std::vector<SourceSpec>& sources, const PrepareOptions& options) {
    if (sources.empty()) throw Error("prepare: no sources given");
    if (options.base_qps.empty()) throw Error("prepare: no QPs given");
    if (options.codec == CodecKind::kExternal && options.external_pattern.empty())
        throw Error("prepare: external codec selected but no decoded-file pattern given");
    for (const auto& s : sources)
        if (s.geometry.width % 2 != 0 || s.geometry.height % 2 != 0)
            throw Error("prepare: " + s.path.string() + " has odd dimensions " + std::to_string(s.geometry.width) +
                        "x" + std::to_string(s.geometry.height));
    std::filesystem::create_directories(options.out_dir);

    DatasetManifest manifest;
    manifest.notes.push_back(std::string("codec=") + (options.codec == CodecKind::kToy ? "toy" : "external") +
                             " qp_offset=" + std::to_string(options.selector.qp_offset) +
                             " seed=" + std::to_string(options.seed));
    for (const auto& src : sources) {
        const auto original = read_yuv(src.path, src.geometry);
        if (original.empty()) throw Error("prepare: " + src.path.string() + " holds no frames");
        const std::string stem = src.path.stem().string();
        std::vector<Frame> low;
        if (options.codec == CodecKind::kToy)
            for (const auto& f : original) low.push_back(downsample_2x(f));
        const Geometry low_geometry{src.geometry.width / 2, src.geometry.height / 2, src.geometry.bit_depth,
                                    src.geometry.format};
        for (const int qp : options.base_qps) {
            CodedResult coded;
            if (options.codec == CodecKind::kToy) {
                coded = toy_encode_decode(low, ToyCodecConfig{8, qp, options.selector.qp_offset}, options.fps);
            } else {
                coded = ingest_external(expand_pattern(options.external_pattern, stem, qp), low_geometry,
                                        std::int64_t{0}, options.fps);
                if (coded.decoded.size() != original.size())
                    throw Error("prepare: external decode for QP " + std::to_string(qp) + " has " +
                                std::to_string(coded.decoded.size()) + " frames, source has " +
                                std::to_string(original.size()));
            }
            std::vector<Frame> up;
            for (const auto& f : coded.decoded) up.push_back(upsample_nn_2x(f));
            const auto out_path = std::filesystem::absolute(options.out_dir / (stem + "_qp" + std::to_string(qp) + "_dec.yuv"));
            write_yuv(up, out_path);
            ManifestEntry e;
            e.original_path = std::filesystem::absolute(src.path);
            e.decoded_path = out_path;
            e.geometry = src.geometry;
            e.fps = options.fps;
            e.base_qp = qp;
            e.band = options.selector.band_for_base(qp);
            manifest.entries.push_back(std::move(e));
        }
    }
    manifest.validate(options.selector);
    write_manifest(manifest, options.out_dir / "manifest.txt");
    return manifest;
}

std::vector<BlockPair> load_band_blocks(const DatasetManifest& manifest, int band, int block_size, int count,
                                        std::uint64_t seed) {
    const auto entries = manifest.band_entries(band);
    if (entries.empty()) throw Error("training: manifest has no entries for band " + std::to_string(band));
    std::vector<std::pair<Frame, Frame>> frames;  // (decoded-up, original)
    for (const auto& e : entries) {
        const auto orig = read_yuv(e.original_path, e.geometry);
        const auto dec = read_yuv(e.decoded_path, e.geometry);
        if (orig.size() != dec.size())
            throw Error("training: " + e.decoded_path.string() + " and " + e.original_path.string() +
                        " differ in frame count");
        for (std::size_t i = 0; i < orig.size(); ++i) frames.emplace_back(dec[i], orig[i]);
    }
    CounterRng rng(seed);
    std::vector<BlockPair> pool;
    pool.reserve(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < frames.size(); ++i) {
        // spread `count` as evenly as possible over the frames
        const int share = static_cast<int>((static_cast<std::size_t>(count) * (i + 1)) / frames.size() -
                                           (static_cast<std::size_t>(count) * i) / frames.size());
        if (share == 0) continue;
        auto blocks = extract_blocks(frames[i].first, frames[i].second, block_size, share, rng.split(i).next_u64());
        for (auto& b : blocks) pool.push_back(std::move(b));
    }
    return pool;
}

Batch make_batch(const std::vector<BlockPair>& pool, const std::vector<std::size_t>& indices,
                 const std::vector<int>& rotations) {
    if (indices.empty()) throw Error("make_batch: empty batch");
    const int s = pool.at(indices.front()).input.size;
    const std::size_t item = 3 * static_cast<std::size_t>(s) * s;
    std::vector<double> in(item * indices.size()), tg(item * indices.size());
    for (std::size_t b = 0; b < indices.size(); ++b) {
        BlockPair pair = pool.at(indices[b]);
        if (!rotations.empty()) pair = augment_rotate(pair, rotations.at(b));
        std::copy(pair.input.samples.begin(), pair.input.samples.end(), in.begin() + item * b);
        std::copy(pair.target.samples.begin(), pair.target.samples.end(), tg.begin() + item * b);
    }
    const int n = static_cast<int>(indices.size());
    return {Tensor::from({n, 3, s, s}, std::move(in)), Tensor::from({n, 3, s, s}, std::move(tg))};
}

}  // namespace sradapt
