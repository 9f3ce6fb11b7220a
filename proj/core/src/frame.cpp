#include "sradapt/frame.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "sradapt/error.hpp"
#include "sradapt/rng.hpp"

namespace sradapt {

std::pair<int, int> chroma_dims(int width, int height, ChromaFormat format) {
    if (format == ChromaFormat::k444) return {width, height};
    return {(width + 1) / 2, (height + 1) / 2};
}

std::size_t frame_byte_count(const Geometry& g) {
    const auto [cw, ch] = chroma_dims(g.width, g.height, g.format);
    const std::size_t samples = static_cast<std::size_t>(g.width) * g.height +
                                2 * static_cast<std::size_t>(cw) * ch;
    return samples * (g.bit_depth > 8 ? 2 : 1);
}

static void check_geometry(const Geometry& g) {
    if (g.width <= 0 || g.height <= 0) throw Error("frame dimensions must be positive");
    if (g.bit_depth != 8 && g.bit_depth != 10)
        throw Error("unsupported bit depth " + std::to_string(g.bit_depth) + " (expected 8 or 10)");
}

Frame::Frame(const Geometry& g, std::uint16_t fill)
    : width(g.width), height(g.height), bit_depth(g.bit_depth), format(g.format) {
    check_geometry(g);
    const auto [cw, ch] = chroma_dims(width, height, format);
    planes[0] = Plane(width, height, fill);
    planes[1] = Plane(cw, ch, fill);
    planes[2] = Plane(cw, ch, fill);
}

void validate_frame(const Frame& f) {
    check_geometry(f.geometry());
    const auto [cw, ch] = chroma_dims(f.width, f.height, f.format);
    const std::array<std::pair<int, int>, 3> dims{{{f.width, f.height}, {cw, ch}, {cw, ch}}};
    for (int p = 0; p < 3; ++p) {
        const Plane& plane = f.planes[p];
        if (plane.width != dims[p].first || plane.height != dims[p].second ||
            plane.samples.size() != static_cast<std::size_t>(plane.width) * plane.height)
            throw Error("plane " + std::to_string(p) + " has inconsistent dimensions");
        for (const auto s : plane.samples)
            if (s > f.max_value())
                throw Error("sample value " + std::to_string(s) + " exceeds bit depth " +
                            std::to_string(f.bit_depth));
    }
}

std::vector<Frame> read_yuv(const std::filesystem::path& path, const Geometry& geometry) {
    check_geometry(geometry);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    const std::size_t per_frame = frame_byte_count(geometry);
    if (bytes.size() % per_frame != 0)
        throw Error("truncated file: " + path.string() + " holds " + std::to_string(bytes.size()) +
                    " bytes, not a multiple of the " + std::to_string(per_frame) +
                    "-byte frame size");

    const bool wide = geometry.bit_depth > 8;
    const std::uint32_t limit = 1u << geometry.bit_depth;
    std::vector<Frame> frames;
    frames.reserve(bytes.size() / per_frame);
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        Frame frame(geometry);
        for (auto& plane : frame.planes) {
            for (auto& s : plane.samples) {
                std::uint32_t v = bytes[pos++];
                if (wide) v |= static_cast<std::uint32_t>(bytes[pos++]) << 8;
                if (v >= limit)
                    throw Error("corrupt input: sample value " + std::to_string(v) +
                                " out of range for bit depth " +
                                std::to_string(geometry.bit_depth));
                s = static_cast<std::uint16_t>(v);
            }
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

void write_yuv(const std::vector<Frame>& frames, const std::filesystem::path& path) {
    for (const auto& f : frames) {
        if (f.geometry() != frames.front().geometry())
            throw Error("write_yuv: frames have mixed geometry");
        validate_frame(f);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    std::vector<char> buffer;
    for (const auto& f : frames) {
        buffer.clear();
        buffer.reserve(frame_byte_count(f.geometry()));
        const bool wide = f.bit_depth > 8;
        for (const auto& plane : f.planes) {
            for (const auto s : plane.samples) {
                buffer.push_back(static_cast<char>(s & 0xff));
                if (wide) buffer.push_back(static_cast<char>(s >> 8));
            }
        }
        out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    }
    if (!out) throw Error("write failed: " + path.string());
}

Frame to_444(const Frame& frame) {
    if (frame.format == ChromaFormat::k444) return frame;
    Frame out(Geometry{frame.width, frame.height, frame.bit_depth, ChromaFormat::k444});
    out.planes[0] = frame.planes[0];
    for (int p = 1; p < 3; ++p) {
        const Plane& src = frame.planes[p];
        Plane& dst = out.planes[p];
        for (int y = 0; y < dst.height; ++y)
            for (int x = 0; x < dst.width; ++x) dst.at(x, y) = src.at(x / 2, y / 2);
    }
    return out;
}

Frame to_420(const Frame& frame) {
    if (frame.format == ChromaFormat::k420) return frame;
    Frame out(Geometry{frame.width, frame.height, frame.bit_depth, ChromaFormat::k420});
    out.planes[0] = frame.planes[0];
    for (int p = 1; p < 3; ++p) {
        const Plane& src = frame.planes[p];
        Plane& dst = out.planes[p];
        for (int y = 0; y < dst.height; ++y) {
            for (int x = 0; x < dst.width; ++x) {
                std::uint32_t sum = 0;
                std::uint32_t n = 0;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int sx = 2 * x + dx;
                        const int sy = 2 * y + dy;
                        if (sx < src.width && sy < src.height) {
                            sum += src.at(sx, sy);
                            ++n;
                        }
                    }
                // round half up: floor(sum / n + 1/2)
                dst.at(x, y) = static_cast<std::uint16_t>((2 * sum + n) / (2 * n));
            }
        }
    }
    return out;
}

double normalize_sample(std::uint16_t sample, int bit_depth) {
    const double max = static_cast<double>((1u << bit_depth) - 1);
    return 2.0 * sample / max - 1.0;
}

std::uint16_t denormalize_sample(double value, int bit_depth) {
    const double max = static_cast<double>((1u << bit_depth) - 1);
    const double s = std::round((value + 1.0) * 0.5 * max);
    if (!(s > 0.0)) return 0;
    if (s > max) return static_cast<std::uint16_t>(max);
    return static_cast<std::uint16_t>(s);
}

static Block cut_block(const Frame& f444, int x0, int y0, int size) {
    Block b{size, std::vector<double>(3 * static_cast<std::size_t>(size) * size)};
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                b.at(c, x, y) = normalize_sample(f444.planes[c].at(x0 + x, y0 + y), f444.bit_depth);
    return b;
}

std::vector<BlockPair> extract_blocks(const Frame& lo, const Frame& hi, int size, int count,
                                      std::uint64_t seed) {
    if (lo.width != hi.width || lo.height != hi.height)
        throw Error("extract_blocks: input and target frames differ in size");
    if (size <= 0 || size > lo.width || size > lo.height)
        throw Error("extract_blocks: block size " + std::to_string(size) + " exceeds frame dims " +
                    std::to_string(lo.width) + "x" + std::to_string(lo.height));
    const Frame lo444 = to_444(lo);
    const Frame hi444 = to_444(hi);
    CounterRng rng(seed);
    const auto span_x = static_cast<std::uint64_t>(lo.width - size + 1);
    const auto span_y = static_cast<std::uint64_t>(lo.height - size + 1);
    std::vector<BlockPair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int x = static_cast<int>(rng.next_below(span_x));
        const int y = static_cast<int>(rng.next_below(span_y));
        pairs.push_back({cut_block(lo444, x, y, size), cut_block(hi444, x, y, size), x, y});
    }
    return pairs;
}

Block rotate_block(const Block& block, int k) {
    k = ((k % 4) + 4) % 4;
    Block cur = block;
    const int n = block.size;
    for (int r = 0; r < k; ++r) {
        Block next{n, std::vector<double>(cur.samples.size())};
        // counter-clockwise: the right column becomes the top row
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < n; ++y)
                for (int x = 0; x < n; ++x) next.at(c, x, y) = cur.at(c, n - 1 - y, x);
        cur = std::move(next);
    }
    return cur;
}

BlockPair augment_rotate(const BlockPair& pair, int k) {
    return {rotate_block(pair.input, k), rotate_block(pair.target, k), pair.x, pair.y};
}

}  // namespace sradapt
