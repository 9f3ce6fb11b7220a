#include "sradapt/codec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sradapt/error.hpp"

namespace sradapt {

namespace {

// Orthonormal DCT-II basis, basis[k][n].
std::vector<double> dct_basis(int n) {
    std::vector<double> b(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int i = 0; i < n; ++i)
            b[static_cast<std::size_t>(k) * n + i] = scale * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    }
    return b;
}

int mirror(int i, int n) {
    // symmetric extension: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

std::int64_t code_plane(const Plane& src, Plane& dst, int bs, double step, int bit_depth,
                        const std::vector<double>& basis) {
    const double mid = static_cast<double>(1 << (bit_depth - 1));
    const double max = static_cast<double>((1 << bit_depth) - 1);
    const int bw = (src.width + bs - 1) / bs, bh = (src.height + bs - 1) / bs;
    std::vector<double> block(bs * bs), tmp(bs * bs), coef(bs * bs);
    std::int64_t bits = 0;
    auto B = [&](int k, int i) { return basis[static_cast<std::size_t>(k) * bs + i]; };
    for (int by = 0; by < bh; ++by)
        for (int bx = 0; bx < bw; ++bx) {
            for (int y = 0; y < bs; ++y)
                for (int x = 0; x < bs; ++x)
                    block[y * bs + x] =
                        src.at(mirror(bx * bs + x, src.width), mirror(by * bs + y, src.height)) - mid;
            // forward: C = B X B^T
            for (int k = 0; k < bs; ++k)
                for (int x = 0; x < bs; ++x) {
                    double acc = 0.0;
                    for (int y = 0; y < bs; ++y) acc += B(k, y) * block[y * bs + x];
                    tmp[k * bs + x] = acc;
                }
            for (int k = 0; k < bs; ++k)
                for (int l = 0; l < bs; ++l) {
                    double acc = 0.0;
                    for (int x = 0; x < bs; ++x) acc += tmp[k * bs + x] * B(l, x);
                    coef[k * bs + l] = acc;
                }
            for (auto& c : coef) {
                const auto q = static_cast<std::int64_t>(std::round(c / step));
                bits += signed_exp_golomb_length(q);
                c = static_cast<double>(q) * step;
            }
            // inverse: X = B^T C B
            for (int y = 0; y < bs; ++y)
                for (int l = 0; l < bs; ++l) {
                    double acc = 0.0;
                    for (int k = 0; k < bs; ++k) acc += B(k, y) * coef[k * bs + l];
                    tmp[y * bs + l] = acc;
                }
            for (int y = 0; y < bs; ++y)
                for (int x = 0; x < bs; ++x) {
                    const int px = bx * bs + x, py = by * bs + y;
                    if (px >= dst.width || py >= dst.height) continue;
                    double acc = 0.0;
                    for (int l = 0; l < bs; ++l) acc += tmp[y * bs + l] * B(l, x);
                    dst.at(px, py) = static_cast<std::uint16_t>(std::clamp(std::round(acc + mid), 0.0, max));
                }
        }
    return bits;
}

}  // namespace

double rate_kbps(std::int64_t bits, double fps, std::size_t frame_count) {
    if (frame_count == 0) throw Error("rate of an empty sequence");
    return static_cast<double>(bits) * fps / (1000.0 * static_cast<double>(frame_count));
}

double CodedResult::rate_kbps() const { return sradapt::rate_kbps(bits, fps, decoded.size()); }

double quantizer_step(int qp) { return std::pow(2.0, (qp - 4) / 6.0); }

int signed_exp_golomb_length(std::int64_t v) {
    const std::uint64_t k = v > 0 ? 2 * static_cast<std::uint64_t>(v) - 1 : 2 * static_cast<std::uint64_t>(-v);
    int msb = 0;
    for (std::uint64_t t = k + 1; t > 1; t >>= 1) ++msb;
    return 2 * msb + 1;
}

CodedResult toy_encode_decode(const std::vector<Frame>& frames, const ToyCodecConfig& config, double fps) {
    if (config.effective_qp() < 0)
        throw Error("toy codec: effective QP " + std::to_string(config.effective_qp()) + " is negative");
    if (config.block_size < 2) throw Error("toy codec: block size must be >= 2");
    const double step = quantizer_step(config.effective_qp());
    const auto basis = dct_basis(config.block_size);
    CodedResult result;
    result.fps = fps;
    for (const auto& f : frames) {
        validate_frame(f);
        Frame out(f.geometry());
        for (int p = 0; p < 3; ++p)
            result.bits += code_plane(f.planes[p], out.planes[p], config.block_size, step, f.bit_depth, basis);
        result.decoded.push_back(std::move(out));
    }
    return result;
}

std::vector<std::int64_t> read_frame_bits(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open rate file " + path.string());
    std::vector<std::int64_t> bits;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        long long index = 0, value = 0;
        if (!(ls >> index)) continue;
        if (!(ls >> value) || value < 0)
            throw Error("rate file " + path.string() + ":" + std::to_string(line_no) + ": expected 'frame_index bits'");
        if (index != static_cast<long long>(bits.size()))
            throw Error("rate file " + path.string() + ":" + std::to_string(line_no) + ": frame indices must be consecutive from 0");
        bits.push_back(value);
    }
    return bits;
}

CodedResult ingest_external(const std::filesystem::path& decoded_path, const Geometry& geometry,
                            std::int64_t total_bits, double fps) {
    if (total_bits < 0) throw Error("ingest: negative bit count");
    CodedResult r;
    r.decoded = read_yuv(decoded_path, geometry);
    if (r.decoded.empty()) throw Error("ingest: " + decoded_path.string() + " holds no frames");
    r.bits = total_bits;
    r.fps = fps;
    return r;
}

CodedResult ingest_external(const std::filesystem::path& decoded_path, const Geometry& geometry,
                            const std::filesystem::path& frame_bits_path, double fps) {
    const auto per_frame = read_frame_bits(frame_bits_path);
    std::int64_t total = 0;
    for (const auto b : per_frame) total += b;
    CodedResult r = ingest_external(decoded_path, geometry, total, fps);
    if (per_frame.size() != r.decoded.size())
        throw Error("ingest: rate file lists " + std::to_string(per_frame.size()) + " frames, decoded file holds " +
                    std::to_string(r.decoded.size()));
    return r;
}

}  // namespace sradapt
