#include "sradapt/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sradapt/error.hpp"

namespace sradapt {

namespace {

double sinc(double x) {
    if (x == 0.0) return 1.0;
    if (x == std::floor(x)) return 0.0;  // sin(pi n) is not exactly 0 in floating point
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

DecimationTaps make_taps() {
    DecimationTaps taps;
    constexpr int kTaps = 12;
    const double scale = static_cast<double>(1 << kWeightFractionBits);
    std::vector<std::int64_t> fixed(kTaps);
    double raw_sum = 0.0;
    for (int t = 0; t < kTaps; ++t) {
        const double offset = (taps.first_offset + t - 0.5) / 2.0;
        taps.raw.push_back(lanczos3_kernel(offset));
        raw_sum += taps.raw.back();
    }
    std::int64_t fixed_sum = 0;
    for (int t = 0; t < kTaps; ++t) {
        fixed[t] = std::llround(taps.raw[t] / raw_sum * scale);
        fixed_sum += fixed[t];
    }
    // Push the rounding residue into the two central taps symmetrically (the
    // residue is always even because the weights are mirror-symmetric).
    const std::int64_t residue = (1LL << kWeightFractionBits) - fixed_sum;
    fixed[5] += residue / 2;
    fixed[6] += residue - residue / 2;
    for (const auto w : fixed) taps.weights.push_back(static_cast<double>(w) / scale);
    return taps;
}

// 1-D decimation of n samples read through `get`, returning ceil(n/2) values.
template <typename Get>
void decimate_line(int n, Get get, double* out) {
    const auto& taps = decimation_taps();
    const int out_n = (n + 1) / 2;
    for (int k = 0; k < out_n; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t < taps.weights.size(); ++t) {
            const int i = std::clamp(2 * k + taps.first_offset + static_cast<int>(t), 0, n - 1);
            acc += taps.weights[t] * get(i);
        }
        out[k] = acc;
    }
}

std::uint16_t round_clip(double v, int bit_depth) {
    const double max = static_cast<double>((1u << bit_depth) - 1);
    const double r = std::round(v);  // half away from zero
    return static_cast<std::uint16_t>(std::clamp(r, 0.0, max));
}

}  // namespace

double lanczos3_kernel(double x) {
    if (std::abs(x) >= 3.0) return 0.0;
    return sinc(x) * sinc(x / 3.0);
}

const DecimationTaps& decimation_taps() {
    static const DecimationTaps taps = make_taps();
    return taps;
}

Plane downsample_plane_2x(const Plane& plane, int bit_depth, PassOrder order) {
    const int w = plane.width;
    const int h = plane.height;
    const int ow = (w + 1) / 2;
    const int oh = (h + 1) / 2;
    std::vector<double> result(static_cast<std::size_t>(ow) * oh);
    if (order == PassOrder::kRowsFirst) {
        std::vector<double> tmp(static_cast<std::size_t>(ow) * h);  // (ow x h)
        for (int y = 0; y < h; ++y)
            decimate_line(w, [&](int i) { return static_cast<double>(plane.at(i, y)); },
                          &tmp[static_cast<std::size_t>(y) * ow]);
        std::vector<double> col(oh);
        for (int x = 0; x < ow; ++x) {
            decimate_line(h, [&](int i) { return tmp[static_cast<std::size_t>(i) * ow + x]; },
                          col.data());
            for (int y = 0; y < oh; ++y) result[static_cast<std::size_t>(y) * ow + x] = col[y];
        }
    } else {
        std::vector<double> tmp(static_cast<std::size_t>(w) * oh);  // (w x oh), column-major
        for (int x = 0; x < w; ++x)
            decimate_line(h, [&](int i) { return static_cast<double>(plane.at(x, i)); },
                          &tmp[static_cast<std::size_t>(x) * oh]);
        std::vector<double> row(ow);
        for (int y = 0; y < oh; ++y) {
            decimate_line(w, [&](int i) { return tmp[static_cast<std::size_t>(i) * oh + y]; },
                          row.data());
            for (int x = 0; x < ow; ++x) result[static_cast<std::size_t>(y) * ow + x] = row[x];
        }
    }
    Plane out(ow, oh);
    for (std::size_t i = 0; i < result.size(); ++i) out.samples[i] = round_clip(result[i], bit_depth);
    return out;
}

Frame downsample_2x(const Frame& frame) {
    if (frame.width % 2 != 0 || frame.height % 2 != 0)
        throw Error("downsample_2x: odd frame dimensions " + std::to_string(frame.width) + "x" +
                    std::to_string(frame.height));
    Frame out(Geometry{frame.width / 2, frame.height / 2, frame.bit_depth, frame.format});
    for (int p = 0; p < 3; ++p) {
        Plane d = downsample_plane_2x(frame.planes[p], frame.bit_depth);
        // For 4:2:0 with odd chroma extent the decimated chroma may be one sample
        // wider than the target frame requires; crop to the legal chroma dims.
        Plane& dst = out.planes[p];
        for (int y = 0; y < dst.height; ++y)
            for (int x = 0; x < dst.width; ++x) dst.at(x, y) = d.at(x, y);
    }
    return out;
}

Plane upsample_plane_nn_2x(const Plane& plane) {
    Plane out(plane.width * 2, plane.height * 2);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(x, y) = plane.at(x / 2, y / 2);
    return out;
}

Frame upsample_nn_2x(const Frame& frame) {
    Frame out(Geometry{frame.width * 2, frame.height * 2, frame.bit_depth, frame.format});
    for (int p = 0; p < 3; ++p) {
        const Plane& src = frame.planes[p];
        Plane& dst = out.planes[p];
        for (int y = 0; y < dst.height; ++y)
            for (int x = 0; x < dst.width; ++x) dst.at(x, y) = src.at(x / 2, y / 2);
    }
    return out;
}

}  // namespace sradapt
