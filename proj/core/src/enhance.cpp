#include "sradapt/enhance.hpp"

#include <algorithm>

#include "sradapt/error.hpp"
#include "sradapt/resample.hpp"

namespace sradapt {

namespace {

struct Span {
    int start, length;
};

std::vector<Span> tile_spans(int extent, int tile, int overlap) {
    if (tile >= extent) return {{0, extent}};
    std::vector<Span> spans;
    const int step = tile - overlap;
    for (int s = 0;; s += step) {
        if (s + tile >= extent) {
            spans.push_back({extent - tile, tile});
            break;
        }
        spans.push_back({s, tile});
    }
    return spans;
}

// Blending weight of position p inside span i of `spans`.
double ramp(const std::vector<Span>& spans, std::size_t i, int p, int overlap) {
    double w = 1.0;
    const Span& s = spans[i];
    if (overlap == 0) return w;
    if (i > 0) w = std::min(w, (p - s.start + 0.5) / overlap);
    if (i + 1 < spans.size()) w = std::min(w, (s.start + s.length - p - 0.5) / overlap);
    return std::max(w, 0.0);
}

}  // namespace

Tensor frame_to_tensor(const Frame& f) {
    if (f.format != ChromaFormat::k444) throw Error("frame_to_tensor: expected a 4:4:4 frame");
    const std::size_t plane = static_cast<std::size_t>(f.width) * f.height;
    std::vector<double> v(3 * plane);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < plane; ++i) v[c * plane + i] = normalize_sample(f.planes[c].samples[i], f.bit_depth);
    return Tensor::from({1, 3, f.height, f.width}, std::move(v));
}

Frame tensor_to_frame(const Tensor& image, int bit_depth) {
    Frame f(Geometry{image.dim(3), image.dim(2), bit_depth, ChromaFormat::k444});
    const std::size_t plane = static_cast<std::size_t>(f.width) * f.height;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < plane; ++i)
            f.planes[c].samples[i] = denormalize_sample(image.values()[c * plane + i], bit_depth);
    return f;
}

Tensor run_tiled(const Generator& generator, const Tensor& image, const TileOptions& options) {
    if (options.tile <= 0 || options.overlap < 0) throw Error("enhance: tile must be positive and overlap nonnegative");
    if (options.tile < 2 * options.overlap)
        throw Error("enhance: tile " + std::to_string(options.tile) + " is smaller than 2x overlap " +
                    std::to_string(options.overlap));
    if (image.rank() != 4 || image.dim(0) != 1) throw Error("enhance: expected a (1,C,H,W) image");
    NoGradGuard no_grad;
    const int c = image.dim(1), h = image.dim(2), w = image.dim(3);
    const int margin = generator.receptive_radius();
    const auto rows = tile_spans(h, options.tile, options.overlap);
    const auto cols = tile_spans(w, options.tile, options.overlap);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::vector<double> acc(c * plane, 0.0), weight(plane, 0.0);
    const auto src = image.values();

    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        for (std::size_t ci = 0; ci < cols.size(); ++ci) {
            const Span r = rows[ri], q = cols[ci];
            const int y0 = std::max(0, r.start - margin), y1 = std::min(h, r.start + r.length + margin);
            const int x0 = std::max(0, q.start - margin), x1 = std::min(w, q.start + q.length + margin);
            const int th = y1 - y0, tw = x1 - x0;
            std::vector<double> crop(static_cast<std::size_t>(c) * th * tw);
            for (int ch = 0; ch < c; ++ch)
                for (int y = 0; y < th; ++y)
                    std::copy_n(src.data() + ch * plane + static_cast<std::size_t>(y0 + y) * w + x0, tw,
                                crop.data() + (static_cast<std::size_t>(ch) * th + y) * tw);
            const Tensor out = generator.forward(Tensor::from({1, c, th, tw}, std::move(crop)));
            const auto o = out.values();
            for (int y = r.start; y < r.start + r.length; ++y) {
                const double wy = ramp(rows, ri, y, options.overlap);
                for (int x = q.start; x < q.start + q.length; ++x) {
                    const double wt = wy * ramp(cols, ci, x, options.overlap);
                    const std::size_t dst = static_cast<std::size_t>(y) * w + x;
                    weight[dst] += wt;
                    for (int ch = 0; ch < c; ++ch)
                        acc[ch * plane + dst] +=
                            wt * o[(static_cast<std::size_t>(ch) * th + (y - y0)) * tw + (x - x0)];
                }
            }
        }
    }
    for (int ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < plane; ++i) acc[ch * plane + i] /= weight[i];
    return Tensor::from({1, c, h, w}, std::move(acc));
}

Frame enhance_frame(const Frame& decoded_lo, const Generator& generator, const TileOptions& options) {
    if (options.tile < 2 * options.overlap)
        throw Error("enhance: tile " + std::to_string(options.tile) + " is smaller than 2x overlap " +
                    std::to_string(options.overlap));
    const Frame up = to_444(upsample_nn_2x(decoded_lo));
    const Tensor restored = run_tiled(generator, frame_to_tensor(up), options);
    Frame out = tensor_to_frame(restored, decoded_lo.bit_depth);
    return decoded_lo.format == ChromaFormat::k420 ? to_420(out) : out;
}

Frame enhance_frame(const Frame& decoded_lo, const ModelBundle& bundle, const TileOptions& options) {
    return enhance_frame(decoded_lo, bundle.generator, options);
}

}  // namespace sradapt
