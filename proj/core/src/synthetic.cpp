#include "sradapt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sradapt/rng.hpp"

namespace sradapt {

namespace {

struct Grating {
    double fx, fy, phase, amplitude;
};

struct Disc {
    double cx, cy, radius, level;
};

}  // namespace

std::vector<Frame> synthetic_clip(const Geometry& g, int frames, std::uint64_t seed) {
    CounterRng rng(seed);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_unit(); };
    std::vector<Grating> luma(6), chroma(4);
    for (auto& gr : luma) {
        const double angle = uniform(0.0, std::numbers::pi);
        const double freq = uniform(0.01, 0.16);  // cycles per pixel
        // roughly 1/f amplitude spectrum, as in natural images
        const double amplitude = std::min(0.12, uniform(0.5, 1.0) * 0.004 / freq);
        gr = {freq * std::cos(angle), freq * std::sin(angle), uniform(0.0, 2 * std::numbers::pi), amplitude};
    }
    for (auto& gr : chroma) {
        const double angle = uniform(0.0, std::numbers::pi);
        const double freq = uniform(0.01, 0.08);
        gr = {freq * std::cos(angle), freq * std::sin(angle), uniform(0.0, 2 * std::numbers::pi), uniform(0.05, 0.15)};
    }
    std::vector<Disc> discs(5);
    for (auto& d : discs)
        d = {uniform(0.0, g.width), uniform(0.0, g.height), uniform(0.05, 0.2) * std::min(g.width, g.height),
             uniform(-0.25, 0.25)};
    const double vx = uniform(-1.5, 1.5), vy = uniform(-1.5, 1.5);

    const double max = static_cast<double>((1 << g.bit_depth) - 1);
    auto to_sample = [&](double v) {
        return static_cast<std::uint16_t>(std::clamp(std::round(v * max), 0.0, max));
    };
    std::vector<Frame> clip;
    for (int t = 0; t < frames; ++t) {
        Frame f(g);
        const double ox = vx * t, oy = vy * t;
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                const double px = x + ox, py = y + oy;
                double v = 0.45 + 0.15 * px / g.width;
                for (const auto& gr : luma)
                    v += gr.amplitude * std::sin(2 * std::numbers::pi * (gr.fx * px + gr.fy * py) + gr.phase);
                for (const auto& d : discs) {
                    const double dx = px - d.cx, dy = py - d.cy;
                    if (dx * dx + dy * dy < d.radius * d.radius) v += d.level;
                }
                f.planes[0].at(x, y) = to_sample(v);
            }
        for (int p = 1; p < 3; ++p) {
            Plane& pl = f.planes[p];
            const double sx = static_cast<double>(g.width) / pl.width, sy = static_cast<double>(g.height) / pl.height;
            for (int y = 0; y < pl.height; ++y)
                for (int x = 0; x < pl.width; ++x) {
                    const double px = x * sx + ox, py = y * sy + oy;
                    double v = 0.5;
                    for (std::size_t i = 0; i < chroma.size(); ++i) {
                        const auto& gr = chroma[i];
                        const double sign = (static_cast<int>(i) + p) % 2 == 0 ? 1.0 : -1.0;
                        v += sign * gr.amplitude *
                             std::sin(2 * std::numbers::pi * (gr.fx * px + gr.fy * py) + gr.phase);
                    }
                    pl.at(x, y) = to_sample(v);
                }
        }
        clip.push_back(std::move(f));
    }
    return clip;
}

}  // namespace sradapt
