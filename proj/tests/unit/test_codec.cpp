#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "sradapt/codec.hpp"
#include "sradapt/error.hpp"
#include "sradapt/evaluation.hpp"
#include "sradapt/rng.hpp"
#include "sradapt/synthetic.hpp"
#include "support.hpp"

using namespace sradapt;
using namespace sradapt::testing;

namespace {

double mse_all(const std::vector<Frame>& a, const std::vector<Frame>& b) {
    double s = 0;
    std::size_t n = 0;
    for (std::size_t f = 0; f < a.size(); ++f)
        for (int p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < a[f].planes[p].samples.size(); ++i) {
                const double d = double(a[f].planes[p].samples[i]) - b[f].planes[p].samples[i];
                s += d * d;
                ++n;
            }
    return s / n;
}

int max_abs_diff(const Frame& a, const Frame& b) {
    int m = 0;
    for (int p = 0; p < 3; ++p)
        for (std::size_t i = 0; i < a.planes[p].samples.size(); ++i)
            m = std::max(m, std::abs(int(a.planes[p].samples[i]) - int(b.planes[p].samples[i])));
    return m;
}

}  // namespace

TEST(ToyCodec, QuantizerStepLaw) {
    EXPECT_DOUBLE_EQ(quantizer_step(4), 1.0);
    EXPECT_DOUBLE_EQ(quantizer_step(22), 8.0);
    EXPECT_DOUBLE_EQ(quantizer_step(28), 16.0);
    for (int qp = 0; qp < 50; ++qp) EXPECT_NEAR(quantizer_step(qp + 6), 2 * quantizer_step(qp), 1e-12);
}

TEST(ToyCodec, ExpGolombLengths) {
    const std::vector<std::pair<int, int>> cases{{0, 1}, {1, 3}, {-1, 3}, {2, 5}, {-2, 5}, {3, 5}, {4, 7}, {-4, 7}};
    for (const auto& [v, len] : cases) EXPECT_EQ(signed_exp_golomb_length(v), len) << v;
}

TEST(ToyCodec, IntegerCoefficientsRoundTripAtStepOne) {
    // Planes synthesized from integer DCT coefficients per 8x8 block.
    Frame f({16, 16, 8, ChromaFormat::k444});
    sradapt::CounterRng rng(3);
    for (auto& p : f.planes)
        for (int by = 0; by < 2; ++by)
            for (int bx = 0; bx < 2; ++bx) {
                double c[8][8] = {};
                for (auto& row : c)
                    for (auto& v : row) v = static_cast<double>(static_cast<int>(rng.next_below(9)) - 4);
                c[0][0] = 40;
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x) {
                        double acc = 0;
                        for (int k = 0; k < 8; ++k)
                            for (int l = 0; l < 8; ++l) {
                                const double bk = std::sqrt((k == 0 ? 1.0 : 2.0) / 8) *
                                                  std::cos(std::numbers::pi * (2 * y + 1) * k / 16.0);
                                const double bl = std::sqrt((l == 0 ? 1.0 : 2.0) / 8) *
                                                  std::cos(std::numbers::pi * (2 * x + 1) * l / 16.0);
                                acc += c[k][l] * bk * bl;
                            }
                        p.at(bx * 8 + x, by * 8 + y) = static_cast<std::uint16_t>(std::clamp(std::round(acc + 128), 0.0, 255.0));
                    }
            }
    const CodedResult r = toy_encode_decode({f}, {8, 4, 0});
    EXPECT_LE(max_abs_diff(r.decoded[0], f), 1);
}

TEST(ToyCodec, Deterministic) {
    const auto clip = synthetic_clip({40, 24, 8, ChromaFormat::k420}, 2, 4);
    const auto a = toy_encode_decode(clip, {8, 30, -6});
    const auto b = toy_encode_decode(clip, {8, 30, -6});
    EXPECT_EQ(a.decoded, b.decoded);
    EXPECT_EQ(a.bits, b.bits);
    EXPECT_GT(a.bits, 0);
}

TEST(ToyCodec, RdMonotoneOverAdjustedQps) {
    const auto clip = synthetic_clip({64, 64, 8, ChromaFormat::k420}, 2, 5);
    std::int64_t prev_bits = std::numeric_limits<std::int64_t>::max();
    double prev_mse = -1;
    for (const int qp : {16, 21, 26, 31}) {
        const auto r = toy_encode_decode(clip, {8, qp, 0});
        const double mse = mse_all(clip, r.decoded);
        EXPECT_LE(r.bits, prev_bits) << qp;
        EXPECT_GE(mse, prev_mse) << qp;
        prev_bits = r.bits;
        prev_mse = mse;
    }
}

TEST(ToyCodec, RecodingStaysWithinOneStep) {
    const auto clip = synthetic_clip({32, 32, 8, ChromaFormat::k420}, 1, 6);
    for (const int qp : {16, 26, 36}) {
        const auto once = toy_encode_decode(clip, {8, qp, 0});
        const auto twice = toy_encode_decode(once.decoded, {8, qp, 0});
        EXPECT_LE(max_abs_diff(once.decoded[0], twice.decoded[0]), std::ceil(quantizer_step(qp))) << qp;
        EXPECT_LE(mse_all(clip, twice.decoded), mse_all(clip, once.decoded) + quantizer_step(qp) * quantizer_step(qp));
    }
}

TEST(ToyCodec, NonMultipleDimsArePadded) {
    const auto clip = synthetic_clip({22, 14, 10, ChromaFormat::k420}, 1, 7);
    const auto r = toy_encode_decode(clip, {8, 10, 0});
    EXPECT_EQ(r.decoded[0].geometry(), clip[0].geometry());
    EXPECT_LT(mse_all(clip, r.decoded), 4.0);
}

TEST(ToyCodec, NegativeEffectiveQpRejected) { EXPECT_THROW(toy_encode_decode({}, {8, 3, -6}), Error); }

TEST(Rate, Formula) {
    EXPECT_DOUBLE_EQ(rate_kbps(1000000, 50, 64), 781.25);
    CodedResult r;
    r.bits = 1000000;
    r.fps = 50;
    r.decoded.resize(64);
    EXPECT_DOUBLE_EQ(r.rate_kbps(), 781.25);
}

TEST(IngestExternal, PassThroughAndGeometryError) {
    TempDir dir("codec");
    const Geometry g{12, 8, 10, ChromaFormat::k420};
    std::vector<Frame> frames{random_frame(g, 1), random_frame(g, 2)};
    write_yuv(frames, dir / "dec.yuv");
    const auto r = ingest_external(dir / "dec.yuv", g, std::int64_t{123456}, 25.0);
    EXPECT_EQ(r.decoded, frames);
    EXPECT_EQ(r.bits, 123456);
    EXPECT_DOUBLE_EQ(r.rate_kbps(), 123456 * 25.0 / 2000.0);
    EXPECT_THROW(ingest_external(dir / "dec.yuv", {14, 8, 10, ChromaFormat::k420}, std::int64_t{1}, 25.0), Error);

    std::ofstream(dir / "bits.txt") << "# frame bits\n0 1000\n1, 2500\n";
    const auto r2 = ingest_external(dir / "dec.yuv", g, dir / "bits.txt", 30.0);
    EXPECT_EQ(r2.bits, 3500);
    std::ofstream(dir / "short.txt") << "0 1000\n";
    EXPECT_THROW(ingest_external(dir / "dec.yuv", g, dir / "short.txt", 30.0), Error);
}
