#include <gtest/gtest.h>

#include <fstream>

#include "sradapt/checkpoint.hpp"
#include "sradapt/enhance.hpp"
#include "sradapt/error.hpp"
#include "sradapt/networks.hpp"
#include "sradapt/resample.hpp"
#include "support.hpp"

using namespace sradapt;
using namespace sradapt::testing;

namespace {

// Walks the documented layer list, independent of the network code.
std::size_t generator_param_oracle(int blocks, int c) {
    auto conv = [](std::size_t in, std::size_t out) { return out * in * 9 + out; };
    std::size_t n = conv(3, c) + c;  // stem conv + PReLU slopes
    for (int b = 0; b < blocks; ++b) n += conv(c, c) + c + conv(c, c);
    n += conv(c, 3);
    return n;
}

int extent_oracle(int e, const std::vector<int>& strides) {
    e = (e + 2 * 1 - 3) / 1 + 1;  // stem
    for (const int s : strides) e = (e + 2 * 1 - 3) / s + 1;
    return e;
}

ModelBundle small_bundle(int band, bool with_disc, std::uint64_t seed) {
    GeneratorConfig gc{2, 4};
    ModelBundle b{band, Generator(gc, seed), std::nullopt};
    if (with_disc) {
        DiscriminatorConfig dc;
        dc.stem_channels = 2;
        dc.conv_specs = {{2, 2}, {3, 1}, {3, 2}, {4, 1}, {4, 2}, {5, 1}, {5, 2}};
        dc.dense_width = 6;
        Discriminator d(dc, seed + 1);
        d.set_input_extent(32);
        b.discriminator = std::move(d);
    }
    return b;
}

}  // namespace

TEST(Generator, ShapeContract) {
    const Generator g(GeneratorConfig{2, 8}, 1);
    const Tensor out = g.forward(random_tensor({1, 3, 96, 96}, 2, -1, 1, false));
    EXPECT_EQ(out.shape(), (Shape{1, 3, 96, 96}));
    const Tensor out2 = g.forward(random_tensor({2, 3, 20, 13}, 2, -1, 1, false));
    EXPECT_EQ(out2.shape(), (Shape{2, 3, 20, 13}));
}

TEST(Generator, ZeroResidualIsExactIdentity) {
    Generator g(GeneratorConfig{3, 8}, 5);
    g.zero_residual();
    const Tensor x = random_tensor({2, 3, 24, 24}, 6, -1, 1, false);
    const Tensor y = g.forward(x);
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(y.values()[i], x.values()[i]);
}

TEST(Generator, ParameterCount) {
    const Generator full(GeneratorConfig{}, 0);
    const std::size_t expected = 3 * 64 * 9 + 64 + 64 + 16 * (2 * (64 * 64 * 9 + 64) + 64) + 64 * 3 * 9 + 3;
    EXPECT_EQ(generator_param_oracle(16, 64), expected);
    EXPECT_EQ(full.parameters().trainable_count(), expected);
    EXPECT_EQ(Generator(GeneratorConfig{2, 16}, 0).parameters().trainable_count(), generator_param_oracle(2, 16));
}

TEST(Generator, SeedDeterminesWeights) {
    const Generator a(GeneratorConfig{1, 4}, 9), b(GeneratorConfig{1, 4}, 9), c(GeneratorConfig{1, 4}, 10);
    const auto& wa = a.parameters().tensor(0);
    EXPECT_TRUE(std::equal(wa.values().begin(), wa.values().end(), b.parameters().tensor(0).values().begin()));
    EXPECT_FALSE(std::equal(wa.values().begin(), wa.values().end(), c.parameters().tensor(0).values().begin()));
    for (const double v : wa.values()) EXPECT_LE(std::abs(v), 2 * kInitStddev);
}

TEST(Generator, InvalidConfig) {
    EXPECT_THROW(Generator(GeneratorConfig{0, 4}), Error);
    EXPECT_THROW(Generator(GeneratorConfig{1, 0}), Error);
}

TEST(Discriminator, DefaultSpecExtent) {
    const DiscriminatorConfig dc;
    std::vector<int> strides;
    for (const auto& s : dc.conv_specs) strides.push_back(s.stride);
    EXPECT_EQ(strides, (std::vector<int>{2, 1, 2, 1, 2, 1, 2}));
    EXPECT_EQ(extent_oracle(96, strides), 6);
    EXPECT_EQ(dc.pre_dense_extent(96), 6);
    EXPECT_EQ(dc.conv_specs.front().out_channels, 64);
    EXPECT_EQ(dc.conv_specs.back().out_channels, 512);
}

TEST(Discriminator, DefaultSpecScoresPerItem) {
    Discriminator d(DiscriminatorConfig{}, 3);
    const Tensor one = d.forward(random_tensor({1, 3, 96, 96}, 1, -1, 1, false), BatchNormMode::kTrain);
    EXPECT_EQ(one.shape(), (Shape{1, 1}));
    const Tensor two = d.forward(random_tensor({2, 3, 96, 96}, 2, -1, 1, false), BatchNormMode::kTrain);
    EXPECT_EQ(two.shape(), (Shape{2, 1}));
    const Parameter* dense1 = d.parameters().find("discriminator.dense1.weight");
    ASSERT_NE(dense1, nullptr);
    EXPECT_EQ(dense1->tensor.shape(), (Shape{1024, 512 * 6 * 6}));
}

TEST(Discriminator, ConfigValidation) {
    DiscriminatorConfig dc;
    dc.conv_specs.pop_back();
    EXPECT_THROW(Discriminator(dc, 0), Error);
    dc = DiscriminatorConfig{};
    dc.conv_specs[2].stride = 3;
    EXPECT_THROW(Discriminator(dc, 0), Error);
    dc = DiscriminatorConfig{};
    dc.conv_specs[3].out_channels = 32;
    EXPECT_THROW(Discriminator(dc, 0), Error);
}

TEST(Discriminator, CollapsedExtentRejected) {
    DiscriminatorConfig dc;
    dc.stem_channels = 1;
    dc.conv_specs = {{1, 2}, {1, 2}, {1, 2}, {1, 2}, {1, 2}, {1, 2}, {1, 2}};
    // padded 3x3 stride-2 convolutions never reach 0 from a positive extent
    EXPECT_EQ(dc.pre_dense_extent(96), 1);
    EXPECT_EQ(dc.pre_dense_extent(1), 1);
    Discriminator d(dc, 0);
    EXPECT_THROW(d.set_input_extent(0), Error);
}

TEST(QpModelSelector, PaperQpsMapToBands) {
    const QpModelSelector sel;
    EXPECT_EQ(sel.band_for_base(22), 1);
    EXPECT_EQ(sel.band_for_base(27), 2);
    EXPECT_EQ(sel.band_for_base(32), 3);
    EXPECT_EQ(sel.band_for_base(37), 4);
    EXPECT_EQ(sel.band_for_base(29), 2);
}

TEST(QpModelSelector, BoundariesBothSides) {
    const QpModelSelector sel;
    EXPECT_EQ(sel.band_for_adjusted(18.5), 1);
    EXPECT_EQ(sel.band_for_adjusted(18.5 + 1e-9), 2);
    EXPECT_EQ(sel.band_for_adjusted(23.5), 2);
    EXPECT_EQ(sel.band_for_adjusted(23.5 + 1e-9), 3);
    EXPECT_EQ(sel.band_for_adjusted(28.5), 3);
    EXPECT_EQ(sel.band_for_adjusted(28.5 + 1e-9), 4);
    EXPECT_EQ(sel.band_for_adjusted(-100), 1);
    EXPECT_EQ(sel.band_for_adjusted(100), 4);
    // piecewise constant with exactly three change points over integer QPs
    int changes = 0;
    for (int qp = -10; qp < 70; ++qp) changes += sel.band_for_base(qp) != sel.band_for_base(qp + 1);
    EXPECT_EQ(changes, 3);
}

TEST(SelectModel, RoutesAndRejectsMissingBand) {
    std::vector<ModelBundle> bundles;
    for (int band = 1; band <= 4; ++band) bundles.push_back(small_bundle(band, false, band));
    EXPECT_EQ(select_model(22, bundles).qp_band, 1);
    EXPECT_EQ(select_model(37, bundles).qp_band, 4);
    bundles.pop_back();
    EXPECT_THROW(select_model(37, bundles), Error);
}

TEST(Checkpoint, RoundTripBitExact) {
    TempDir dir("ckpt");
    for (const bool with_disc : {false, true}) {
        const ModelBundle b = small_bundle(3, with_disc, 42);
        save_checkpoint(b, dir / "m.ckpt");
        const ModelBundle r = load_checkpoint(dir / "m.ckpt");
        EXPECT_EQ(r.qp_band, 3);
        EXPECT_EQ(r.generator.config(), b.generator.config());
        ASSERT_EQ(r.generator.parameters().size(), b.generator.parameters().size());
        for (std::size_t i = 0; i < b.generator.parameters().size(); ++i) {
            EXPECT_EQ(r.generator.parameters()[i].name, b.generator.parameters()[i].name);
            const auto x = b.generator.parameters().tensor(i).values();
            const auto y = r.generator.parameters().tensor(i).values();
            ASSERT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end()));
        }
        ASSERT_EQ(r.discriminator.has_value(), with_disc);
        if (with_disc) {
            EXPECT_EQ(r.discriminator->config(), b.discriminator->config());
            EXPECT_EQ(r.discriminator->input_extent(), 32);
            for (std::size_t i = 0; i < b.discriminator->parameters().size(); ++i) {
                const auto& p = b.discriminator->parameters()[i];
                const auto& q = r.discriminator->parameters()[i];
                EXPECT_EQ(p.name, q.name);
                EXPECT_EQ(p.trainable, q.trainable);
                ASSERT_TRUE(std::equal(p.tensor.values().begin(), p.tensor.values().end(), q.tensor.values().begin()));
            }
        }
        // saving the loaded bundle reproduces the file byte for byte
        save_checkpoint(r, dir / "again.ckpt");
        std::ifstream f1(dir / "m.ckpt", std::ios::binary), f2(dir / "again.ckpt", std::ios::binary);
        EXPECT_EQ(std::string(std::istreambuf_iterator<char>(f1), {}), std::string(std::istreambuf_iterator<char>(f2), {}));
    }
}

TEST(Checkpoint, TruncatedFileFailsChecksum) {
    TempDir dir("ckpt");
    save_checkpoint(small_bundle(1, false, 1), dir / "m.ckpt");
    const auto size = std::filesystem::file_size(dir / "m.ckpt");
    std::filesystem::resize_file(dir / "m.ckpt", size - 16);
    try {
        load_checkpoint(dir / "m.ckpt");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos) << e.what();
    }
}

TEST(Checkpoint, CorruptedDataFailsChecksum) {
    TempDir dir("ckpt");
    save_checkpoint(small_bundle(1, false, 1), dir / "m.ckpt");
    std::fstream f(dir / "m.ckpt", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-3, std::ios::end);
    f.put('\x7f');
    f.close();
    EXPECT_THROW(load_checkpoint(dir / "m.ckpt"), Error);
}

TEST(Checkpoint, MismatchedConfigNamesParameter) {
    TempDir dir("ckpt");
    save_checkpoint(small_bundle(1, false, 1), dir / "m.ckpt");
    try {
        load_checkpoint(dir / "m.ckpt", GeneratorConfig{2, 5});
        FAIL();
    } catch (const Error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("shape mismatch"), std::string::npos) << msg;
        EXPECT_NE(msg.find("generator.stem.conv.weight"), std::string::npos) << msg;
    }
}

TEST(Checkpoint, VersionMismatch) {
    TempDir dir("ckpt");
    save_checkpoint(small_bundle(1, false, 1), dir / "m.ckpt");
    std::ifstream in(dir / "m.ckpt", std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), {});
    in.close();
    s.replace(s.find("version 1"), 9, "version 7");
    std::ofstream(dir / "v.ckpt", std::ios::binary) << s;
    try {
        load_checkpoint(dir / "v.ckpt");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
    }
}

TEST(Enhance, ZeroResidualEqualsNearestNeighbour) {
    ModelBundle b = small_bundle(1, false, 3);
    b.generator.zero_residual();
    const Frame lo = random_frame({20, 14, 10, ChromaFormat::k420}, 4);
    const Frame out = enhance_frame(lo, b, {16, 4});
    EXPECT_EQ(out, to_420(to_444(upsample_nn_2x(lo))));
    EXPECT_EQ(out, upsample_nn_2x(lo));
}

TEST(Enhance, TiledMatchesWholeImage) {
    const Generator g(GeneratorConfig{2, 4}, 7);
    const Tensor img = random_tensor({1, 3, 45, 38}, 8, -1, 1, false);
    NoGradGuard guard;
    const Tensor whole = g.forward(img);
    for (const auto& opt : {TileOptions{16, 4}, TileOptions{20, 10}, TileOptions{96, 16}, TileOptions{13, 0}}) {
        const Tensor tiled = run_tiled(g, img, opt);
        ASSERT_EQ(tiled.shape(), whole.shape());
        double worst = 0;
        for (std::size_t i = 0; i < whole.size(); ++i)
            worst = std::max(worst, std::abs(tiled.values()[i] - whole.values()[i]));
        EXPECT_LE(worst, 1e-6) << opt.tile << "/" << opt.overlap;
    }
}

TEST(Enhance, TileSmallerThanTwiceOverlapRejected) {
    const Generator g(GeneratorConfig{1, 2}, 1);
    EXPECT_THROW(enhance_frame(Frame({8, 8, 8, ChromaFormat::k420}), g, {16, 9}), Error);
}

TEST(Enhance, DimensionContract) {
    const Generator g(GeneratorConfig{1, 1}, 1);
    const Frame out = enhance_frame(Frame({960, 540, 10, ChromaFormat::k420}, 512), g, {96, 16});
    EXPECT_EQ(out.width, 1920);
    EXPECT_EQ(out.height, 1080);
    EXPECT_EQ(out.format, ChromaFormat::k420);
    EXPECT_EQ(out.bit_depth, 10);
}
