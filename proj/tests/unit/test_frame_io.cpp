#include <gtest/gtest.h>

#include <fstream>

#include "sradapt/error.hpp"
#include "sradapt/frame.hpp"
#include "support.hpp"

using namespace sradapt;
using sradapt::testing::TempDir;
using sradapt::testing::random_frame;

namespace {

void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& bytes) {
    std::ofstream f(p, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ReadYuv, TwoByTwo420Layout) {
    TempDir dir("frame");
    write_bytes(dir / "a.yuv", {1, 2, 3, 4, 7, 9});
    const auto frames = read_yuv(dir / "a.yuv", {2, 2, 8, ChromaFormat::k420});
    ASSERT_EQ(frames.size(), 1u);
    const Frame& f = frames[0];
    EXPECT_EQ(f.planes[0].samples, (std::vector<std::uint16_t>{1, 2, 3, 4}));
    EXPECT_EQ(f.planes[1].samples, (std::vector<std::uint16_t>{7}));
    EXPECT_EQ(f.planes[2].samples, (std::vector<std::uint16_t>{9}));
}

TEST(ReadYuv, UhdTenBitFrameBytes) {
    // luma 3840*2160 plus two 1920*1080 chroma planes, 2 bytes each
    const std::size_t oracle = 2 * (3840ull * 2160 + 2ull * 1920 * 1080);
    EXPECT_EQ(oracle, 24883200u);
    EXPECT_EQ(frame_byte_count({3840, 2160, 10, ChromaFormat::k420}), oracle);
}

TEST(ReadYuv, OddDimsUseCeilChroma) {
    EXPECT_EQ(chroma_dims(5, 3, ChromaFormat::k420), std::make_pair(3, 2));
    EXPECT_EQ(chroma_dims(5, 3, ChromaFormat::k444), std::make_pair(5, 3));
    EXPECT_EQ(frame_byte_count({5, 3, 8, ChromaFormat::k420}), 15u + 2 * 6);
}

TEST(ReadYuv, FrameAndAHalfIsTruncated) {
    TempDir dir("frame");
    write_bytes(dir / "t.yuv", std::vector<unsigned char>(9, 0));  // 1.5 frames of 2x2 420
    EXPECT_NE(error_of([&] { read_yuv(dir / "t.yuv", {2, 2, 8, ChromaFormat::k420}); }).find("truncated file"),
              std::string::npos);
}

TEST(ReadYuv, TenBitIsLittleEndianAndRangeChecked) {
    TempDir dir("frame");
    // Y = 0x0201, 0x03ff, 1, 2 ; Cb = 5 ; Cr = 0x0100
    write_bytes(dir / "a.yuv", {0x01, 0x02, 0xff, 0x03, 1, 0, 2, 0, 5, 0, 0x00, 0x01});
    const auto f = read_yuv(dir / "a.yuv", {2, 2, 10, ChromaFormat::k420}).at(0);
    EXPECT_EQ(f.planes[0].samples, (std::vector<std::uint16_t>{0x0201, 0x03ff, 1, 2}));
    EXPECT_EQ(f.planes[2].at(0, 0), 0x0100);
    write_bytes(dir / "bad.yuv", {0x00, 0x04, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});  // 1024
    EXPECT_NE(error_of([&] { read_yuv(dir / "bad.yuv", {2, 2, 10, ChromaFormat::k420}); }).find("corrupt input"),
              std::string::npos);
}

TEST(WriteYuv, RoundTripIsBitExact) {
    TempDir dir("frame");
    for (const int depth : {8, 10})
        for (const auto fmt : {ChromaFormat::k420, ChromaFormat::k444}) {
            const Geometry g{7, 5, depth, fmt};
            std::vector<Frame> frames{random_frame(g, 1), random_frame(g, 2), random_frame(g, 3)};
            write_yuv(frames, dir / "rt.yuv");
            EXPECT_EQ(std::filesystem::file_size(dir / "rt.yuv"), 3 * frame_byte_count(g));
            EXPECT_EQ(read_yuv(dir / "rt.yuv", g), frames);
        }
}

TEST(WriteYuv, EmptySequenceGivesEmptyFile) {
    TempDir dir("frame");
    write_yuv({}, dir / "e.yuv");
    EXPECT_EQ(std::filesystem::file_size(dir / "e.yuv"), 0u);
}

TEST(WriteYuv, MixedGeometryRejected) {
    TempDir dir("frame");
    std::vector<Frame> frames{Frame({2, 2, 8, ChromaFormat::k420}), Frame({4, 2, 8, ChromaFormat::k420})};
    EXPECT_THROW(write_yuv(frames, dir / "m.yuv"), Error);
}

TEST(ChromaConversion, To444Replicates) {
    Frame f({2, 2, 8, ChromaFormat::k420});
    f.planes[1].at(0, 0) = 7;
    const Frame g = to_444(f);
    EXPECT_EQ(g.format, ChromaFormat::k444);
    EXPECT_EQ(g.planes[1].samples, (std::vector<std::uint16_t>{7, 7, 7, 7}));
    EXPECT_EQ(g.planes[0], f.planes[0]);

    Frame h({4, 4, 8, ChromaFormat::k420});
    h.planes[1].samples = {1, 2, 3, 4};
    EXPECT_EQ(to_444(h).planes[1].samples,
              (std::vector<std::uint16_t>{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4}));
}

TEST(ChromaConversion, To444IdentityOn444) {
    const Frame f = random_frame({6, 4, 10, ChromaFormat::k444}, 9);
    EXPECT_EQ(to_444(f), f);
}

TEST(ChromaConversion, To420RoundsHalfUp) {
    Frame f({2, 2, 8, ChromaFormat::k444});
    f.planes[1].samples = {1, 1, 1, 1};
    f.planes[2].samples = {1, 2, 3, 4};
    const Frame g = to_420(f);
    EXPECT_EQ(g.planes[1].at(0, 0), 1);
    EXPECT_EQ(g.planes[2].at(0, 0), 3);
}

TEST(ChromaConversion, To420InvertsTo444) {
    for (const auto& g : {Geometry{8, 6, 8, ChromaFormat::k420}, Geometry{7, 5, 10, ChromaFormat::k420}}) {
        const Frame f = random_frame(g, 17);
        EXPECT_EQ(to_420(to_444(f)), f);
    }
}

TEST(Normalization, ExactBijectionOnLattice) {
    for (const int depth : {8, 10}) {
        const int max = (1 << depth) - 1;
        EXPECT_EQ(normalize_sample(0, depth), -1.0);
        EXPECT_EQ(normalize_sample(static_cast<std::uint16_t>(max), depth), 1.0);
        for (int s = 0; s <= max; ++s) {
            const double v = normalize_sample(static_cast<std::uint16_t>(s), depth);
            ASSERT_GE(v, -1.0);
            ASSERT_LE(v, 1.0);
            ASSERT_EQ(denormalize_sample(v, depth), s);
        }
    }
}

TEST(ExtractBlocks, SingleBlockPlacement) {
    const Geometry g{96, 96, 8, ChromaFormat::k420};
    const auto blocks = extract_blocks(random_frame(g, 1), random_frame(g, 2), 96, 3, 5);
    ASSERT_EQ(blocks.size(), 3u);
    for (const auto& b : blocks) {
        EXPECT_EQ(b.x, 0);
        EXPECT_EQ(b.y, 0);
        EXPECT_EQ(b.input.size, 96);
        EXPECT_EQ(b.input.samples.size(), 3u * 96 * 96);
    }
}

TEST(ExtractBlocks, SeedDeterminesBlocks) {
    const Geometry g{64, 48, 8, ChromaFormat::k420};
    const Frame lo = random_frame(g, 1), hi = random_frame(g, 2);
    const auto a = extract_blocks(lo, hi, 16, 20, 7);
    const auto b = extract_blocks(lo, hi, 16, 20, 7);
    const auto c = extract_blocks(lo, hi, 16, 20, 8);
    ASSERT_EQ(a.size(), b.size());
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].input, b[i].input);
        EXPECT_EQ(a[i].target, b[i].target);
        any_diff |= a[i].x != c[i].x || a[i].y != c[i].y;
    }
    EXPECT_TRUE(any_diff);
}

TEST(ExtractBlocks, OffsetsStayInRangeAndCoLocated) {
    const Geometry g{192, 192, 8, ChromaFormat::k420};
    const Frame lo = random_frame(g, 3), hi = random_frame(g, 4);
    const auto blocks = extract_blocks(lo, hi, 96, 1000, 11);
    ASSERT_EQ(blocks.size(), 1000u);
    const Frame lo444 = to_444(lo), hi444 = to_444(hi);
    for (const auto& b : blocks) {
        ASSERT_GE(b.x, 0);
        ASSERT_LE(b.x, 96);
        ASSERT_GE(b.y, 0);
        ASSERT_LE(b.y, 96);
    }
    // spot-check co-location on a few blocks
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& b = blocks[i];
        for (int c = 0; c < 3; ++c) {
            EXPECT_EQ(b.input.at(c, 5, 7), normalize_sample(lo444.planes[c].at(b.x + 5, b.y + 7), 8));
            EXPECT_EQ(b.target.at(c, 95, 0), normalize_sample(hi444.planes[c].at(b.x + 95, b.y), 8));
        }
    }
}

TEST(ExtractBlocks, OversizedBlockRejected) {
    const Geometry g{32, 16, 8, ChromaFormat::k420};
    EXPECT_THROW(extract_blocks(Frame(g), Frame(g), 17, 1, 0), Error);
}

TEST(AugmentRotate, GroupProperties) {
    const Geometry g{16, 16, 8, ChromaFormat::k420};
    const auto pair = extract_blocks(random_frame(g, 5), random_frame(g, 6), 8, 1, 1).at(0);
    const auto r0 = augment_rotate(pair, 0);
    EXPECT_EQ(r0.input, pair.input);
    EXPECT_EQ(r0.target, pair.target);
    auto r = pair;
    for (int i = 0; i < 4; ++i) r = augment_rotate(r, 1);
    EXPECT_EQ(r.input, pair.input);
    EXPECT_EQ(r.target, pair.target);
    const auto twice = augment_rotate(augment_rotate(pair, 1), 1);
    EXPECT_EQ(augment_rotate(pair, 2).input, twice.input);
    EXPECT_EQ(augment_rotate(pair, 2).target, twice.target);
}

TEST(AugmentRotate, QuarterTurnIsCounterClockwise) {
    Block b;
    b.size = 2;
    b.samples = {1, 2, 3, 4, 0, 0, 0, 0, 0, 0, 0, 0};  // channel 0 rows [1 2],[3 4]
    const Block r = rotate_block(b, 1);
    // counter-clockwise: top row becomes [2 4]
    EXPECT_EQ(r.at(0, 0, 0), 2);
    EXPECT_EQ(r.at(0, 1, 0), 4);
    EXPECT_EQ(r.at(0, 0, 1), 1);
    EXPECT_EQ(r.at(0, 1, 1), 3);
}
