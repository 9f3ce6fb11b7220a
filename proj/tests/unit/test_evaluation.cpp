#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "sradapt/error.hpp"
#include "sradapt/evaluation.hpp"
#include "sradapt/rng.hpp"
#include "support.hpp"

using namespace sradapt;
using namespace sradapt::testing;

namespace {

// Cubic through four points in Lagrange form, integrated with composite
// Simpson; shares nothing with the library's least-squares fit.
double lagrange(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    double s = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double l = 1;
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (j != i) l *= (x - xs[j]) / (xs[i] - xs[j]);
        s += ys[i] * l;
    }
    return s;
}

double simpson_mean_diff(const std::vector<double>& xa, const std::vector<double>& ya, const std::vector<double>& xt,
                         const std::vector<double>& yt) {
    const double lo = std::max(*std::min_element(xa.begin(), xa.end()), *std::min_element(xt.begin(), xt.end()));
    const double hi = std::min(*std::max_element(xa.begin(), xa.end()), *std::max_element(xt.begin(), xt.end()));
    const int n = 20000;
    const double h = (hi - lo) / n;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double d = lagrange(xt, yt, x) - lagrange(xa, ya, x);
        s += d * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    }
    return s * h / 3 / (hi - lo);
}

double bd_rate_oracle(const RdCurve& a, const RdCurve& t) {
    std::vector<double> xa, ya, xt, yt;
    for (const auto& p : a.points()) xa.push_back(p.quality), ya.push_back(std::log10(p.rate_kbps));
    for (const auto& p : t.points()) xt.push_back(p.quality), yt.push_back(std::log10(p.rate_kbps));
    return (std::pow(10.0, simpson_mean_diff(xa, ya, xt, yt)) - 1) * 100;
}

double bd_quality_oracle(const RdCurve& a, const RdCurve& t) {
    std::vector<double> xa, ya, xt, yt;
    for (const auto& p : a.points()) xa.push_back(std::log10(p.rate_kbps)), ya.push_back(p.quality);
    for (const auto& p : t.points()) xt.push_back(std::log10(p.rate_kbps)), yt.push_back(p.quality);
    return simpson_mean_diff(xa, ya, xt, yt);
}

RdCurve curve(const std::vector<std::pair<double, double>>& pts, const std::string& metric = "psnr_y") {
    std::vector<RdPoint> v;
    for (const auto& [r, q] : pts) v.push_back({r, q, metric});
    return RdCurve(v);
}

std::pair<RdCurve, RdCurve> random_pair(std::uint64_t seed) {
    CounterRng rng(seed);
    auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_unit(); };
    std::vector<std::pair<double, double>> a, t;
    double rate = u(200, 2000), q = u(28, 34);
    for (int i = 0; i < 4; ++i) {
        a.emplace_back(rate, q);
        t.emplace_back(rate * u(0.55, 1.2), q + u(-0.8, 0.8));
        rate *= u(1.5, 2.3);
        q += u(2.0, 4.5);
    }
    return {curve(a), curve(t)};
}

}  // namespace

TEST(PsnrY, ClosedForms) {
    const Geometry g10{8, 4, 10, ChromaFormat::k420};
    Frame a(g10, 500), b(g10, 501);
    b.planes[1].samples.assign(b.planes[1].samples.size(), 0);  // chroma ignored
    EXPECT_NEAR(psnr_y({a}, {b}).db, 20 * std::log10(1023.0), 1e-12);
    EXPECT_NEAR(psnr_y({a}, {b}).db, 60.1975, 1e-4);
    const Geometry g8{6, 6, 8, ChromaFormat::k420};
    EXPECT_NEAR(psnr_y({Frame(g8, 100)}, {Frame(g8, 116)}).db, 20 * std::log10(255.0 / 16), 1e-12);
    EXPECT_NEAR(psnr_y({Frame(g8, 100)}, {Frame(g8, 116)}).db, 24.0484, 1e-4);
}

TEST(PsnrY, LosslessAndErrors) {
    const Frame f = random_frame({8, 8, 8, ChromaFormat::k420}, 1);
    const auto r = psnr_y({f}, {f});
    EXPECT_TRUE(r.lossless);
    EXPECT_TRUE(std::isinf(r.db));
    EXPECT_THROW(psnr_y({f}, {f, f}), Error);
    EXPECT_THROW(psnr_y({f}, {Frame({8, 6, 8, ChromaFormat::k420})}), Error);
}

TEST(PsnrY, PooledOverFramesAndPermutationInvariant) {
    const Geometry g{4, 4, 8, ChromaFormat::k444};
    Frame a(g, 10), b(g, 10), c(g, 10);
    b.planes[0].at(0, 0) = 20;  // one frame with error 10 at one sample
    c.planes[0].at(3, 2) = 20;
    const double mse = 100.0 / 32;
    EXPECT_NEAR(psnr_y({a, a}, {b, a}).db, 10 * std::log10(255.0 * 255 / mse), 1e-12);
    EXPECT_EQ(psnr_y({a, a}, {b, a}).db, psnr_y({a, a}, {a, c}).db);
    Frame d = b;
    d.planes[0].at(1, 1) = 11;
    EXPECT_LT(psnr_y({a}, {d}).db, psnr_y({a}, {b}).db);
}

TEST(RdCurve, SortsAndValidates) {
    const RdCurve c = curve({{400, 35}, {100, 30}, {200, 29}});
    EXPECT_EQ(c.points().front().rate_kbps, 100);
    EXPECT_EQ(c.monotonicity_violations(), (std::vector<std::size_t>{1}));
    EXPECT_THROW(curve({{100, 30}, {100, 31}}), Error);
    EXPECT_THROW(curve({{-1, 30}}), Error);
    EXPECT_THROW(RdCurve({{1, 2, "psnr_y"}, {2, 3, "vmaf"}}), Error);
}

TEST(BdRate, IdentityIsZero) {
    const RdCurve a = curve({{1000, 30}, {2000, 35}, {4000, 40}, {8000, 45}});
    EXPECT_EQ(bd_rate(a, a), 0.0);
    EXPECT_EQ(bd_quality(a, a), 0.0);
}

TEST(BdRate, HalfRateIsMinusFifty) {
    const RdCurve a = curve({{1000, 30}, {2000, 35}, {4000, 40}, {8000, 45}});
    const RdCurve t = curve({{500, 30}, {1000, 35}, {2000, 40}, {4000, 45}});
    EXPECT_NEAR(bd_rate(a, t), -50.0, 1e-9);
}

TEST(BdRate, SpecExampleMatchesOracle) {
    const RdCurve a = curve({{1000, 30}, {2000, 35}, {4000, 40}, {8000, 45}});
    const RdCurve t = curve({{900, 30}, {1700, 35}, {3600, 40}, {7000, 45}});
    const double v = bd_rate(a, t);
    EXPECT_NEAR(v, bd_rate_oracle(a, t), 0.01);
    EXPECT_LT(v, 0.0);
}

TEST(BdRate, RandomizedPairsMatchOracle) {
    for (std::uint64_t s = 1; s <= 25; ++s) {
        const auto [a, t] = random_pair(s);
        EXPECT_NEAR(bd_rate(a, t), bd_rate_oracle(a, t), 0.01) << s;
        EXPECT_NEAR(bd_quality(a, t), bd_quality_oracle(a, t), 1e-6) << s;
    }
}

TEST(BdRate, AntisymmetryAndScaling) {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto [a, t] = random_pair(100 + s);
        EXPECT_NEAR((1 + bd_rate(a, t) / 100) * (1 + bd_rate(t, a) / 100), 1.0, 1e-9);
        std::vector<std::pair<double, double>> as, ts;
        for (const auto& p : a.points()) as.emplace_back(p.rate_kbps * 3.7, p.quality);
        for (const auto& p : t.points()) ts.emplace_back(p.rate_kbps * 3.7, p.quality);
        EXPECT_NEAR(bd_rate(curve(as), curve(ts)), bd_rate(a, t), 1e-9);
    }
}

TEST(BdQuality, ConstantOffset) {
    const RdCurve a = curve({{1000, 30}, {2000, 35}, {4000, 40}, {8000, 45}});
    const RdCurve t = curve({{1000, 31}, {2000, 36}, {4000, 41}, {8000, 46}});
    EXPECT_NEAR(bd_quality(a, t), 1.0, 1e-12);
}

TEST(BdRate, Errors) {
    const RdCurve a = curve({{1000, 30}, {2000, 35}, {4000, 40}, {8000, 45}});
    EXPECT_THROW(bd_rate(a, curve({{1000, 50}, {2000, 55}, {4000, 60}, {8000, 65}})), Error);  // no overlap
    EXPECT_THROW(bd_rate(a, curve({{1000, 30}, {2000, 35}, {4000, 35}, {8000, 40}})), Error);  // repeated quality
    EXPECT_THROW(bd_rate(a, curve({{1000, 30}, {2000, 35}, {4000, 40}})), Error);
    EXPECT_THROW(bd_rate(a, curve({{1000, 30}, {2000, 35}, {4000, 40}, {8000, 45}}, "vmaf")), Error);
}

TEST(BdRate, LeastSquaresWithMorePoints) {
    // five points on an exact cubic: the least-squares fit recovers it
    auto lr = [](double q) { return 2 + 0.05 * (q - 30) + 0.001 * std::pow(q - 30, 3); };
    std::vector<std::pair<double, double>> a, t;
    for (const double q : {28.0, 31.0, 34.0, 37.0, 40.0}) {
        a.emplace_back(std::pow(10, lr(q)), q);
        t.emplace_back(std::pow(10, lr(q)) * 0.8, q);
    }
    EXPECT_NEAR(bd_rate(curve(a), curve(t)), -20.0, 1e-8);
}

TEST(RdCsv, ExportImport) {
    TempDir dir("csv");
    const std::vector<LabeledCurve> one{{"anchor", curve({{100, 30}, {200, 33.25}})}};
    export_rd_csv(one, dir / "a.csv");
    std::ifstream in(dir / "a.csv");
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "label,metric,rate_kbps,quality");
    EXPECT_EQ(lines[1], "anchor,psnr_y,100,30");
    EXPECT_EQ(import_rd_csv(dir / "a.csv"), one);

    const std::vector<LabeledCurve> many{{"seq, \"A\"", curve({{0.1, 1.0 / 3}, {1e5, 99.125}})},
                                         {"b", curve({{10, 40}, {20, 45}, {30, 47}}, "vmaf")}};
    export_rd_csv(many, dir / "b.csv");
    std::ifstream in2(dir / "b.csv");
    std::string header, row;
    std::getline(in2, header);
    std::getline(in2, row);
    EXPECT_EQ(row.substr(0, 12), "\"seq, \"\"A\"\"\"");
    EXPECT_EQ(import_rd_csv(dir / "b.csv"), many);
}

TEST(RdCsv, Errors) {
    TempDir dir("csv");
    EXPECT_THROW(export_rd_csv({}, dir / "x.csv"), Error);
    std::ofstream(dir / "bad.csv") << "label,rate\n";
    EXPECT_THROW(import_rd_csv(dir / "bad.csv"), Error);
}
