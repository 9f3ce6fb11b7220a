#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sradapt/frame.hpp"

namespace sradapt {

struct PsnrResult {
    double db = 0.0;  // +infinity when lossless
    bool lossless = false;
    double mse = 0.0;
};

// Luma PSNR with MSE pooled over every Y sample of every frame.
PsnrResult psnr_y(const std::vector<Frame>& ref, const std::vector<Frame>& test);

struct RdPoint {
    double rate_kbps = 0.0;
    double quality = 0.0;
    std::string metric;  // psnr_y | vmaf | ssim | ms_ssim
    bool operator==(const RdPoint&) const = default;
};

// Points sorted by rate, one metric, distinct positive rates.
class RdCurve {
public:
    RdCurve() = default;
    explicit RdCurve(std::vector<RdPoint> points);

    const std::vector<RdPoint>& points() const { return points_; }
    const std::string& metric() const { return metric_; }
    std::size_t size() const { return points_.size(); }

    // Indices i where quality[i] < quality[i-1] (reported, not rejected).
    std::vector<std::size_t> monotonicity_violations() const;

    bool operator==(const RdCurve&) const = default;

private:
    std::vector<RdPoint> points_;
    std::string metric_;
};

// Least-squares cubic fit y ~ c0 + c1 t + c2 t^2 + c3 t^3 on t = (x - center) / scale.
struct CubicFit {
    double center = 0.0;
    double scale = 1.0;
    double c[4]{};

    static CubicFit fit(const std::vector<double>& x, const std::vector<double>& y);
    double operator()(double x) const;
    // Exact integral of the fitted cubic over [a, b].
    double integral(double a, double b) const;
};

// Bjontegaard delta rate in percent (negative = saving): log10(rate) fitted as a
// cubic in quality, averaged over the overlapping quality interval.
double bd_rate(const RdCurve& anchor, const RdCurve& test);
// Quality-axis variant: quality as a cubic in log10(rate).
double bd_quality(const RdCurve& anchor, const RdCurve& test);

struct LabeledCurve {
    std::string label;
    RdCurve curve;
    bool operator==(const LabeledCurve&) const = default;
};

// CSV with header label,metric,rate_kbps,quality; rows in input order.
void export_rd_csv(const std::vector<LabeledCurve>& curves, const std::filesystem::path& path);
std::vector<LabeledCurve> import_rd_csv(const std::filesystem::path& path);

}  // namespace sradapt
