#include "sradapt/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <Eigen/Dense>

#include "sradapt/error.hpp"

namespace sradapt {

PsnrResult psnr_y(const std::vector<Frame>& ref, const std::vector<Frame>& test) {
    if (ref.size() != test.size())
        throw Error("psnr_y: sequences differ in length (" + std::to_string(ref.size()) + " vs " +
                    std::to_string(test.size()) + ")");
    if (ref.empty()) throw Error("psnr_y: empty sequences");
    double sse = 0.0;
    std::size_t n = 0;
    for (std::size_t f = 0; f < ref.size(); ++f) {
        if (ref[f].width != test[f].width || ref[f].height != test[f].height || ref[f].bit_depth != test[f].bit_depth)
            throw Error("psnr_y: geometry mismatch at frame " + std::to_string(f));
        const auto& a = ref[f].y().samples;
        const auto& b = test[f].y().samples;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
            sse += d * d;
        }
        n += a.size();
    }
    PsnrResult r;
    r.mse = sse / static_cast<double>(n);
    if (r.mse == 0.0) {
        r.lossless = true;
        r.db = std::numeric_limits<double>::infinity();
        return r;
    }
    const double max = static_cast<double>((1u << ref.front().bit_depth) - 1);
    r.db = 10.0 * std::log10(max * max / r.mse);
    return r;
}

RdCurve::RdCurve(std::vector<RdPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw Error("rd curve: no points");
    metric_ = points_.front().metric;
    for (const auto& p : points_) {
        if (p.metric != metric_) throw Error("rd curve: mixed metrics " + metric_ + " and " + p.metric);
        if (!(p.rate_kbps > 0.0)) throw Error("rd curve: rates must be positive");
    }
    std::stable_sort(points_.begin(), points_.end(),
                     [](const RdPoint& a, const RdPoint& b) { return a.rate_kbps < b.rate_kbps; });
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (points_[i].rate_kbps == points_[i - 1].rate_kbps) throw Error("rd curve: duplicate rate");
}

std::vector<std::size_t> RdCurve::monotonicity_violations() const {
    std::vector<std::size_t> v;
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (points_[i].quality < points_[i - 1].quality) v.push_back(i);
    return v;
}

CubicFit CubicFit::fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4) throw Error("bd: cubic fit needs at least 4 points");
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("bd: degenerate fit, repeated abscissa values");
    CubicFit f;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    f.center = 0.5 * (*lo + *hi);
    f.scale = 0.5 * (*hi - *lo);
    Eigen::MatrixXd a(x.size(), 4);
    Eigen::VectorXd b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = (x[i] - f.center) / f.scale;
        a(i, 0) = 1.0;
        a(i, 1) = t;
        a(i, 2) = t * t;
        a(i, 3) = t * t * t;
        b(i) = y[i];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    for (int i = 0; i < 4; ++i) f.c[i] = c(i);
    return f;
}

double CubicFit::operator()(double x) const {
    const double t = (x - center) / scale;
    return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
}

double CubicFit::integral(double a, double b) const {
    auto antiderivative = [&](double x) {
        const double t = (x - center) / scale;
        return scale * t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * c[3] / 4.0)));
    };
    return antiderivative(b) - antiderivative(a);
}

namespace {

void check_curves(const RdCurve& a, const RdCurve& b) {
    if (a.size() < 4 || b.size() < 4) throw Error("bd: each curve needs at least 4 points");
    if (a.metric() != b.metric()) throw Error("bd: curves use different metrics");
}

struct Axes {
    std::vector<double> log_rate, quality;
};

Axes axes(const RdCurve& c) {
    Axes ax;
    for (const auto& p : c.points()) {
        ax.log_rate.push_back(std::log10(p.rate_kbps));
        ax.quality.push_back(p.quality);
    }
    return ax;
}

// Mean of (g_test - g_anchor) over the overlap of their x ranges.
double mean_difference(const std::vector<double>& xa, const std::vector<double>& ya, const std::vector<double>& xt,
                       const std::vector<double>& yt) {
    const double lo = std::max(*std::min_element(xa.begin(), xa.end()), *std::min_element(xt.begin(), xt.end()));
    const double hi = std::min(*std::max_element(xa.begin(), xa.end()), *std::max_element(xt.begin(), xt.end()));
    if (!(hi > lo)) throw Error("bd: curves do not overlap");
    const CubicFit fa = CubicFit::fit(xa, ya);
    const CubicFit ft = CubicFit::fit(xt, yt);
    return (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
}

}  // namespace

double bd_rate(const RdCurve& anchor, const RdCurve& test) {
    check_curves(anchor, test);
    const Axes a = axes(anchor), t = axes(test);
    const double avg = mean_difference(a.quality, a.log_rate, t.quality, t.log_rate);
    return (std::pow(10.0, avg) - 1.0) * 100.0;
}

double bd_quality(const RdCurve& anchor, const RdCurve& test) {
    check_curves(anchor, test);
    const Axes a = axes(anchor), t = axes(test);
    return mean_difference(a.log_rate, a.quality, t.log_rate, t.quality);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (const char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// RFC 4180 record splitter operating on a whole file buffer.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw Error("csv: unterminated quoted field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

double parse_number(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error("csv: bad " + what + " value '" + s + "'");
    return v;
}

}  // namespace

void export_rd_csv(const std::vector<LabeledCurve>& curves, const std::filesystem::path& path) {
    if (curves.empty()) throw Error("export_rd_csv: no curves");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "label,metric,rate_kbps,quality\n";
    for (const auto& c : curves)
        for (const auto& p : c.curve.points())
            out << csv_field(c.label) << ',' << csv_field(p.metric) << ',' << format_number(p.rate_kbps) << ','
                << format_number(p.quality) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

std::vector<LabeledCurve> import_rd_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto rows = parse_csv(text);
    if (rows.empty() || rows.front() != std::vector<std::string>{"label", "metric", "rate_kbps", "quality"})
        throw Error("csv: " + path.string() + " lacks the header label,metric,rate_kbps,quality");
    // Curves keyed by (label, metric) in order of first appearance.
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<RdPoint>> groups;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 4) throw Error("csv: row " + std::to_string(i + 1) + " has " + std::to_string(r.size()) + " fields");
        const auto key = std::make_pair(r[0], r[1]);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back({parse_number(r[2], "rate_kbps"), parse_number(r[3], "quality"), r[1]});
    }
    std::vector<LabeledCurve> curves;
    for (const auto& key : order) curves.push_back({key.first, RdCurve(groups[key])});
    return curves;
}

}  // namespace sradapt
