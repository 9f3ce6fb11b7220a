#include "sradapt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sradapt/codec.hpp"
#include "sradapt/error.hpp"
#include "sradapt/resample.hpp"

namespace sradapt {

namespace {

std::string display_metric(const std::string& m) {
    if (m == "psnr_y") return "PSNR";
    if (m == "vmaf") return "VMAF";
    if (m == "ssim") return "SSIM";
    if (m == "ms_ssim") return "MS-SSIM";
    return m;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

}  // namespace

EvalResult run_eval(const std::filesystem::path& original_path, const Geometry& geometry,
                    const std::vector<ModelBundle>& bundles, const EvalOptions& options) {
    return run_eval(read_yuv(original_path, geometry), original_path.stem().string(), bundles, options);
}

EvalResult run_eval(const std::vector<Frame>& original, const std::string& stem,
                    const std::vector<ModelBundle>& bundles, const EvalOptions& options) {
    if (original.empty()) throw Error("eval: empty sequence");
    if (options.base_qps.empty()) throw Error("eval: no QPs given");
    const Geometry geometry = original.front().geometry();
    if (geometry.width % 2 != 0 || geometry.height % 2 != 0) throw Error("eval: sequence has odd dimensions");
    // every band must be served before any coding starts
    for (const int qp : options.base_qps) select_model(qp, bundles, options.selector);

    std::vector<LabeledCurve> external;
    if (options.external_scores) {
        for (auto& c : import_rd_csv(*options.external_scores)) {
            if (c.label != "anchor" && c.label != "adapted")
                throw Error("eval: external score curves must be labelled anchor or adapted, got '" + c.label + "'");
            if (c.curve.metric() == "psnr_y") throw Error("eval: psnr_y is computed here, not imported");
            external.push_back(std::move(c));
        }
    }

    EvalResult result;
    result.label = options.label;
    std::vector<Frame> low;
    if (options.codec == CodecKind::kToy)
        for (const auto& f : original) low.push_back(downsample_2x(f));
    const Geometry low_geometry{geometry.width / 2, geometry.height / 2, geometry.bit_depth, geometry.format};

    for (const int qp : options.base_qps) {
        EvalRow row;
        row.base_qp = qp;
        row.band = options.selector.band_for_base(qp);
        CodedResult anchor, adapted;
        if (options.codec == CodecKind::kToy) {
            anchor = toy_encode_decode(original, ToyCodecConfig{8, qp, 0}, options.fps);
            adapted = toy_encode_decode(low, ToyCodecConfig{8, qp, options.selector.qp_offset}, options.fps);
        } else {
            for (const auto* p : {&options.anchor_decoded_pattern, &options.anchor_bits_pattern,
                                  &options.adapted_decoded_pattern, &options.adapted_bits_pattern})
                if (p->empty()) throw Error("eval: external codec needs decoded and bits patterns for both paths");
            anchor = ingest_external(expand_pattern(options.anchor_decoded_pattern, stem, qp), geometry,
                                     std::filesystem::path(expand_pattern(options.anchor_bits_pattern, stem, qp)),
                                     options.fps);
            adapted = ingest_external(expand_pattern(options.adapted_decoded_pattern, stem, qp), low_geometry,
                                      std::filesystem::path(expand_pattern(options.adapted_bits_pattern, stem, qp)),
                                      options.fps);
        }
        const ModelBundle& bundle = select_model(qp, bundles, options.selector);
        std::vector<Frame> enhanced;
        enhanced.reserve(adapted.decoded.size());
        for (const auto& f : adapted.decoded) enhanced.push_back(enhance_frame(f, bundle, options.tile));

        row.anchor_kbps = anchor.rate_kbps();
        row.adapted_kbps = adapted.rate_kbps();
        row.anchor_quality["psnr_y"] = psnr_y(original, anchor.decoded).db;
        row.adapted_quality["psnr_y"] = psnr_y(original, enhanced).db;
        result.rows.push_back(std::move(row));
        result.last_enhanced = std::move(enhanced);
    }

    std::vector<RdPoint> a, t;
    for (const auto& r : result.rows) {
        a.push_back({r.anchor_kbps, r.anchor_quality.at("psnr_y"), "psnr_y"});
        t.push_back({r.adapted_kbps, r.adapted_quality.at("psnr_y"), "psnr_y"});
    }
    result.curves.push_back({"anchor", RdCurve(a)});
    result.curves.push_back({"adapted", RdCurve(t)});
    for (const auto& c : external) result.curves.push_back(c);

    std::vector<std::string> metrics;
    for (const auto& c : result.curves)
        if (std::find(metrics.begin(), metrics.end(), c.curve.metric()) == metrics.end())
            metrics.push_back(c.curve.metric());
    for (const auto& m : metrics) {
        const RdCurve* anchor = nullptr;
        const RdCurve* adapted = nullptr;
        for (const auto& c : result.curves)
            if (c.curve.metric() == m) (c.label == "anchor" ? anchor : adapted) = &c.curve;
        if (!anchor || !adapted) {
            result.bd_notes[m] = std::string("no ") + (anchor ? "adapted" : "anchor") + " curve";
            continue;
        }
        try {
            result.bd_rate[m] = bd_rate(*anchor, *adapted);
        } catch (const Error& e) {
            result.bd_notes[m] = e.what();
        }
    }
    return result;
}

std::string EvalResult::report() const {
    std::ostringstream os;
    os << "sequence " << label << "\n";
    os << pad("base_qp", 9) << pad("band", 6) << pad("anchor_kbps", 14) << pad("anchor_psnr_y", 15)
       << pad("adapted_kbps", 14) << "adapted_psnr_y\n";
    for (const auto& r : rows) {
        os << pad(std::to_string(r.base_qp), 9) << pad(std::to_string(r.band), 6) << pad(fixed(r.anchor_kbps, 3), 14)
           << pad(fixed(r.anchor_quality.at("psnr_y"), 4), 15) << pad(fixed(r.adapted_kbps, 3), 14)
           << fixed(r.adapted_quality.at("psnr_y"), 4) << "\n";
    }
    for (const auto& [m, why] : bd_notes) os << "note: BD-rate (" << display_metric(m) << ") unavailable: " << why << "\n";
    os << "\n" << format_bd_table({*this});
    return os.str();
}

std::string format_bd_table(const std::vector<EvalResult>& results) {
    const std::vector<std::string> columns{"psnr_y", "vmaf"};
    std::size_t w = 8;
    for (const auto& r : results) w = std::max(w, r.label.size());
    w += 2;
    std::ostringstream os;
    os << pad("Sequence", w);
    for (const auto& c : columns) os << pad("BD-Rate (" + display_metric(c) + ")", 18);
    os << "\n";
    for (const auto& r : results) {
        os << pad(r.label, w);
        for (const auto& c : columns) {
            const auto it = r.bd_rate.find(c);
            os << pad(it == r.bd_rate.end() ? "n/a" : fixed(it->second, 2) + "%", 18);
        }
        os << "\n";
    }
    std::string s = os.str();
    // strip trailing padding
    std::string out;
    std::istringstream lines(s);
    for (std::string l; std::getline(lines, l);) {
        l.erase(l.find_last_not_of(' ') + 1);
        out += l + "\n";
    }
    return out;
}

}  // namespace sradapt
