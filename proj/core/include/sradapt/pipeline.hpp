#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sradapt/dataset.hpp"
#include "sradapt/enhance.hpp"
#include "sradapt/evaluation.hpp"

namespace sradapt {

struct EvalOptions {
    std::vector<int> base_qps{22, 27, 32, 37};
    QpModelSelector selector;
    TileOptions tile;
    double fps = 30.0;
    std::string label = "sequence";
    CodecKind codec = CodecKind::kToy;
    // External codec only. Patterns take "{stem}" and "{qp}". The anchor is
    // decoded at full resolution and base QP, the adapted path at half
    // resolution and QP + offset; each has a per-frame bits file.
    std::string anchor_decoded_pattern;
    std::string anchor_bits_pattern;
    std::string adapted_decoded_pattern;
    std::string adapted_bits_pattern;
    // Optional externally computed scores (e.g. VMAF) in the RD CSV format;
    // curves labelled anchor / adapted are used as given.
    std::optional<std::filesystem::path> external_scores;
};

struct EvalRow {
    int base_qp = 0;
    int band = 0;
    double anchor_kbps = 0.0;
    double adapted_kbps = 0.0;
    std::map<std::string, double> anchor_quality;   // metric -> value (psnr_y)
    std::map<std::string, double> adapted_quality;
};

struct EvalResult {
    std::string label;
    std::vector<EvalRow> rows;
    std::vector<LabeledCurve> curves;          // "anchor" / "adapted", one per metric
    std::map<std::string, double> bd_rate;     // metric -> percent; absent when not computable
    std::map<std::string, std::string> bd_notes;  // metric -> reason it is absent
    std::vector<Frame> last_enhanced;          // enhanced frames of the final QP
    std::string report() const;
};

// Table in the style "Sequence | BD-Rate (PSNR) | BD-Rate (VMAF)", n/a where a
// metric is missing.
std::string format_bd_table(const std::vector<EvalResult>& results);

// Anchor: the codec at base QP on the full-resolution sequence. Adapted:
// down-sample, code at QP + offset, enhance with the band's bundle. Both are
// scored against the same original at full resolution.
EvalResult run_eval(const std::filesystem::path& original_path, const Geometry& geometry,
                    const std::vector<ModelBundle>& bundles, const EvalOptions& options);
EvalResult run_eval(const std::vector<Frame>& original, const std::string& stem,
                    const std::vector<ModelBundle>& bundles, const EvalOptions& options);

}  // namespace sradapt
