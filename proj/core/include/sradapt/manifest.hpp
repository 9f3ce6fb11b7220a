#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sradapt/frame.hpp"
#include "sradapt/networks.hpp"

namespace sradapt {

struct ManifestEntry {
    std::filesystem::path original_path;
    std::filesystem::path decoded_path;  // decoded, NN up-sampled to the original size
    Geometry geometry;                   // 4:2:0
    double fps = 30.0;
    int base_qp = 0;
    int band = 0;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::vector<std::string> notes;  // provenance, written as '#' comments

    std::vector<ManifestEntry> band_entries(int band) const;
    // Throws unless every entry's band matches the selector's verdict.
    void validate(const QpModelSelector& selector = {}) const;
};

// One record per line:
// original_path,decoded_path,width,height,depth,fps,base_qp,band
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace sradapt
