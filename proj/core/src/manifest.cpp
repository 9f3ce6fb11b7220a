#include "sradapt/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sradapt/error.hpp"

namespace sradapt {

namespace {

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string p;
    while (std::getline(ss, p, sep)) parts.push_back(p);
    return parts;
}

}  // namespace

std::vector<ManifestEntry> DatasetManifest::band_entries(int band) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries)
        if (e.band == band) out.push_back(e);
    return out;
}

void DatasetManifest::validate(const QpModelSelector& selector) const {
    for (const auto& e : entries)
        if (selector.band_for_base(e.base_qp) != e.band)
            throw Error("manifest: entry " + e.decoded_path.string() + " claims band " + std::to_string(e.band) +
                        " but base QP " + std::to_string(e.base_qp) + " resolves to band " +
                        std::to_string(selector.band_for_base(e.base_qp)));
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "# original_path,decoded_path,width,height,depth,fps,base_qp,band\n";
    for (const auto& n : m.notes) out << "# " << n << "\n";
    for (const auto& e : m.entries) {
        for (const auto* p : {&e.original_path, &e.decoded_path})
            if (p->string().find(',') != std::string::npos)
                throw Error("manifest: paths may not contain commas: " + p->string());
        out << e.original_path.string() << ',' << e.decoded_path.string() << ',' << e.geometry.width << ','
            << e.geometry.height << ',' << e.geometry.bit_depth << ',' << num(e.fps) << ',' << e.base_qp << ','
            << e.band << "\n";
    }
    if (!out) throw Error("write failed: " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest " + path.string());
    DatasetManifest m;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (!header_seen) header_seen = true;
            else m.notes.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 8)
            throw Error("manifest " + path.string() + ":" + std::to_string(line_no) + ": expected 8 fields");
        try {
            ManifestEntry e;
            e.original_path = f[0];
            e.decoded_path = f[1];
            e.geometry = {std::stoi(f[2]), std::stoi(f[3]), std::stoi(f[4]), ChromaFormat::k420};
            e.fps = std::stod(f[5]);
            e.base_qp = std::stoi(f[6]);
            e.band = std::stoi(f[7]);
            m.entries.push_back(std::move(e));
        } catch (const std::logic_error&) {
            throw Error("manifest " + path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    return m;
}

}  // namespace sradapt
