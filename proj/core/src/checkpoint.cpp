#include "sradapt/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <zlib.h>

#include "sradapt/error.hpp"

namespace sradapt {

namespace {

constexpr const char* kMagic = "sradapt-checkpoint";

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string dims_string(const Shape& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
    return out;
}

Shape parse_dims(const std::string& text) {
    Shape s;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, 'x')) s.push_back(std::stoi(part));
    return s;
}

void append_le(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double read_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

std::uint32_t crc_of(const std::string& data) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

struct ParamEntry {
    std::string name;
    Shape shape;
    std::size_t offset = 0;
    std::size_t count = 0;
};

void collect(const ParameterSet& set, std::vector<const Parameter*>& out) {
    for (const auto& p : set) out.push_back(&p);
}

std::string conv_specs_string(const std::vector<ConvSpec>& specs) {
    std::string s;
    for (std::size_t i = 0; i < specs.size(); ++i)
        s += (i ? "," : "") + std::to_string(specs[i].out_channels) + "/" + std::to_string(specs[i].stride);
    return s;
}

std::vector<ConvSpec> parse_conv_specs(const std::string& text) {
    std::vector<ConvSpec> specs;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto slash = part.find('/');
        if (slash == std::string::npos) throw Error("checkpoint: malformed conv spec '" + part + "'");
        specs.push_back({std::stoi(part.substr(0, slash)), std::stoi(part.substr(slash + 1))});
    }
    return specs;
}

void fill_parameters(ParameterSet& set, const std::map<std::string, ParamEntry>& entries,
                     const std::string& data, const char* what) {
    const std::string prefix = std::string(what) + ".";
    for (const auto& [name, e] : entries)
        if (name.rfind(prefix, 0) == 0 && !set.find(name))
            throw Error("checkpoint: parameter " + name + " has no counterpart in the " + what + " config");
    for (auto& p : set) {
        const auto it = entries.find(p.name);
        if (it == entries.end()) throw Error(std::string("checkpoint: missing ") + what + " parameter " + p.name);
        const ParamEntry& e = it->second;
        if (e.shape != p.tensor.shape())
            throw Error("checkpoint: shape mismatch for parameter " + p.name + ": file has " +
                        shape_string(e.shape) + ", config expects " + shape_string(p.tensor.shape()));
        if (e.offset + e.count * 8 > data.size())
            throw Error("checkpoint: parameter " + p.name + " extends past the data section");
        auto v = p.tensor.mutable_values();
        const auto* base = reinterpret_cast<const unsigned char*>(data.data()) + e.offset;
        for (std::size_t i = 0; i < e.count; ++i) v[i] = read_le(base + 8 * i);
    }
}

}  // namespace

void save_checkpoint(const ModelBundle& bundle, const std::filesystem::path& path) {
    std::vector<const Parameter*> params;
    collect(bundle.generator.parameters(), params);
    if (bundle.discriminator) collect(bundle.discriminator->parameters(), params);

    std::ostringstream manifest;
    const auto& g = bundle.generator.config();
    manifest << kMagic << "\n"
             << "version " << kCheckpointVersion << "\n"
             << "qp_band " << bundle.qp_band << "\n"
             << "generator.num_residual_blocks " << g.num_residual_blocks << "\n"
             << "generator.channels " << g.channels << "\n"
             << "generator.kernel " << g.kernel << "\n"
             << "generator.in_channels " << g.in_channels << "\n"
             << "generator.out_channels " << g.out_channels << "\n"
             << "discriminator " << (bundle.discriminator ? 1 : 0) << "\n";
    if (bundle.discriminator) {
        const auto& d = bundle.discriminator->config();
        manifest << "discriminator.stem_channels " << d.stem_channels << "\n"
                 << "discriminator.conv_specs " << conv_specs_string(d.conv_specs) << "\n"
                 << "discriminator.dense_width " << d.dense_width << "\n"
                 << "discriminator.leaky_slope " << format_double(d.leaky_slope) << "\n"
                 << "discriminator.input_extent " << bundle.discriminator->input_extent() << "\n";
    }
    std::string data;
    manifest << "parameters " << params.size() << "\n";
    for (const auto* p : params) {
        manifest << "param " << p->name << " f64 " << dims_string(p->tensor.shape()) << " " << data.size() << " "
                 << p->tensor.size() << "\n";
        for (const double v : p->tensor.values()) append_le(data, v);
    }
    char crc_hex[16];
    std::snprintf(crc_hex, sizeof crc_hex, "%08x", crc_of(data));
    manifest << "data_bytes " << data.size() << "\n"
             << "checksum crc32 " << crc_hex << "\n"
             << "end\n";

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    const std::string header = manifest.str();
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed: " + path.string());
}

ModelBundle load_checkpoint(const std::filesystem::path& path, const std::optional<GeneratorConfig>& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kMagic) throw Error("checkpoint: " + path.string() + " is not a checkpoint");

    std::map<std::string, std::string> keys;
    std::map<std::string, ParamEntry> entries;
    bool ended = false;
    while (std::getline(in, line)) {
        if (line == "end") {
            ended = true;
            break;
        }
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "param") {
            ParamEntry e;
            std::string dtype, dims;
            if (!(ls >> e.name >> dtype >> dims >> e.offset >> e.count)) throw Error("checkpoint: malformed line '" + line + "'");
            if (dtype != "f64") throw Error("checkpoint: unsupported dtype " + dtype);
            e.shape = parse_dims(dims);
            if (element_count(e.shape) != e.count) throw Error("checkpoint: count does not match shape for " + e.name);
            entries[e.name] = e;
        } else {
            std::string rest;
            std::getline(ls >> std::ws, rest);
            keys[key] = rest;
        }
        if (key == "version" && std::stoi(keys[key]) != kCheckpointVersion)
            throw Error("checkpoint: version mismatch (file " + keys[key] + ", supported " +
                        std::to_string(kCheckpointVersion) + ")");
    }
    if (!ended) throw Error("checkpoint: checksum failure, manifest of " + path.string() + " is truncated");
    auto need = [&](const std::string& k) -> const std::string& {
        const auto it = keys.find(k);
        if (it == keys.end()) throw Error("checkpoint: manifest lacks '" + k + "'");
        return it->second;
    };
    if (!keys.count("version")) throw Error("checkpoint: manifest lacks 'version'");

    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t declared = std::stoull(need("data_bytes"));
    if (data.size() != declared)
        throw Error("checkpoint: checksum failure, data section holds " + std::to_string(data.size()) +
                    " bytes but the manifest declares " + std::to_string(declared));
    char crc_hex[16];
    std::snprintf(crc_hex, sizeof crc_hex, "%08x", crc_of(data));
    if (need("checksum") != std::string("crc32 ") + crc_hex)
        throw Error("checkpoint: checksum failure in " + path.string());

    GeneratorConfig g;
    g.num_residual_blocks = std::stoi(need("generator.num_residual_blocks"));
    g.channels = std::stoi(need("generator.channels"));
    g.kernel = std::stoi(need("generator.kernel"));
    g.in_channels = std::stoi(need("generator.in_channels"));
    g.out_channels = std::stoi(need("generator.out_channels"));

    ModelBundle bundle{std::stoi(need("qp_band")), Generator(expected ? *expected : g), std::nullopt};
    fill_parameters(bundle.generator.parameters(), entries, data, "generator");

    if (need("discriminator") == "1") {
        DiscriminatorConfig d;
        d.stem_channels = std::stoi(need("discriminator.stem_channels"));
        d.conv_specs = parse_conv_specs(need("discriminator.conv_specs"));
        d.dense_width = std::stoi(need("discriminator.dense_width"));
        d.leaky_slope = std::stod(need("discriminator.leaky_slope"));
        Discriminator disc(d);
        const int extent = std::stoi(need("discriminator.input_extent"));
        if (extent > 0) disc.set_input_extent(extent);
        fill_parameters(disc.parameters(), entries, data, "discriminator");
        bundle.discriminator = std::move(disc);
    }
    return bundle;
}

}  // namespace sradapt
