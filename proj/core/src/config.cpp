#include "sradapt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sradapt/error.hpp"

namespace sradapt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
    T v{};
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size())
        throw Error("invalid config: '" + key + "' has malformed value '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw Error("invalid config: '" + key + "' expects a boolean, got '" + text + "'");
}

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

void TrainConfig::validate() const {
    if (stage != 1 && stage != 2) throw Error("invalid config: stage must be 1 or 2");
    if (epochs < 1) throw Error("invalid config: epochs must be >= 1");
    if (batch_size < 1) throw Error("invalid config: batch_size must be >= 1");
    if (!(lr > 0.0)) throw Error("invalid config: lr must be positive");
    if (!(lr_decay_factor > 0.0)) throw Error("invalid config: lr_decay_factor must be positive");
    if (lr_decay_every < 1) throw Error("invalid config: lr_decay_every must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw Error("invalid config: Adam betas must lie in [0, 1)");
    if (block_size < 11) throw Error("invalid config: block_size must be >= 11 (SSIM window)");
    if (blocks_per_band < 1) throw Error("invalid config: blocks_per_band must be >= 1");
    if (disc_base_channels < 1 || disc_dense_width < 1) throw Error("invalid config: discriminator widths must be >= 1");
    generator_config().validate();
}

double TrainConfig::lr_at_epoch(int epoch) const {
    return lr * std::pow(lr_decay_factor, static_cast<double>(epoch / lr_decay_every));
}

GeneratorConfig TrainConfig::generator_config() const {
    GeneratorConfig g;
    g.num_residual_blocks = num_residual_blocks;
    g.channels = channels;
    return g;
}

DiscriminatorConfig TrainConfig::discriminator_config() const {
    const int b = disc_base_channels;
    DiscriminatorConfig d;
    d.stem_channels = b;
    d.conv_specs = {{b, 2}, {2 * b, 1}, {2 * b, 2}, {4 * b, 1}, {4 * b, 2}, {8 * b, 1}, {8 * b, 2}};
    d.dense_width = disc_dense_width;
    return d;
}

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("invalid config: " + origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error("invalid config: " + origin + ":" + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second)
            throw Error("invalid config: " + origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return out;
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str(), path.string());
}

void apply_train_config(const std::map<std::string, std::string>& values, TrainConfig& c) {
    for (const auto& [key, v] : values) {
        if (key == "stage") c.stage = parse_value<int>(key, v);
        else if (key == "epochs") c.epochs = parse_value<int>(key, v);
        else if (key == "batch_size") c.batch_size = parse_value<int>(key, v);
        else if (key == "lr") c.lr = parse_value<double>(key, v);
        else if (key == "lr_decay_factor") c.lr_decay_factor = parse_value<double>(key, v);
        else if (key == "lr_decay_every") c.lr_decay_every = parse_value<int>(key, v);
        else if (key == "beta1") c.beta1 = parse_value<double>(key, v);
        else if (key == "beta2") c.beta2 = parse_value<double>(key, v);
        else if (key == "block_size") c.block_size = parse_value<int>(key, v);
        else if (key == "seed") c.seed = parse_value<std::uint64_t>(key, v);
        else if (key == "num_residual_blocks") c.num_residual_blocks = parse_value<int>(key, v);
        else if (key == "channels") c.channels = parse_value<int>(key, v);
        else if (key == "blocks_per_band") c.blocks_per_band = parse_value<int>(key, v);
        else if (key == "disc_base_channels") c.disc_base_channels = parse_value<int>(key, v);
        else if (key == "disc_dense_width") c.disc_dense_width = parse_value<int>(key, v);
        else if (key == "augment") c.augment = parse_bool(key, v);
        else throw Error("invalid config: unknown key '" + key + "'");
    }
}

std::string format_train_config(const TrainConfig& c) {
    std::ostringstream o;
    o << "stage = " << c.stage << "\n"
      << "epochs = " << c.epochs << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "lr = " << num(c.lr) << "\n"
      << "lr_decay_factor = " << num(c.lr_decay_factor) << "\n"
      << "lr_decay_every = " << c.lr_decay_every << "\n"
      << "beta1 = " << num(c.beta1) << "\n"
      << "beta2 = " << num(c.beta2) << "\n"
      << "block_size = " << c.block_size << "\n"
      << "seed = " << c.seed << "\n"
      << "num_residual_blocks = " << c.num_residual_blocks << "\n"
      << "channels = " << c.channels << "\n"
      << "blocks_per_band = " << c.blocks_per_band << "\n"
      << "disc_base_channels = " << c.disc_base_channels << "\n"
      << "disc_dense_width = " << c.disc_dense_width << "\n"
      << "augment = " << (c.augment ? "true" : "false") << "\n";
    return o.str();
}

}  // namespace sradapt
