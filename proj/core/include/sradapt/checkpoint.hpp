#pragma once

#include <filesystem>
#include <optional>

#include "sradapt/networks.hpp"

namespace sradapt {

inline constexpr int kCheckpointVersion = 1;

// Writes a text manifest (format version, configs, one line per parameter with
// name/dtype/shape/offset/count, data size, CRC-32) followed by the raw
// little-endian float64 parameter data.
void save_checkpoint(const ModelBundle& bundle, const std::filesystem::path& path);

// Rebuilds the bundle from the stored config. With `expected` set, every
// generator parameter is also checked against the shapes that config implies.
ModelBundle load_checkpoint(const std::filesystem::path& path,
                            const std::optional<GeneratorConfig>& expected = std::nullopt);

}  // namespace sradapt
