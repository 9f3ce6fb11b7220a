#pragma once

#include <cstdint>

namespace sradapt {

// Counter-based generator: output i is a pure function of (key, i).
// split() derives an independent stream, so datasets and initializers can be
// seeded hierarchically without sharing state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(mix(key ^ 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t next_u64() { return mix(key_ + kGolden * ++counter_); }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) using the multiply-high reduction.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Standard normal via Box-Muller (one value per call, the pair is not cached).
    double next_normal();

    // Normal with the given stddev, redrawn until |z| <= 2 stddev.
    double next_truncated_normal(double stddev);

    CounterRng split(std::uint64_t stream) const { return CounterRng(mix(key_ ^ mix(stream + 1))); }

    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace sradapt
