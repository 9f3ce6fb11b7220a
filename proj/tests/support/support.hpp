#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sradapt/frame.hpp"
#include "sradapt/tensor.hpp"

namespace sradapt::testing {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

Tensor random_tensor(const Shape& shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0,
                     bool requires_grad = true);

// Values in [lo, hi] whose magnitude is at least `margin`; for kinked ops.
Tensor random_away_from_zero(const Shape& shape, std::uint64_t seed, double margin, bool requires_grad = true);

// Scalar sum(out * w) for fixed pseudo-random w, so every output element
// contributes with a distinct weight.
Tensor project(const Tensor& out, std::uint64_t seed);

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

// Compares backward() against central differences for every element of every
// leaf. Relative error is |a - n| / max(|a|, |n|, floor).
GradCheckResult grad_check(const std::function<Tensor()>& scalar_fn, const std::vector<Tensor>& leaves,
                           double step = 1e-6, double floor = 1e-3);

Frame random_frame(const Geometry& g, std::uint64_t seed);

}  // namespace sradapt::testing
