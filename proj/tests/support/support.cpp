#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "sradapt/ops.hpp"
#include "sradapt/rng.hpp"

namespace sradapt::testing {

TempDir::TempDir(const std::string& tag) {
    std::string templ = (std::filesystem::temp_directory_path() / ("sradapt_" + tag + "_XXXXXX")).string();
    if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed for " + templ);
    path_ = templ;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

Tensor random_tensor(const Shape& shape, std::uint64_t seed, double lo, double hi, bool requires_grad) {
    CounterRng rng(seed);
    std::vector<double> v(element_count(shape));
    for (auto& x : v) x = lo + (hi - lo) * rng.next_unit();
    return Tensor::from(shape, std::move(v), requires_grad);
}

Tensor random_away_from_zero(const Shape& shape, std::uint64_t seed, double margin, bool requires_grad) {
    CounterRng rng(seed);
    std::vector<double> v(element_count(shape));
    for (auto& x : v) {
        const double mag = margin + (1.0 - margin) * rng.next_unit();
        x = rng.next_below(2) ? mag : -mag;
    }
    return Tensor::from(shape, std::move(v), requires_grad);
}

Tensor project(const Tensor& out, std::uint64_t seed) {
    return sum(mul(out, random_tensor(out.shape(), seed ^ 0x5eedULL, -1.0, 1.0, false)));
}

GradCheckResult grad_check(const std::function<Tensor()>& scalar_fn, const std::vector<Tensor>& leaves,
                           double step, double floor) {
    for (auto leaf : leaves) leaf.zero_grad();
    backward(scalar_fn());
    GradCheckResult result;
    NoGradGuard guard;
    for (auto leaf : leaves) {
        const std::vector<double> analytic(leaf.grad().begin(), leaf.grad().end());
        auto values = leaf.mutable_values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double orig = values[i];
            values[i] = orig + step;
            const double up = scalar_fn().item();
            values[i] = orig - step;
            const double down = scalar_fn().item();
            values[i] = orig;
            const double numeric = (up - down) / (2 * step);
            const double a = analytic.empty() ? 0.0 : analytic[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), floor});
            result.max_rel_error = std::max(result.max_rel_error, std::abs(a - numeric) / denom);
            ++result.checked;
        }
    }
    return result;
}

Frame random_frame(const Geometry& g, std::uint64_t seed) {
    Frame f(g);
    CounterRng rng(seed);
    const std::uint64_t levels = 1ULL << g.bit_depth;
    for (auto& p : f.planes)
        for (auto& s : p.samples) s = static_cast<std::uint16_t>(rng.next_below(levels));
    return f;
}

}  // namespace sradapt::testing
