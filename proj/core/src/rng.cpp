#include "sradapt/rng.hpp"

#include <cmath>
#include <numbers>

namespace sradapt {

double CounterRng::next_normal() {
    double u1 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::next_truncated_normal(double stddev) {
    for (;;) {
        const double z = next_normal();
        if (std::abs(z) <= 2.0) return z * stddev;
    }
}

}  // namespace sradapt
