#include "lensless/prox.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lensless {

void soft_threshold(std::span<double> v, double threshold) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("soft threshold must be >= 0");
    if (threshold == 0.0) return;
    for (double& x : v) {
        const double mag = std::abs(x) - threshold;
        x = mag > 0.0 ? std::copysign(mag, x) : 0.0;
    }
}

std::vector<double> soft_threshold(std::span<const double> v, double threshold) {
    std::vector<double> out(v.begin(), v.end());
    soft_threshold(std::span<double>(out), threshold);
    return out;
}

void project_nonnegative(std::span<double> v) {
    for (double& x : v) x = x > 0.0 ? x : 0.0;
}

double L1Norm::value(std::span<const double> x) const {
    double total = 0.0;
    for (double v : x) total += std::abs(v);
    return total;
}

double NonNegative::value(std::span<const double> x) const {
    for (double v : x) {
        if (v < 0.0) return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

}  // namespace lensless
