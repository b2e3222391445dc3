#include "lensless/psf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lensless {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty set");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Psf calibrate_psf(const ImageTensor& raw, double floor_percentile) {
    if (!raw.all_finite()) throw std::invalid_argument("PSF contains NaN or Inf");
    if (raw.min_value() < 0.0) throw std::invalid_argument("PSF must be non-negative");

    Psf psf{raw, {}, {}};
    for (std::size_t c = 0; c < raw.channels(); ++c) {
        auto plane = psf.image.plane(c);
        const double floor = quantile(std::vector<double>(plane.begin(), plane.end()), floor_percentile);
        for (double& v : plane) v = std::max(v - floor, 0.0);
        const double total = std::accumulate(plane.begin(), plane.end(), 0.0);
        if (!(total > 0.0)) {
            throw std::invalid_argument("PSF channel " + std::to_string(c) +
                                        " is identically zero after background subtraction");
        }
        const double scale = 1.0 / total;
        for (double& v : plane) v *= scale;
        psf.background_floor.push_back(floor);
        psf.normalization.push_back(scale);
    }
    return psf;
}

}  // namespace lensless
