#pragma once

#include <vector>

#include "lensless/image.hpp"

namespace lensless {

/// Calibrated point spread function: non-negative, each channel summing to 1.
struct Psf {
    ImageTensor image;
    /// Per-channel background level that was subtracted.
    std::vector<double> background_floor;
    /// Per-channel factor applied after floor subtraction to reach unit sum.
    std::vector<double> normalization;

    const Shape& shape() const { return image.shape(); }
};

/// Linear-interpolated quantile (numpy's default) of `values`, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Per channel: subtract the `floor_percentile` quantile, clamp at zero and
/// rescale to unit sum. Throws if a channel is all zero after subtraction.
Psf calibrate_psf(const ImageTensor& raw, double floor_percentile = 0.0);

}  // namespace lensless
