#pragma once

#include <map>
#include <optional>
#include <string>

#include "lensless/image.hpp"

namespace lensless {

struct MetricReport {
    double mse = 0.0;
    /// Empty when mse == 0 (PSNR is unbounded).
    std::optional<double> psnr_db;
    double ssim = 0.0;
    /// Room for additional metrics keyed by name.
    std::map<std::string, double> extra;
};

double mse(const ImageTensor& a, const ImageTensor& b);

/// 10 log10(peak^2 / mse). Throws std::domain_error for identical images.
double psnr(const ImageTensor& a, const ImageTensor& b, double peak = 1.0);

/// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03 and dynamic range `peak`, averaged over all window positions that
/// fit inside the image and then over channels.
double ssim(const ImageTensor& a, const ImageTensor& b, double peak = 1.0);

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Compares a reconstruction against a reference image.
///
/// The region (whole image if absent) is cut from the reconstruction, the
/// reference is resized to the region's size, both are divided by their own
/// maximum and all metrics are computed with peak 1. If one image is RGB
/// and the other grayscale, the RGB one is converted to grayscale first.
MetricReport compare(const ImageTensor& reconstruction, const ImageTensor& reference,
                     const std::optional<Region>& region = std::nullopt);

/// Arithmetic mean of each metric; psnr is averaged over reports that have one.
MetricReport average(const std::vector<MetricReport>& reports);

}  // namespace lensless
