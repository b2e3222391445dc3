#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lensless/image.hpp"

namespace lensless {

/// Colour of the top-left 2x2 tile, read row by row.
enum class BayerPattern { rggb, bggr, grbg, gbrg };

BayerPattern parse_bayer_pattern(const std::string& text);
const char* to_string(BayerPattern pattern);

struct WhiteBalance {
    double red_gain = 1.0;
    double blue_gain = 1.0;
};

/// Raw mosaic as read off the sensor (counts, not normalized).
struct BayerFrame {
    std::size_t height = 0;
    std::size_t width = 0;
    BayerPattern pattern = BayerPattern::rggb;
    int bit_depth = 12;
    double black_level = 0.0;
    WhiteBalance wb;
    std::vector<double> data;  // row-major counts
};

void validate(const BayerFrame& frame);

/// Black-level subtraction, normalization by (2^bit_depth - 1 - black_level),
/// bilinear interpolation of the missing colour samples (edges replicated),
/// red/blue gains, then clipping to [0, 1]. Output is 3-channel.
ImageTensor demosaic(const BayerFrame& frame);

/// demosaic followed by rgb_to_gray.
ImageTensor bayer_to_gray(const BayerFrame& frame);

/// Acquisition parameters that accompany a raw frame on disk.
struct BayerSidecar {
    BayerPattern pattern = BayerPattern::rggb;
    int bit_depth = 12;
    double black_level = 0.0;
    WhiteBalance wb;
};

/// Parses "key = value" lines (pattern, bit_depth, black_level,
/// wb_gains = "red, blue"); '#' starts a comment. Every key is required.
BayerSidecar parse_bayer_sidecar(const std::string& text);
BayerSidecar read_bayer_sidecar(const std::filesystem::path& path);

/// Loads raw counts from a 16-bit grayscale PNG/TIFF or single-channel LPC1
/// file and attaches the sidecar parameters.
BayerFrame load_bayer_frame(const std::filesystem::path& raw, const std::filesystem::path& sidecar);

}  // namespace lensless
