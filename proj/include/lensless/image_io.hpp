#pragma once

#include <cstdint>
#include <filesystem>

#include "lensless/image.hpp"

namespace lensless {

enum class ImageFormat { png, tiff, lpc_raw };

/// Picks the on-disk format from the file extension (.png, .tif/.tiff,
/// .lpc/.raw). Throws for anything else.
ImageFormat format_from_extension(const std::filesystem::path& path);

/// Reads an 8/16-bit grayscale or RGB PNG/TIFF, or an LPC1 raw array; the
/// format is detected from the file's magic bytes.
///
/// With `as_float` set, integer formats are divided by the bit-depth maximum
/// (255 or 65535). Without it the raw integer counts are returned unscaled,
/// which is what Bayer frames need. LPC1 data is returned as stored.
ImageTensor load_image(const std::filesystem::path& path, bool as_float = true);

/// Writes PNG/TIFF (quantized to 8 or 16 bits after clipping to [0, 1]) or
/// LPC1 (float64, unclipped), chosen by extension.
void save_image(const ImageTensor& img, const std::filesystem::path& path, int bit_depth = 8);

/// LPC1 layout: "LPC1", u32 height, u32 width, u32 channels (little-endian),
/// then height*width*channels float64 values, planar, row-major.
ImageTensor read_raw_array(const std::filesystem::path& path);
void write_raw_array(const ImageTensor& img, const std::filesystem::path& path);

/// round(v * (2^bit_depth - 1)) after clipping to [0, 1]; halves round up.
std::uint32_t quantize(double value, int bit_depth);

}  // namespace lensless
