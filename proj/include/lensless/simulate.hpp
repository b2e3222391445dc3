#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>

#include "lensless/convolution.hpp"
#include "lensless/image.hpp"
#include "lensless/psf.hpp"

namespace lensless {

struct SimulationConfig {
    /// Target 10 log10(||signal||^2 / ||noise||^2); +inf disables noise.
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    /// Clamp negative measurements to zero.
    bool clip = true;
};

/// y = G scene + n, with Gaussian n rescaled so the signal-to-noise ratio is
/// exactly snr_db before clipping. A zero signal produces y = 0.
ImageTensor simulate_measurement(const ImageTensor& scene, const ConvolutionOperator& op, const SimulationConfig& cfg);
ImageTensor simulate_measurement(const ImageTensor& scene, const Psf& psf, const SimulationConfig& cfg);

/// Random piecewise-constant scene (rectangles and discs) in [0, 1].
ImageTensor synthetic_scene(std::size_t height, std::size_t width, std::size_t channels, std::uint64_t seed);

/// Diffuser-like caustic PSF: a handful of small Gaussian spots scattered
/// over the frame. Not normalized; pass through calibrate_psf.
ImageTensor synthetic_psf(std::size_t height, std::size_t width, std::size_t channels, std::uint64_t seed);

struct SyntheticDatasetSpec {
    std::size_t pairs = 10;
    std::size_t height = 64;
    std::size_t width = 64;
    std::size_t channels = 1;
    double snr_db = 40.0;
    std::uint64_t seed = 0;
};

/// Writes root/psf.lpc, root/diffuser/scene_NNN.lpc (simulated measurements)
/// and root/lensed/scene_NNN.lpc (ground-truth scenes).
void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticDatasetSpec& spec);

}  // namespace lensless
