#include "lensless/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "lensless/image_io.hpp"

namespace lensless {

ImageTensor simulate_measurement(const ImageTensor& scene, const ConvolutionOperator& op, const SimulationConfig& cfg) {
    if (scene.shape() != op.shape()) {
        throw std::invalid_argument("scene shape " + to_string(scene.shape()) + " does not match PSF shape " +
                                    to_string(op.shape()));
    }
    if (std::isnan(cfg.snr_db) || cfg.snr_db == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("snr_db must be a number or +inf");
    }
    ImageTensor y = op.apply(scene);

    double signal_power = 0.0;
    for (double v : y.data()) signal_power += v * v;

    if (signal_power == 0.0) {
        // degenerate rule: nothing to scale the noise against
        y.fill(0.0);
        return y;
    }
    if (!std::isinf(cfg.snr_db)) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> noise(y.size());
        double noise_power = 0.0;
        for (double& n : noise) {
            n = normal(rng);
            noise_power += n * n;
        }
        const double target = signal_power / std::pow(10.0, cfg.snr_db / 10.0);
        const double scale = noise_power > 0.0 ? std::sqrt(target / noise_power) : 0.0;
        auto data = y.data();
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += scale * noise[i];
    }
    if (cfg.clip) {
        for (double& v : y.data()) v = std::max(v, 0.0);
    }
    return y;
}

ImageTensor simulate_measurement(const ImageTensor& scene, const Psf& psf, const SimulationConfig& cfg) {
    return simulate_measurement(scene, ConvolutionOperator(psf), cfg);
}

ImageTensor synthetic_scene(std::size_t height, std::size_t width, std::size_t channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ImageTensor img(height, width, channels, 0.0);
    const double h = static_cast<double>(height);
    const double w = static_cast<double>(width);

    // dark background with a few bright shapes inside the central half of the frame
    const int shapes = 4 + static_cast<int>(unit(rng) * 4.0);
    for (int s = 0; s < shapes; ++s) {
        const bool disc = unit(rng) < 0.5;
        const double cy = h * (0.25 + 0.5 * unit(rng));
        const double cx = w * (0.25 + 0.5 * unit(rng));
        const double ry = h * (0.04 + 0.12 * unit(rng));
        const double rx = disc ? ry : w * (0.04 + 0.12 * unit(rng));
        std::vector<double> level(channels);
        for (auto& l : level) l = 0.3 + 0.7 * unit(rng);
        for (std::size_t r = 0; r < height; ++r) {
            for (std::size_t c = 0; c < width; ++c) {
                const double dy = (static_cast<double>(r) + 0.5 - cy) / ry;
                const double dx = (static_cast<double>(c) + 0.5 - cx) / rx;
                const bool inside = disc ? dy * dy + dx * dx <= 1.0 : std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0;
                if (!inside) continue;
                for (std::size_t ch = 0; ch < channels; ++ch) img.at(r, c, ch) = level[ch];
            }
        }
    }
    return img;
}

ImageTensor synthetic_psf(std::size_t height, std::size_t width, std::size_t channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ImageTensor psf(height, width, channels, 0.0);
    const double h = static_cast<double>(height);
    const double w = static_cast<double>(width);
    const int spots = 12;
    const double sigma = std::max(0.6, std::min(h, w) / 64.0);
    for (int s = 0; s < spots; ++s) {
        const double cy = h * (0.2 + 0.6 * unit(rng));
        const double cx = w * (0.2 + 0.6 * unit(rng));
        const double amp = 0.5 + 0.5 * unit(rng);
        for (std::size_t r = 0; r < height; ++r) {
            for (std::size_t c = 0; c < width; ++c) {
                const double dy = static_cast<double>(r) - cy;
                const double dx = static_cast<double>(c) - cx;
                const double v = amp * std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
                for (std::size_t ch = 0; ch < channels; ++ch) psf.at(r, c, ch) += v;
            }
        }
    }
    return psf;
}

void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticDatasetSpec& spec) {
    if (spec.pairs == 0) throw std::invalid_argument("synthetic dataset needs at least one pair");
    namespace fs = std::filesystem;
    fs::create_directories(root / "diffuser");
    fs::create_directories(root / "lensed");

    const ImageTensor raw_psf = synthetic_psf(spec.height, spec.width, spec.channels, spec.seed);
    write_raw_array(raw_psf, root / "psf.lpc");
    const ConvolutionOperator op(calibrate_psf(raw_psf));

    for (std::size_t i = 0; i < spec.pairs; ++i) {
        std::string name = std::to_string(i);
        name = "scene_" + std::string(3 - std::min<std::size_t>(3, name.size()), '0') + name + ".lpc";
        const std::uint64_t seed = spec.seed + 1000 + i;
        const ImageTensor scene = synthetic_scene(spec.height, spec.width, spec.channels, seed);
        SimulationConfig cfg;
        cfg.snr_db = spec.snr_db;
        cfg.seed = seed;
        write_raw_array(simulate_measurement(scene, op, cfg), root / "diffuser" / name);
        write_raw_array(scene, root / "lensed" / name);
    }
}

}  // namespace lensless
