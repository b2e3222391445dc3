#include "lensless/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lensless/simulate.hpp"

namespace lensless {

namespace {

struct Run {
    double seconds = 0.0;
    ImageTensor image;
};

Run time_once(const Psf& psf, const ImageTensor& y, SolverConfig config) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rec = make_reconstruction(psf, config);
    rec->set_data(y);
    ImageTensor image = rec->apply(config.n_iter);
    return {std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), std::move(image)};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PathTiming compare_paths(const Psf& psf, const ImageTensor& y, Algorithm algo, int n_iter, int repeats) {
    SolverConfig config;
    config.algorithm = algo;
    config.n_iter = n_iter;
    std::vector<double> real_t, complex_t;
    ImageTensor real_x(y.shape()), complex_x(y.shape());
    // alternate the paths so drift in machine load hits both alike
    for (int r = 0; r < repeats; ++r) {
        config.fft_path = FftPath::real;
        Run a = time_once(psf, y, config);
        config.fft_path = FftPath::complex;
        Run b = time_once(psf, y, config);
        real_t.push_back(a.seconds);
        complex_t.push_back(b.seconds);
        real_x = std::move(a.image);
        complex_x = std::move(b.image);
    }
    PathTiming t;
    t.real_seconds = median(real_t);
    t.complex_seconds = median(complex_t);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < real_x.size(); ++i) {
        diff = std::max(diff, std::abs(real_x.data()[i] - complex_x.data()[i]));
        scale = std::max(scale, std::abs(complex_x.data()[i]));
    }
    t.relative_difference = scale > 0.0 ? diff / scale : diff;
    return t;
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkOptions& options) {
    if (options.repeats < 1) throw std::invalid_argument("benchmark needs at least one repeat");
    if (options.n_iter_gd < 0 || options.n_iter_admm < 0) throw std::invalid_argument("iteration counts must be >= 0");
    const Psf psf = calibrate_psf(synthetic_psf(options.height, options.width, 1, options.seed));
    SimulationConfig sim;
    sim.snr_db = 40.0;
    sim.seed = options.seed;
    const ImageTensor y = simulate_measurement(synthetic_scene(options.height, options.width, 1, options.seed), psf, sim);

    BenchmarkResult result;
    if (options.n_iter_gd > 0) result.gd = compare_paths(psf, y, Algorithm::gd, options.n_iter_gd, options.repeats);
    if (options.n_iter_admm > 0) {
        result.admm = compare_paths(psf, y, Algorithm::admm, options.n_iter_admm, options.repeats);
    }
    return result;
}

}  // namespace lensless
