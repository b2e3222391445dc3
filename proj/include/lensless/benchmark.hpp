#pragma once

#include <cstdint>
#include <optional>

#include "lensless/solvers.hpp"

namespace lensless {

struct BenchmarkOptions {
    std::size_t height = 512;
    std::size_t width = 512;
    /// 0 skips that algorithm.
    int n_iter_gd = 300;
    int n_iter_admm = 5;
    int repeats = 5;
    std::uint64_t seed = 0;
};

struct PathTiming {
    /// Median wall time over the repeats, planning through the last iteration.
    double real_seconds = 0.0;
    double complex_seconds = 0.0;
    /// max |x_real - x_complex| / max |x_complex|
    double relative_difference = 0.0;

    double speedup() const { return real_seconds > 0.0 ? complex_seconds / real_seconds : 0.0; }
};

struct BenchmarkResult {
    std::optional<PathTiming> gd;
    std::optional<PathTiming> admm;
};

/// Times grayscale GD and ADMM on a synthetic scene and PSF through the
/// real-input and the complex FFT paths.
BenchmarkResult run_benchmark(const BenchmarkOptions& options);

}  // namespace lensless
