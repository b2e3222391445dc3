#include "lensless/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <stdexcept>
#include <string>

namespace lensless {

namespace {

// FFTW's planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

namespace detail {

void* fft_alloc(std::size_t bytes) {
    void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
    if (!p) throw std::bad_alloc();
    return p;
}

void fft_free(void* p) noexcept { fftw_free(p); }

}  // namespace detail

const char* to_string(FftPath path) { return path == FftPath::real ? "real" : "complex"; }

Fft2d::Fft2d(std::size_t rows, std::size_t cols, FftPath path)
    : rows_(rows), cols_(cols), spectrum_cols_(path == FftPath::real ? cols / 2 + 1 : cols), path_(path) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("FFT grid must be non-empty");
    const int n0 = static_cast<int>(rows);
    const int n1 = static_cast<int>(cols);
    // FFTW_ESTIMATE keeps plans (and therefore results) identical run to run.
    const unsigned flags = FFTW_ESTIMATE;

    RealBuffer real = make_real();
    SpectrumBuffer spec = make_spectrum();
    std::lock_guard lock(planner_mutex());
    if (path == FftPath::real) {
        forward_plan_ = fftw_plan_dft_r2c_2d(n0, n1, real.data(), as_fftw(spec.data()), flags);
        inverse_plan_ = fftw_plan_dft_c2r_2d(n0, n1, as_fftw(spec.data()), real.data(), flags);
    } else {
        // In-place complex transforms; the real data is widened into the spectrum buffer.
        forward_plan_ = fftw_plan_dft_2d(n0, n1, as_fftw(spec.data()), as_fftw(spec.data()), FFTW_FORWARD, flags);
        inverse_plan_ = fftw_plan_dft_2d(n0, n1, as_fftw(spec.data()), as_fftw(spec.data()), FFTW_BACKWARD, flags);
    }
    if (!forward_plan_ || !inverse_plan_) {
        throw std::runtime_error("FFTW failed to plan a " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 " transform");
    }
}

Fft2d::~Fft2d() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fft2d::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
    if (in.size() != real_size() || out.size() != spectrum_size()) {
        throw std::invalid_argument("Fft2d::forward: buffer size mismatch");
    }
    if (path_ == FftPath::real) {
        // r2c never writes to its input.
        fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                             as_fftw(out.data()));
    } else {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = {in[i], 0.0};
        fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(out.data()), as_fftw(out.data()));
    }
}

void Fft2d::inverse(std::span<std::complex<double>> spectrum, std::span<double> out) const {
    if (out.size() != real_size() || spectrum.size() != spectrum_size()) {
        throw std::invalid_argument("Fft2d::inverse: buffer size mismatch");
    }
    const double scale = 1.0 / static_cast<double>(real_size());
    if (path_ == FftPath::real) {
        fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), as_fftw(spectrum.data()), out.data());
        for (double& v : out) v *= scale;
    } else {
        fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(spectrum.data()),
                         as_fftw(spectrum.data()));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = spectrum[i].real() * scale;
    }
}

std::pair<long, long> Fft2d::frequency(std::size_t row, std::size_t col) const {
    const auto signed_freq = [](std::size_t k, std::size_t n) {
        return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    };
    return {signed_freq(row, rows_), signed_freq(col, cols_)};
}

}  // namespace lensless
