#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace lensless {

/// Which transform backs a frequency-domain operator.
///
/// `real` uses the real-input FFT and stores only the non-redundant half
/// spectrum (rows x (cols/2 + 1)). `complex` runs a full complex FFT on the
/// real data and is kept as the reference path for benchmarking.
enum class FftPath { real, complex };

const char* to_string(FftPath path);

namespace detail {
void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;
}  // namespace detail

/// Allocator returning SIMD-aligned memory suitable for FFT execution.
template <typename T>
struct FftAllocator {
    using value_type = T;
    FftAllocator() = default;
    template <typename U>
    FftAllocator(const FftAllocator<U>&) noexcept {}
    T* allocate(std::size_t n) { return static_cast<T*>(detail::fft_alloc(n * sizeof(T))); }
    void deallocate(T* p, std::size_t) noexcept { detail::fft_free(p); }
    template <typename U>
    bool operator==(const FftAllocator<U>&) const noexcept { return true; }
};

using RealBuffer = std::vector<double, FftAllocator<double>>;
using SpectrumBuffer = std::vector<std::complex<double>, FftAllocator<std::complex<double>>>;

/// Planned 2D transform over a rows x cols real grid.
///
/// Planning happens once in the constructor; execution is const and safe
/// from several threads as long as each caller supplies its own buffers.
/// Buffers must come from RealBuffer/SpectrumBuffer (aligned).
class Fft2d {
public:
    Fft2d(std::size_t rows, std::size_t cols, FftPath path);
    ~Fft2d();
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    FftPath path() const { return path_; }
    std::size_t real_size() const { return rows_ * cols_; }
    /// Columns stored per spectrum row: cols/2 + 1 (real) or cols (complex).
    std::size_t spectrum_cols() const { return spectrum_cols_; }
    std::size_t spectrum_size() const { return rows_ * spectrum_cols_; }

    /// Unnormalized forward transform; `in` is preserved.
    void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
    /// Inverse transform scaled by 1/(rows*cols). `spectrum` is overwritten.
    void inverse(std::span<std::complex<double>> spectrum, std::span<double> out) const;

    RealBuffer make_real() const { return RealBuffer(real_size(), 0.0); }
    SpectrumBuffer make_spectrum() const { return SpectrumBuffer(spectrum_size()); }

    /// Signed frequency (row, col) of a stored spectrum bin.
    std::pair<long, long> frequency(std::size_t row, std::size_t col) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t spectrum_cols_;
    FftPath path_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

}  // namespace lensless
