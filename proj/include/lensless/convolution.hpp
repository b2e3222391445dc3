#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "lensless/fft.hpp"
#include "lensless/image.hpp"
#include "lensless/psf.hpp"

namespace lensless {

/// Forward model of a shift-invariant lensless camera: zero-boundary linear
/// convolution with the PSF, evaluated on a 2H x 2W padded grid and cropped
/// back to H x W.
///
/// The scene is placed at the origin of the padded grid and the output
/// window starts at (H/2, W/2), so a PSF with a single unit impulse at
/// (H/2, W/2) is the identity. The PSF spectrum is computed once here; the
/// object is immutable afterwards and may be shared between threads.
class ConvolutionOperator {
public:
    /// Per-caller scratch so that concurrent apply/adjoint calls never share memory.
    struct Workspace {
        RealBuffer padded;
        SpectrumBuffer spectrum;
    };

    explicit ConvolutionOperator(const Psf& psf, FftPath path = FftPath::real);

    const Shape& shape() const { return shape_; }
    std::size_t padded_rows() const { return fft_->rows(); }
    std::size_t padded_cols() const { return fft_->cols(); }
    std::size_t crop_row() const { return shape_.height / 2; }
    std::size_t crop_col() const { return shape_.width / 2; }
    FftPath path() const { return fft_->path(); }
    const Fft2d& fft() const { return *fft_; }

    /// Transform of the zero-padded PSF for one channel, in fft() layout.
    std::span<const std::complex<double>> spectrum(std::size_t channel) const { return spectra_.at(channel); }

    /// max |spectrum|^2 over channels and frequencies; bounds ||G||^2.
    double lipschitz() const { return lipschitz_; }

    Workspace make_workspace() const { return {fft_->make_real(), fft_->make_spectrum()}; }

    ImageTensor apply(const ImageTensor& x) const;
    ImageTensor adjoint(const ImageTensor& y) const;
    void apply(const ImageTensor& x, ImageTensor& out, Workspace& ws) const;
    void adjoint(const ImageTensor& y, ImageTensor& out, Workspace& ws) const;

private:
    Shape shape_;
    std::unique_ptr<Fft2d> fft_;
    std::vector<SpectrumBuffer> spectra_;
    double lipschitz_ = 0.0;
};

/// Pre-computes the padded PSF spectra for the chosen FFT path.
std::shared_ptr<const ConvolutionOperator> plan_convolution(const Psf& psf, FftPath path = FftPath::real);

}  // namespace lensless
