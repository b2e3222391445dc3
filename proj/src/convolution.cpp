#include "lensless/convolution.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lensless {

namespace {

// Writes `plane` into the zeroed padded grid at (row0, col0).
void embed(std::span<const double> plane, std::size_t h, std::size_t w, std::span<double> padded,
           std::size_t padded_cols, std::size_t row0, std::size_t col0) {
    std::fill(padded.begin(), padded.end(), 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        std::copy_n(plane.begin() + static_cast<std::ptrdiff_t>(r * w), w,
                    padded.begin() + static_cast<std::ptrdiff_t>((row0 + r) * padded_cols + col0));
    }
}

void crop(std::span<const double> padded, std::size_t padded_cols, std::size_t row0, std::size_t col0,
          std::size_t h, std::size_t w, std::span<double> plane) {
    for (std::size_t r = 0; r < h; ++r) {
        std::copy_n(padded.begin() + static_cast<std::ptrdiff_t>((row0 + r) * padded_cols + col0), w,
                    plane.begin() + static_cast<std::ptrdiff_t>(r * w));
    }
}

}  // namespace

ConvolutionOperator::ConvolutionOperator(const Psf& psf, FftPath path)
    : shape_(psf.shape()), fft_(std::make_unique<Fft2d>(2 * shape_.height, 2 * shape_.width, path)) {
    RealBuffer padded = fft_->make_real();
    for (std::size_t c = 0; c < shape_.channels; ++c) {
        embed(psf.image.plane(c), shape_.height, shape_.width, padded, fft_->cols(), 0, 0);
        SpectrumBuffer spec = fft_->make_spectrum();
        fft_->forward(padded, spec);
        for (const auto& v : spec) lipschitz_ = std::max(lipschitz_, std::norm(v));
        spectra_.push_back(std::move(spec));
    }
}

std::shared_ptr<const ConvolutionOperator> plan_convolution(const Psf& psf, FftPath path) {
    return std::make_shared<const ConvolutionOperator>(psf, path);
}

ImageTensor ConvolutionOperator::apply(const ImageTensor& x) const {
    ImageTensor out(shape_);
    Workspace ws = make_workspace();
    apply(x, out, ws);
    return out;
}

ImageTensor ConvolutionOperator::adjoint(const ImageTensor& y) const {
    ImageTensor out(shape_);
    Workspace ws = make_workspace();
    adjoint(y, out, ws);
    return out;
}

void ConvolutionOperator::apply(const ImageTensor& x, ImageTensor& out, Workspace& ws) const {
    if (x.shape() != shape_ || out.shape() != shape_) {
        throw std::invalid_argument("convolution apply: expected shape " + to_string(shape_) + ", got " +
                                    to_string(x.shape()));
    }
    const std::size_t pc = fft_->cols();
    for (std::size_t c = 0; c < shape_.channels; ++c) {
        embed(x.plane(c), shape_.height, shape_.width, ws.padded, pc, 0, 0);
        fft_->forward(ws.padded, ws.spectrum);
        const auto& h = spectra_[c];
        for (std::size_t k = 0; k < ws.spectrum.size(); ++k) ws.spectrum[k] *= h[k];
        fft_->inverse(ws.spectrum, ws.padded);
        crop(ws.padded, pc, crop_row(), crop_col(), shape_.height, shape_.width, out.plane(c));
    }
}

void ConvolutionOperator::adjoint(const ImageTensor& y, ImageTensor& out, Workspace& ws) const {
    if (y.shape() != shape_ || out.shape() != shape_) {
        throw std::invalid_argument("convolution adjoint: expected shape " + to_string(shape_) + ", got " +
                                    to_string(y.shape()));
    }
    const std::size_t pc = fft_->cols();
    for (std::size_t c = 0; c < shape_.channels; ++c) {
        embed(y.plane(c), shape_.height, shape_.width, ws.padded, pc, crop_row(), crop_col());
        fft_->forward(ws.padded, ws.spectrum);
        const auto& h = spectra_[c];
        for (std::size_t k = 0; k < ws.spectrum.size(); ++k) ws.spectrum[k] *= std::conj(h[k]);
        fft_->inverse(ws.spectrum, ws.padded);
        crop(ws.padded, pc, 0, 0, shape_.height, shape_.width, out.plane(c));
    }
}

}  // namespace lensless
