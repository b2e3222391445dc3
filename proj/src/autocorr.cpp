#include "lensless/autocorr.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <stdexcept>

#include "lensless/convolution.hpp"
#include "lensless/fft.hpp"

namespace lensless {

ImageTensor autocorr2d(const ImageTensor& img) {
    if (img.channels() != 1) {
        throw std::invalid_argument("autocorr2d expects a single-channel image, got " +
                                    std::to_string(img.channels()) + " channels");
    }
    const std::size_t h = img.height();
    const std::size_t w = img.width();
    const Fft2d fft(2 * h, 2 * w, FftPath::real);
    RealBuffer padded = fft.make_real();
    SpectrumBuffer spec = fft.make_spectrum();
    const auto src = img.plane(0);
    for (std::size_t r = 0; r < h; ++r) {
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(r * w), w,
                    padded.begin() + static_cast<std::ptrdiff_t>(r * 2 * w));
    }
    fft.forward(padded, spec);
    for (auto& v : spec) v = std::norm(v);
    fft.inverse(spec, padded);

    // Circular lag k in [0, 2N) maps to signed lag k or k - 2N; only |lag| < N is non-zero.
    ImageTensor out(2 * h - 1, 2 * w - 1, 1);
    for (std::size_t r = 0; r < out.height(); ++r) {
        const std::size_t pr = (r + h + 1) % (2 * h);  // r - (h - 1) mod 2h
        for (std::size_t c = 0; c < out.width(); ++c) {
            const std::size_t pc = (c + w + 1) % (2 * w);
            out.at(r, c) = padded[pr * 2 * w + pc];
        }
    }
    return out;
}

PsfReport psf_report(const Psf& psf) {
    const ConvolutionOperator op(psf, FftPath::real);
    PsfReport report{psf.shape().height, psf.shape().width, {}};
    const long h = static_cast<long>(report.height);
    const long w = static_cast<long>(report.width);

    for (std::size_t c = 0; c < psf.shape().channels; ++c) {
        PsfChannelReport ch;
        ImageTensor plane(report.height, report.width, 1);
        std::copy(psf.image.plane(c).begin(), psf.image.plane(c).end(), plane.data().begin());

        const ImageTensor ac = autocorr2d(plane);
        ch.autocorr_peak = ac.at(static_cast<std::size_t>(h - 1), static_cast<std::size_t>(w - 1));
        bool any_sidelobe = false;
        for (long r = 0; r < static_cast<long>(ac.height()); ++r) {
            for (long col = 0; col < static_cast<long>(ac.width()); ++col) {
                const long dr = r - (h - 1);
                const long dc = col - (w - 1);
                if (std::abs(dr) <= 1 && std::abs(dc) <= 1) continue;
                const double v = ac.at(static_cast<std::size_t>(r), static_cast<std::size_t>(col));
                if (!any_sidelobe || v > ch.max_sidelobe) {
                    ch.max_sidelobe = v;
                    ch.sidelobe_row_lag = dr;
                    ch.sidelobe_col_lag = dc;
                    any_sidelobe = true;
                }
            }
        }
        // FFT round-off leaves ~1e-17 residue where the true value is zero.
        const double noise_floor = 1e-12 * ch.autocorr_peak;
        if (!any_sidelobe || ch.max_sidelobe <= noise_floor) {
            ch.max_sidelobe = std::max(ch.max_sidelobe, 0.0);
            ch.sidelobe_to_peak = 0.0;
            ch.sidelobe_row_lag = ch.sidelobe_col_lag = 0;
        } else {
            ch.peak_to_sidelobe = ch.autocorr_peak / ch.max_sidelobe;
            ch.sidelobe_to_peak = ch.max_sidelobe / ch.autocorr_peak;
        }

        double lo = INFINITY, hi = 0.0;
        for (const auto& v : op.spectrum(c)) {
            const double m = std::abs(v);
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        ch.conditioning = hi > 0.0 ? lo / hi : 0.0;

        const auto values = psf.image.plane(c);
        const double peak = *std::max_element(values.begin(), values.end());
        ch.support_pixels = static_cast<std::size_t>(
            std::count_if(values.begin(), values.end(), [&](double v) { return v > 0.01 * peak; }));
        ch.support_fraction = static_cast<double>(ch.support_pixels) / static_cast<double>(values.size());
        report.channels.push_back(ch);
    }
    return report;
}

}  // namespace lensless
