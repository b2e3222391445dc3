#pragma once

#include <optional>
#include <vector>

#include "lensless/image.hpp"
#include "lensless/psf.hpp"

namespace lensless {

/// 2D autocorrelation computed through the FFT.
///
/// Input must be single-channel H x W. The result is (2H-1) x (2W-1) with
/// the zero lag at (H-1, W-1); output(H-1+dr, W-1+dc) = sum img(r,c) img(r+dr,c+dc).
ImageTensor autocorr2d(const ImageTensor& img);

struct PsfChannelReport {
    double autocorr_peak = 0.0;
    /// Largest autocorrelation value outside the 3x3 neighbourhood of zero lag.
    double max_sidelobe = 0.0;
    long sidelobe_row_lag = 0;
    long sidelobe_col_lag = 0;
    /// peak / max_sidelobe; empty when there is no sidelobe at all.
    std::optional<double> peak_to_sidelobe;
    double sidelobe_to_peak = 0.0;
    /// min |H(f)| / max |H(f)| over the padded spectrum.
    double conditioning = 0.0;
    /// Pixels above 1% of the channel maximum.
    std::size_t support_pixels = 0;
    double support_fraction = 0.0;
};

struct PsfReport {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<PsfChannelReport> channels;
};

PsfReport psf_report(const Psf& psf);

}  // namespace lensless
