#include "lensless/metrics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace lensless {

namespace {

std::array<double, kSsimWindow> gaussian_taps() {
    std::array<double, kSsimWindow> taps{};
    const double center = static_cast<double>(kSsimWindow / 2);
    double total = 0.0;
    for (std::size_t i = 0; i < kSsimWindow; ++i) {
        const double d = static_cast<double>(i) - center;
        taps[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        total += taps[i];
    }
    for (double& t : taps) t /= total;
    return taps;
}

// Separable "valid" Gaussian filter of an h x w plane.
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t h, std::size_t w,
                                 const std::array<double, kSsimWindow>& taps) {
    const std::size_t oh = h - kSsimWindow + 1;
    const std::size_t ow = w - kSsimWindow + 1;
    std::vector<double> rows(h * ow);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < kSsimWindow; ++k) acc += taps[k] * src[r * w + c + k];
            rows[r * ow + c] = acc;
        }
    }
    std::vector<double> out(oh * ow);
    for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < kSsimWindow; ++k) acc += taps[k] * rows[(r + k) * ow + c];
            out[r * ow + c] = acc;
        }
    }
    return out;
}

double ssim_plane(std::span<const double> a, std::span<const double> b, std::size_t h, std::size_t w, double peak) {
    static const auto taps = gaussian_taps();
    const double c1 = (kSsimK1 * peak) * (kSsimK1 * peak);
    const double c2 = (kSsimK2 * peak) * (kSsimK2 * peak);

    const std::size_t n = h * w;
    std::vector<double> va(a.begin(), a.end()), vb(b.begin(), b.end());
    std::vector<double> aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = filter_valid(va, h, w, taps);
    const auto mu_b = filter_valid(vb, h, w, taps);
    const auto e_aa = filter_valid(aa, h, w, taps);
    const auto e_bb = filter_valid(bb, h, w, taps);
    const auto e_ab = filter_valid(ab, h, w, taps);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        const double var_a = e_aa[i] - ma * ma;
        const double var_b = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
        const double den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
        total += num / den;
    }
    return total / static_cast<double>(mu_a.size());
}

ImageTensor normalized_by_max(ImageTensor img) {
    const double m = img.max_value();
    if (m > 0.0) {
        for (double& v : img.data()) v /= m;
    }
    return img;
}

}  // namespace

double mse(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr(const ImageTensor& a, const ImageTensor& b, double peak) {
    if (!(peak > 0.0)) throw std::invalid_argument("psnr peak must be > 0");
    const double err = mse(a, b);
    if (err == 0.0) throw std::domain_error("psnr is unbounded for identical images");
    return 10.0 * std::log10(peak * peak / err);
}

double ssim(const ImageTensor& a, const ImageTensor& b, double peak) {
    require_same_shape(a, b, "ssim");
    if (!(peak > 0.0)) throw std::invalid_argument("ssim peak must be > 0");
    if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
        throw std::invalid_argument("ssim needs images of at least " + std::to_string(kSsimWindow) + "x" +
                                    std::to_string(kSsimWindow) + ", got " + to_string(a.shape()));
    }
    double total = 0.0;
    for (std::size_t c = 0; c < a.channels(); ++c) {
        total += ssim_plane(a.plane(c), b.plane(c), a.height(), a.width(), peak);
    }
    return total / static_cast<double>(a.channels());
}

MetricReport compare(const ImageTensor& reconstruction, const ImageTensor& reference,
                     const std::optional<Region>& region) {
    ImageTensor rec = region ? extract_region(reconstruction, *region) : reconstruction;
    ImageTensor ref = resize_to(reference, rec.height(), rec.width());
    if (rec.channels() != ref.channels()) {
        if (rec.channels() == 3) rec = rgb_to_gray(rec);
        if (ref.channels() == 3) ref = rgb_to_gray(ref);
    }
    rec = normalized_by_max(std::move(rec));
    ref = normalized_by_max(std::move(ref));

    MetricReport report;
    report.mse = mse(rec, ref);
    if (report.mse > 0.0) report.psnr_db = 10.0 * std::log10(1.0 / report.mse);
    report.ssim = ssim(rec, ref, 1.0);
    return report;
}

MetricReport average(const std::vector<MetricReport>& reports) {
    MetricReport mean;
    if (reports.empty()) return mean;
    double psnr_sum = 0.0;
    std::size_t psnr_count = 0;
    for (const auto& r : reports) {
        mean.mse += r.mse;
        mean.ssim += r.ssim;
        if (r.psnr_db) {
            psnr_sum += *r.psnr_db;
            ++psnr_count;
        }
    }
    const auto n = static_cast<double>(reports.size());
    mean.mse /= n;
    mean.ssim /= n;
    if (psnr_count > 0) mean.psnr_db = psnr_sum / static_cast<double>(psnr_count);
    return mean;
}

}  // namespace lensless
