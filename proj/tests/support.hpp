#pragma once

// Independent reference implementations and seeded generators for the tests.
// Nothing here touches the FFT code.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <vector>

#include "lensless/image.hpp"
#include "lensless/psf.hpp"

namespace testing {

using lensless::ImageTensor;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }

    ImageTensor image(std::size_t h, std::size_t w, std::size_t c = 1, double lo = 0.0, double hi = 1.0) {
        ImageTensor img(h, w, c);
        for (double& v : img.data()) v = uniform(lo, hi);
        return img;
    }
    std::vector<double> vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> v(n);
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 gen_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double relative_error(std::span<const double> got, std::span<const double> want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Sliding-window linear convolution with zero boundary, cropped at
/// (H/2, W/2) of the full (2H-1)x(2W-1) result.
inline ImageTensor direct_convolution(const ImageTensor& x, const ImageTensor& psf) {
    const std::size_t h = x.height(), w = x.width();
    const long oh = static_cast<long>(h / 2), ow = static_cast<long>(w / 2);
    ImageTensor out(x.shape());
    for (std::size_t ch = 0; ch < x.channels(); ++ch) {
        for (long r = 0; r < static_cast<long>(h); ++r) {
            for (long c = 0; c < static_cast<long>(w); ++c) {
                double acc = 0.0;
                for (long i = 0; i < static_cast<long>(h); ++i) {
                    for (long j = 0; j < static_cast<long>(w); ++j) {
                        const long pr = r + oh - i, pc = c + ow - j;
                        if (pr < 0 || pc < 0 || pr >= static_cast<long>(h) || pc >= static_cast<long>(w)) continue;
                        acc += x.at(i, j, ch) * psf.at(pr, pc, ch);
                    }
                }
                out.at(r, c, ch) = acc;
            }
        }
    }
    return out;
}

/// Dense (h*w) x (h*w) matrix of the single-channel forward model, row-major.
inline std::vector<double> dense_forward_matrix(const ImageTensor& psf) {
    const std::size_t n = psf.height() * psf.width();
    std::vector<double> g(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        ImageTensor e(psf.height(), psf.width(), 1);
        e.data()[k] = 1.0;
        const ImageTensor col = direct_convolution(e, psf);
        for (std::size_t i = 0; i < n; ++i) g[i * n + k] = col.data()[i];
    }
    return g;
}

/// Solves A x = b (A n x n, row-major) by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        }
        if (a[piv * n + col] == 0.0) throw std::runtime_error("singular system");
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
        x[i] = s / a[i * n + i];
    }
    return x;
}

/// argmin ||G x - y||^2 through the normal equations G^T G x = G^T y.
inline std::vector<double> least_squares_oracle(const std::vector<double>& g, std::span<const double> y) {
    const std::size_t n = y.size();
    std::vector<double> gtg(n * n, 0.0), gty(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += g[k * n + i] * g[k * n + j];
            gtg[i * n + j] = s;
        }
        for (std::size_t k = 0; k < n; ++k) gty[i] += g[k * n + i] * y[k];
    }
    return solve_dense(gtg, gty);
}

/// Autocorrelation by summing over every lag directly.
inline ImageTensor lag_sum_autocorr(const ImageTensor& img) {
    const long h = static_cast<long>(img.height()), w = static_cast<long>(img.width());
    ImageTensor out(2 * h - 1, 2 * w - 1, 1);
    for (long dr = -(h - 1); dr <= h - 1; ++dr) {
        for (long dc = -(w - 1); dc <= w - 1; ++dc) {
            double acc = 0.0;
            for (long r = 0; r < h; ++r) {
                for (long c = 0; c < w; ++c) {
                    const long rr = r + dr, cc = c + dc;
                    if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
                    acc += img.at(r, c) * img.at(rr, cc);
                }
            }
            out.at(dr + h - 1, dc + w - 1) = acc;
        }
    }
    return out;
}

/// SSIM of a half-black/half-white image (split at column w/2) against its
/// inverse, evaluated window by window from the 1D tap mass on the white side.
/// Every window has mean p, variance p(1-p) and cross-covariance -p(1-p);
/// rows all see the same windows.
inline double binary_inversion_ssim(std::size_t w) {
    const std::size_t win = 11;
    const double sigma = 1.5;
    std::vector<double> taps(win);
    double total = 0.0;
    for (std::size_t k = 0; k < win; ++k) {
        const double d = static_cast<double>(k) - 5.0;
        taps[k] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += taps[k];
    }
    for (double& t : taps) t /= total;
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double acc = 0.0;
    const std::size_t cols = w - win + 1;
    for (std::size_t c = 0; c < cols; ++c) {
        double p = 0.0;
        for (std::size_t k = 0; k < win; ++k) {
            if (c + k >= w / 2) p += taps[k];
        }
        const double q = 1.0 - p;
        const double v = p * q;
        acc += (2.0 * p * q + c1) * (c2 - 2.0 * v) / ((p * p + q * q + c1) * (2.0 * v + c2));
    }
    return acc / static_cast<double>(cols);
}

inline ImageTensor delta_psf(std::size_t h, std::size_t w, std::size_t c = 1) {
    ImageTensor psf(h, w, c);
    for (std::size_t ch = 0; ch < c; ++ch) psf.at(h / 2, w / 2, ch) = 1.0;
    return psf;
}

/// Rescales each channel to unit sum without any floor subtraction.
inline lensless::Psf unit_sum_psf(ImageTensor img) {
    lensless::Psf psf{img, {}, {}};
    for (std::size_t c = 0; c < img.channels(); ++c) {
        double s = 0.0;
        for (double v : psf.image.plane(c)) s += v;
        for (double& v : psf.image.plane(c)) v /= s;
        psf.background_floor.push_back(0.0);
        psf.normalization.push_back(1.0 / s);
    }
    return psf;
}

// Centre-heavy 4x4 PSF: a dominant delta plus a weak random spread keeps G
// well conditioned.
inline lensless::Psf well_conditioned_psf(Rng& rng) {
    ImageTensor raw = rng.image(4, 4, 1, 0.0, 0.2);
    raw.at(2, 2) += 2.0;
    return unit_sum_psf(raw);
}

struct LsInstance {
    lensless::Psf psf;
    ImageTensor y;
    std::vector<double> x_ls;
};

inline LsInstance ls_instance(std::uint64_t seed) {
    Rng rng(seed);
    lensless::Psf psf = well_conditioned_psf(rng);
    const ImageTensor x_true = rng.image(4, 4, 1, 0.2, 1.0);
    ImageTensor y = direct_convolution(x_true, psf.image);
    for (double& v : y.data()) v += 0.01 * rng.normal();
    auto x_ls = least_squares_oracle(dense_forward_matrix(psf.image), y.data());
    return {std::move(psf), std::move(y), std::move(x_ls)};
}


/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("lensless_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
