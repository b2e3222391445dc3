#include "lensless/tv.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lensless {

namespace {

void check_sizes(std::size_t x_size, std::size_t grad_size, std::size_t h, std::size_t w) {
    if (x_size != h * w || grad_size != 2 * h * w) {
        throw std::invalid_argument("TV operator: buffer size does not match " + std::to_string(h) + "x" +
                                    std::to_string(w));
    }
}

}  // namespace

void tv_forward(std::span<const double> x, std::size_t h, std::size_t w, std::span<double> grad) {
    check_sizes(x.size(), grad.size(), h, w);
    const std::size_t n = h * w;
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t rn = (r + 1 == h) ? 0 : r + 1;
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t cn = (c + 1 == w) ? 0 : c + 1;
            const double v = x[r * w + c];
            grad[r * w + c] = x[rn * w + c] - v;
            grad[n + r * w + c] = x[r * w + cn] - v;
        }
    }
}

std::vector<double> tv_forward(std::span<const double> x, std::size_t h, std::size_t w) {
    std::vector<double> grad(2 * h * w);
    tv_forward(x, h, w, grad);
    return grad;
}

void tv_adjoint(std::span<const double> grad, std::size_t h, std::size_t w, std::span<double> x) {
    check_sizes(x.size(), grad.size(), h, w);
    const std::size_t n = h * w;
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t rp = (r == 0) ? h - 1 : r - 1;
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t cp = (c == 0) ? w - 1 : c - 1;
            x[r * w + c] = grad[rp * w + c] - grad[r * w + c] + grad[n + r * w + cp] - grad[n + r * w + c];
        }
    }
}

std::vector<double> tv_adjoint(std::span<const double> grad, std::size_t h, std::size_t w) {
    std::vector<double> x(h * w);
    tv_adjoint(grad, h, w, x);
    return x;
}

std::vector<double> tv_gram_eigenvalues(const Fft2d& fft) {
    std::vector<double> eig(fft.spectrum_size());
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t r = 0; r < fft.rows(); ++r) {
        const double er = 2.0 - 2.0 * std::cos(two_pi * static_cast<double>(r) / static_cast<double>(fft.rows()));
        for (std::size_t c = 0; c < fft.spectrum_cols(); ++c) {
            const double ec =
                2.0 - 2.0 * std::cos(two_pi * static_cast<double>(c) / static_cast<double>(fft.cols()));
            eig[r * fft.spectrum_cols() + c] = er + ec;
        }
    }
    return eig;
}

double tv_norm(std::span<const double> x, std::size_t h, std::size_t w) {
    const auto grad = tv_forward(x, h, w);
    double total = 0.0;
    for (double g : grad) total += std::abs(g);
    return total;
}

}  // namespace lensless
