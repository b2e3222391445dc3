#include <algorithm>
#include <cmath>

#include "lensless/prox.hpp"
#include "lensless/solvers.hpp"
#include "lensless/tv.hpp"

namespace lensless {

// Padded-grid layout: the scene window starts at (0, 0), which is where
// ConvolutionOperator embeds x, and the measurement window at
// (crop_row, crop_col). With w restricted to the scene window,
// crop(M x) equals the operator's apply().

Admm::Admm(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config)
    : Reconstruction(std::move(op), std::move(config)),
      tau_(config_.tv_weight.value_or(kDefaultAdmmTvWeight)),
      mu_(config_.admm) {
    if (config_.algorithm != Algorithm::admm) throw std::invalid_argument("Admm requires algorithm admm");

    const Fft2d& fft = op_->fft();
    const std::size_t n = fft.real_size();
    const std::size_t h = op_->shape().height;
    const std::size_t w = op_->shape().width;

    // Data-independent terms: x-update denominator in frequency, u-update
    // denominator on the padded grid.
    const auto tv_eig = tv_gram_eigenvalues(fft);
    // one x-denominator per channel
    x_denominator_.resize(fft.spectrum_size() * op_->shape().channels);
    for (std::size_t c = 0; c < op_->shape().channels; ++c) {
        const auto spec = op_->spectrum(c);
        for (std::size_t k = 0; k < spec.size(); ++k) {
            x_denominator_[c * spec.size() + k] = mu_.mu1 * std::norm(spec[k]) + mu_.mu2 * tv_eig[k] + mu_.mu3;
        }
    }
    u_denominator_inv_.assign(n, 1.0 / mu_.mu1);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t col = 0; col < w; ++col) {
            u_denominator_inv_[(op_->crop_row() + r) * fft.cols() + op_->crop_col() + col] = 1.0 / (1.0 + mu_.mu1);
        }
    }

    channels_.resize(op_->shape().channels);
    for (auto& ch : channels_) {
        for (RealBuffer* buf : {&ch.x, &ch.mx, &ch.u, &ch.w, &ch.xi, &ch.rho, &ch.cty}) buf->assign(n, 0.0);
        for (RealBuffer* buf : {&ch.psi_x, &ch.z, &ch.eta}) buf->assign(2 * n, 0.0);
    }
    tmp_a_ = fft.make_real();
    tmp_b_ = fft.make_real();
    grad_tmp_.assign(2 * n, 0.0);
    spec_a_ = fft.make_spectrum();
    spec_b_ = fft.make_spectrum();
}

void Admm::reset() {
    const Fft2d& fft = op_->fft();
    const std::size_t h = op_->shape().height;
    const std::size_t w = op_->shape().width;
    const std::size_t pc = fft.cols();

    for (std::size_t c = 0; c < channels_.size(); ++c) {
        Channel& ch = channels_[c];
        std::fill(ch.x.begin(), ch.x.end(), 0.0);
        std::fill(ch.cty.begin(), ch.cty.end(), 0.0);
        const auto xs = x().plane(c);
        const auto ys = y().plane(c);
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t col = 0; col < w; ++col) {
                ch.x[r * pc + col] = xs[r * w + col];
                ch.cty[(op_->crop_row() + r) * pc + op_->crop_col() + col] = ys[r * w + col];
            }
        }
        fft.forward(ch.x, spec_a_);
        const auto hs = op_->spectrum(c);
        for (std::size_t k = 0; k < spec_a_.size(); ++k) spec_a_[k] *= hs[k];
        fft.inverse(spec_a_, ch.mx);
        tv_forward(ch.x, fft.rows(), pc, ch.psi_x);

        ch.u = ch.mx;
        ch.z = ch.psi_x;
        ch.w = ch.x;
        for (RealBuffer* buf : {&ch.xi, &ch.rho, &ch.eta}) std::fill(buf->begin(), buf->end(), 0.0);
    }
    publish_iterate();
}

void Admm::iterate_once() {
    const Fft2d& fft = op_->fft();
    const std::size_t n = fft.real_size();
    const std::size_t pc = fft.cols();
    const std::size_t h = op_->shape().height;
    const std::size_t w = op_->shape().width;
    const double mu1 = mu_.mu1, mu2 = mu_.mu2, mu3 = mu_.mu3;

    for (std::size_t c = 0; c < channels_.size(); ++c) {
        Channel& ch = channels_[c];

        // z: prox of the TV term
        for (std::size_t i = 0; i < 2 * n; ++i) ch.z[i] = ch.psi_x[i] + ch.eta[i] / mu2;
        soft_threshold(std::span<double>(ch.z), tau_ / mu2);

        // u: data term, closed form through the crop/pad pair
        for (std::size_t i = 0; i < n; ++i) {
            ch.u[i] = (ch.cty[i] + ch.xi[i] + mu1 * ch.mx[i]) * u_denominator_inv_[i];
        }

        // w: projection onto the scene window (and the non-negative orthant)
        std::fill(ch.w.begin(), ch.w.end(), 0.0);
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t col = 0; col < w; ++col) {
                const std::size_t i = r * pc + col;
                const double v = ch.x[i] + ch.rho[i] / mu3;
                ch.w[i] = (config_.nonneg && v < 0.0) ? 0.0 : v;
            }
        }

        // x: (mu1 M^T M + mu2 Psi^T Psi + mu3 I) x = rhs, solved in frequency
        for (std::size_t i = 0; i < 2 * n; ++i) grad_tmp_[i] = mu2 * ch.z[i] - ch.eta[i];
        tv_adjoint(grad_tmp_, fft.rows(), pc, tmp_a_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_a_[i] += mu3 * ch.w[i] - ch.rho[i];
            tmp_b_[i] = mu1 * ch.u[i] - ch.xi[i];
        }
        fft.forward(tmp_a_, spec_a_);
        fft.forward(tmp_b_, spec_b_);
        const auto hs = op_->spectrum(c);
        const double* denom = x_denominator_.data() + c * hs.size();
        for (std::size_t k = 0; k < hs.size(); ++k) {
            spec_a_[k] = (spec_a_[k] + std::conj(hs[k]) * spec_b_[k]) / denom[k];
            spec_b_[k] = spec_a_[k] * hs[k];
        }
        fft.inverse(spec_a_, ch.x);
        fft.inverse(spec_b_, ch.mx);
        tv_forward(ch.x, fft.rows(), pc, ch.psi_x);

        // dual ascent
        for (std::size_t i = 0; i < n; ++i) {
            ch.xi[i] += mu1 * (ch.mx[i] - ch.u[i]);
            ch.rho[i] += mu3 * (ch.x[i] - ch.w[i]);
        }
        for (std::size_t i = 0; i < 2 * n; ++i) ch.eta[i] += mu2 * (ch.psi_x[i] - ch.z[i]);
    }
    publish_iterate();
}

void Admm::publish_iterate() {
    const std::size_t h = op_->shape().height;
    const std::size_t w = op_->shape().width;
    const std::size_t pc = op_->fft().cols();
    for (std::size_t c = 0; c < channels_.size(); ++c) {
        auto dst = x().plane(c);
        const auto& src = channels_[c].x;
        for (std::size_t r = 0; r < h; ++r) {
            std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(r * pc), w,
                        dst.begin() + static_cast<std::ptrdiff_t>(r * w));
        }
    }
    apply_constraint(x());
}

double Admm::current_objective() {
    // 0.5 ||crop(M x) - y||^2 + tau ||Psi x||_1 on the padded x.
    const std::size_t h = op_->shape().height;
    const std::size_t w = op_->shape().width;
    const std::size_t pc = op_->fft().cols();
    double data = 0.0, tv = 0.0;
    for (std::size_t c = 0; c < channels_.size(); ++c) {
        const Channel& ch = channels_[c];
        const auto ys = y().plane(c);
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t col = 0; col < w; ++col) {
                const double d = ch.mx[(op_->crop_row() + r) * pc + op_->crop_col() + col] - ys[r * w + col];
                data += d * d;
            }
        }
        if (tau_ > 0.0) {
            for (double g : ch.psi_x) tv += std::abs(g);
        }
    }
    return 0.5 * data + tau_ * tv;
}

AdmmResiduals Admm::residuals() const {
    AdmmResiduals res;
    for (const Channel& ch : channels_) {
        for (std::size_t i = 0; i < ch.x.size(); ++i) {
            res.forward += (ch.u[i] - ch.mx[i]) * (ch.u[i] - ch.mx[i]);
            res.identity += (ch.w[i] - ch.x[i]) * (ch.w[i] - ch.x[i]);
            res.x_norm += ch.x[i] * ch.x[i];
        }
        for (std::size_t i = 0; i < ch.z.size(); ++i) res.tv += (ch.z[i] - ch.psi_x[i]) * (ch.z[i] - ch.psi_x[i]);
    }
    res.forward = std::sqrt(res.forward);
    res.tv = std::sqrt(res.tv);
    res.identity = std::sqrt(res.identity);
    res.x_norm = std::sqrt(res.x_norm);
    return res;
}

}  // namespace lensless
