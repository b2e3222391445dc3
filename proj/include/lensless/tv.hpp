#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lensless/fft.hpp"

namespace lensless {

/// Circular forward differences of an h x w plane.
///
/// `grad` holds 2*h*w values: first the row differences
/// x[(r+1) mod h, c] - x[r, c], then the column differences
/// x[r, (c+1) mod w] - x[r, c].
void tv_forward(std::span<const double> x, std::size_t h, std::size_t w, std::span<double> grad);
std::vector<double> tv_forward(std::span<const double> x, std::size_t h, std::size_t w);

/// Exact adjoint of tv_forward (negative circular divergence).
void tv_adjoint(std::span<const double> grad, std::size_t h, std::size_t w, std::span<double> x);
std::vector<double> tv_adjoint(std::span<const double> grad, std::size_t h, std::size_t w);

/// Eigenvalues of Psi^T Psi in `fft` spectrum layout:
/// (2 - 2cos(2 pi k_r / h)) + (2 - 2cos(2 pi k_c / w)).
std::vector<double> tv_gram_eigenvalues(const Fft2d& fft);

/// Anisotropic TV: sum of |row differences| + |column differences|.
double tv_norm(std::span<const double> x, std::size_t h, std::size_t w);

}  // namespace lensless
