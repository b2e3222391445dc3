#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lensless {

/// sign(v) * max(|v| - threshold, 0), elementwise.
void soft_threshold(std::span<double> v, double threshold);
std::vector<double> soft_threshold(std::span<const double> v, double threshold);

/// max(v, 0), elementwise.
void project_nonnegative(std::span<double> v);

/// A convex term R with a cheap proximal map, used as the regularizer of
/// accelerated proximal gradient descent.
class ProximableTerm {
public:
    virtual ~ProximableTerm() = default;
    virtual std::string name() const = 0;
    virtual double value(std::span<const double> x) const = 0;
    /// In place: v <- argmin_x 0.5 ||x - v||^2 + scale * R(x).
    virtual void prox(std::span<double> v, double scale) const = 0;
};

class L1Norm final : public ProximableTerm {
public:
    std::string name() const override { return "l1"; }
    double value(std::span<const double> x) const override;
    void prox(std::span<double> v, double scale) const override { soft_threshold(v, scale); }
};

/// Indicator of the non-negative orthant; its prox is the projection.
class NonNegative final : public ProximableTerm {
public:
    std::string name() const override { return "nonneg"; }
    double value(std::span<const double> x) const override;
    void prox(std::span<double> v, double) const override { project_nonnegative(v); }
};

}  // namespace lensless
