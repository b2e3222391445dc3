#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lensless/convolution.hpp"
#include "lensless/fft.hpp"
#include "lensless/image.hpp"
#include "lensless/prox.hpp"
#include "lensless/psf.hpp"

namespace lensless {

enum class Algorithm { gd, nesterov, fista, admm, apgd };

const char* to_string(Algorithm algo);
/// Accepts "gd", "nesterov", "fista", "admm", "apgd" (case-insensitive).
Algorithm parse_algorithm(const std::string& name);
std::string valid_algorithm_names();

/// ADMM penalty parameters for the three splittings (u = Mx, z = Psi x, w = x).
struct AdmmPenalties {
    double mu1 = 1e-6;
    double mu2 = 1e-5;
    double mu3 = 4e-5;
};

inline constexpr double kDefaultAdmmTvWeight = 1e-4;

struct SolverConfig {
    Algorithm algorithm = Algorithm::admm;
    int n_iter = 100;
    /// Gradient step; empty means 1 / lipschitz.
    std::optional<double> step_size;
    /// TV weight tau. Only ADMM has a TV stage; empty resolves to
    /// kDefaultAdmmTvWeight there and to 0 elsewhere.
    std::optional<double> tv_weight;
    AdmmPenalties admm;
    /// Weight of an l1 prior for APGD.
    double l1_weight = 0.0;
    /// Constant Nesterov damping; empty uses the FISTA t-sequence.
    std::optional<double> momentum;
    bool nonneg = true;
    /// Callback period for apply(); 0 disables callbacks.
    int callback_every = 0;
    FftPath fft_path = FftPath::real;
};

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const SolverConfig& config);

/// Objective for APGD: 0.5 ||Gx - y||^2 + weight * R(x), optionally with x >= 0.
struct Objective {
    std::shared_ptr<const ProximableTerm> regularizer;
    double weight = 0.0;
    bool nonneg = true;
};

/// Snapshot of a running reconstruction.
struct SolverState {
    ImageTensor x;
    int iteration = 0;
    /// f(x_0), f(x_1), ... ; length is iteration + 1 once data is set.
    std::vector<double> objective_history;
};

using IterationCallback = std::function<void(int iteration, const ImageTensor& image, double objective)>;

/// 0.5 ||G x - y||^2
double least_squares_value(const ConvolutionOperator& op, const ImageTensor& x, const ImageTensor& y);
/// G^T (G x - y)
ImageTensor least_squares_gradient(const ConvolutionOperator& op, const ImageTensor& x, const ImageTensor& y);

/// Base of all reconstruction algorithms.
///
/// Usage is construct (plans the operator and all data-independent terms),
/// set_data, then apply. A Reconstruction owns mutable state and must be
/// used from one thread at a time; the operator it holds is shared and
/// immutable.
class Reconstruction {
public:
    virtual ~Reconstruction() = default;
    Reconstruction(const Reconstruction&) = delete;
    Reconstruction& operator=(const Reconstruction&) = delete;

    Algorithm algorithm() const { return config_.algorithm; }
    const SolverConfig& config() const { return config_; }
    const ConvolutionOperator& op() const { return *op_; }
    std::shared_ptr<const ConvolutionOperator> shared_op() const { return op_; }
    /// Resolved gradient step (gradient methods); 0 for ADMM.
    double step_size() const { return step_size_; }

    /// Resets the state: x_0 = 0, auxiliaries zeroed, history = [f(x_0)].
    void set_data(const ImageTensor& measurement);
    bool has_data() const { return measurement_.has_value(); }
    const ImageTensor& measurement() const;

    /// Warm start from `x` (shape of the PSF); counters and history restart.
    void set_iterate(const ImageTensor& x);

    void step();
    /// Runs n_iter steps; `callback` fires every config().callback_every
    /// iterations. Returns the final iterate clipped to >= 0.
    ImageTensor apply(int n_iter, const IterationCallback& callback = {});
    ImageTensor apply() { return apply(config_.n_iter); }

    const SolverState& state() const { return state_; }
    const ImageTensor& iterate() const { return state_.x; }
    int iteration() const { return state_.iteration; }
    const std::vector<double>& objective_history() const { return state_.objective_history; }

protected:
    Reconstruction(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config);

    /// Rebuilds algorithm state from state_.x and the measurement.
    virtual void reset() = 0;
    /// One iteration; must leave state_.x updated.
    virtual void iterate_once() = 0;
    virtual double current_objective() = 0;

    ImageTensor& x() { return state_.x; }
    const ImageTensor& y() const { return *measurement_; }
    void apply_constraint(ImageTensor& img) const;

    std::shared_ptr<const ConvolutionOperator> op_;
    SolverConfig config_;
    double step_size_ = 0.0;

private:
    void require_data(const char* what) const;

    SolverState state_;
    std::optional<ImageTensor> measurement_;
};

/// Shared machinery for the gradient methods: cached G x and workspaces.
class GradientReconstruction : public Reconstruction {
protected:
    GradientReconstruction(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config);

    void reset() override;
    double current_objective() override;

    /// out <- G^T (gx - y)
    void gradient_from_forward(const ImageTensor& gx, ImageTensor& out);
    void forward(const ImageTensor& in, ImageTensor& out);
    double data_term(const ImageTensor& gx) const;

    ImageTensor gx_;      // G x for the current iterate
    ImageTensor grad_;
    ImageTensor scratch_;
    ConvolutionOperator::Workspace ws_;
};

/// Projected gradient descent: x <- P(x - step G^T(Gx - y)).
class GradientDescent final : public GradientReconstruction {
public:
    GradientDescent(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config);

protected:
    void iterate_once() override;
};

/// Nesterov's accelerated gradient in velocity form.
///
/// The gradient is evaluated at the look-ahead point x + beta v and the
/// projection is applied to the new iterate only, leaving the velocity
/// unprojected. FISTA instead evaluates at the extrapolation of the projected
/// iterates; without a constraint both produce identical iterates.
class NesterovGradientDescent final : public GradientReconstruction {
public:
    NesterovGradientDescent(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config);

protected:
    void reset() override;
    void iterate_once() override;

private:
    ImageTensor velocity_;
    ImageTensor lookahead_;
    double t_ = 1.0;
    double next_beta_ = 0.0;
};

/// FISTA with an optional proximal stage (used directly by APGD).
class Fista : public GradientReconstruction {
public:
    Fista(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config);

    double momentum_t() const { return t_; }

protected:
    Fista(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config, Objective objective);

    void reset() override;
    void iterate_once() override;
    double current_objective() override;

    Objective objective_;

private:
    ImageTensor extrapolated_;
    ImageTensor g_extrapolated_;
    ImageTensor previous_;
    ImageTensor g_previous_;
    double t_ = 1.0;
};

/// Accelerated proximal gradient descent on 0.5||Gx - y||^2 + weight R(x).
///
/// The proximal map of R is applied first and the non-negativity projection
/// after it, which is the exact prox of R + indicator for separable,
/// sign-preserving R such as the l1 norm.
class Apgd final : public Fista {
public:
    Apgd(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config);
    Apgd(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config, Objective objective);

    const Objective& objective() const { return objective_; }
};

struct AdmmResiduals {
    double forward = 0.0;  // ||u - Mx||
    double tv = 0.0;       // ||z - Psi x||
    double identity = 0.0; // ||w - x||
    double x_norm = 0.0;   // ||x||
};

/// ADMM with a non-negativity constraint and anisotropic TV prior.
///
/// Solves min 0.5||C M x - y||^2 + tau ||Psi x||_1 + i(w) over x on the
/// 2H x 2W padded grid, where M is circular convolution with the padded PSF,
/// C crops the measurement window and Psi is circular differences, so that
/// both M^T M and Psi^T Psi are diagonal in frequency. The splitting
/// u = Mx, z = Psi x, w = x puts the constraint on w: it is restricted to the
/// scene window (where the zero-padded scene lives) and, when enabled, to
/// non-negative values. The reported image is the scene window of x, clipped
/// like w when non-negativity is on.
class Admm final : public Reconstruction {
public:
    Admm(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config);

    double tv_weight() const { return tau_; }
    AdmmResiduals residuals() const;

protected:
    void reset() override;
    void iterate_once() override;
    double current_objective() override;

private:
    struct Channel {
        RealBuffer x, mx, psi_x, u, z, w, xi, eta, rho, cty;
    };

    void publish_iterate();

    double tau_;
    AdmmPenalties mu_;
    std::vector<Channel> channels_;
    std::vector<double> x_denominator_;   // spectrum layout
    RealBuffer u_denominator_inv_;        // padded grid
    RealBuffer tmp_a_, tmp_b_;
    std::vector<double> grad_tmp_;
    SpectrumBuffer spec_a_, spec_b_;
};

std::unique_ptr<Reconstruction> make_reconstruction(std::shared_ptr<const ConvolutionOperator> op,
                                                    const SolverConfig& config);
/// Plans the operator (with config.fft_path) and builds the solver.
std::unique_ptr<Reconstruction> make_reconstruction(const Psf& psf, const SolverConfig& config);

}  // namespace lensless
