#include "lensless/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace lensless {

namespace {

constexpr Algorithm kAllAlgorithms[] = {Algorithm::gd, Algorithm::nesterov, Algorithm::fista, Algorithm::admm,
                                        Algorithm::apgd};

// out = a + beta (a - b)
void extrapolate(const ImageTensor& a, const ImageTensor& b, double beta, ImageTensor& out) {
    auto pa = a.data();
    auto pb = b.data();
    auto po = out.data();
    for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] + beta * (pa[i] - pb[i]);
}

double next_t(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

}  // namespace

const char* to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::gd: return "gd";
        case Algorithm::nesterov: return "nesterov";
        case Algorithm::fista: return "fista";
        case Algorithm::admm: return "admm";
        case Algorithm::apgd: return "apgd";
    }
    return "?";
}

std::string valid_algorithm_names() {
    std::string names;
    for (Algorithm a : kAllAlgorithms) {
        if (!names.empty()) names += ", ";
        names += to_string(a);
    }
    return names;
}

Algorithm parse_algorithm(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (Algorithm a : kAllAlgorithms) {
        if (lower == to_string(a)) return a;
    }
    throw std::invalid_argument("unknown algorithm '" + name + "'; valid algorithms: " + valid_algorithm_names());
}

void validate(const SolverConfig& config) {
    const std::string algo = to_string(config.algorithm);
    if (config.n_iter < 0) throw std::invalid_argument("n_iter must be >= 0");
    if (config.callback_every < 0) throw std::invalid_argument("callback_every must be >= 0");
    if (config.step_size && !(*config.step_size > 0.0 && std::isfinite(*config.step_size))) {
        throw std::invalid_argument("step_size must be a positive finite number");
    }
    if (config.tv_weight && !(*config.tv_weight >= 0.0)) throw std::invalid_argument("tv_weight must be >= 0");
    if (config.tv_weight && *config.tv_weight > 0.0 && config.algorithm != Algorithm::admm) {
        throw std::invalid_argument(algo +
                                    " has no proximal stage for a TV prior; use admm for TV regularization "
                                    "(or apgd with an l1 prior)");
    }
    if (!(config.l1_weight >= 0.0)) throw std::invalid_argument("l1_weight must be >= 0");
    if (config.l1_weight > 0.0 && config.algorithm != Algorithm::apgd) {
        throw std::invalid_argument("an l1 prior needs a proximal stage; use apgd (got " + algo + ")");
    }
    if (config.momentum) {
        if (config.algorithm != Algorithm::nesterov) {
            throw std::invalid_argument("momentum only applies to nesterov (got " + algo + ")");
        }
        if (!(*config.momentum >= 0.0 && *config.momentum < 1.0)) {
            throw std::invalid_argument("momentum must lie in [0, 1)");
        }
    }
    if (config.algorithm == Algorithm::admm) {
        const auto& m = config.admm;
        if (!(m.mu1 > 0.0 && m.mu2 > 0.0 && m.mu3 > 0.0)) {
            throw std::invalid_argument("ADMM penalties mu1, mu2, mu3 must be > 0");
        }
    }
}

double least_squares_value(const ConvolutionOperator& op, const ImageTensor& x, const ImageTensor& y) {
    require_same_shape(x, y, "least_squares_value");
    const ImageTensor gx = op.apply(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double r = gx.data()[i] - y.data()[i];
        acc += r * r;
    }
    return 0.5 * acc;
}

ImageTensor least_squares_gradient(const ConvolutionOperator& op, const ImageTensor& x, const ImageTensor& y) {
    require_same_shape(x, y, "least_squares_gradient");
    ImageTensor r = op.apply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] -= y.data()[i];
    return op.adjoint(r);
}

// ---- Reconstruction -----------------------------------------------------

Reconstruction::Reconstruction(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config)
    : op_(std::move(op)), config_(std::move(config)), state_{ImageTensor(op_->shape()), 0, {}} {
    validate(config_);
    if (config_.algorithm != Algorithm::admm) {
        step_size_ = config_.step_size.value_or(1.0 / op_->lipschitz());
    }
}

void Reconstruction::require_data(const char* what) const {
    if (!measurement_) throw std::logic_error(std::string(what) + " called before set_data");
}

const ImageTensor& Reconstruction::measurement() const {
    require_data("measurement");
    return *measurement_;
}

void Reconstruction::set_data(const ImageTensor& measurement) {
    if (measurement.shape() != op_->shape()) {
        throw std::invalid_argument("measurement shape " + to_string(measurement.shape()) +
                                    " does not match PSF shape " + to_string(op_->shape()));
    }
    if (!measurement.all_finite()) throw std::invalid_argument("measurement contains NaN or Inf");
    measurement_ = measurement;
    state_.x.fill(0.0);
    state_.iteration = 0;
    reset();
    state_.objective_history.assign(1, current_objective());
}

void Reconstruction::set_iterate(const ImageTensor& x0) {
    require_data("set_iterate");
    require_same_shape(x0, state_.x, "set_iterate");
    state_.x = x0;
    state_.iteration = 0;
    reset();
    state_.objective_history.assign(1, current_objective());
}

void Reconstruction::step() {
    require_data("step");
    iterate_once();
    ++state_.iteration;
    state_.objective_history.push_back(current_objective());
}

ImageTensor Reconstruction::apply(int n_iter, const IterationCallback& callback) {
    require_data("apply");
    if (n_iter < 0) throw std::invalid_argument("n_iter must be >= 0");
    const int every = config_.callback_every;
    for (int i = 0; i < n_iter; ++i) {
        step();
        if (callback && every > 0 && state_.iteration % every == 0) {
            callback(state_.iteration, state_.x, state_.objective_history.back());
        }
    }
    ImageTensor out = state_.x;
    project_nonnegative(out.data());
    return out;
}

void Reconstruction::apply_constraint(ImageTensor& img) const {
    if (config_.nonneg) project_nonnegative(img.data());
}

// ---- gradient methods ---------------------------------------------------

GradientReconstruction::GradientReconstruction(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config)
    : Reconstruction(std::move(op), std::move(config)),
      gx_(op_->shape()),
      grad_(op_->shape()),
      scratch_(op_->shape()),
      ws_(op_->make_workspace()) {}

void GradientReconstruction::reset() { forward(x(), gx_); }

double GradientReconstruction::current_objective() { return data_term(gx_); }

void GradientReconstruction::forward(const ImageTensor& in, ImageTensor& out) { op_->apply(in, out, ws_); }

void GradientReconstruction::gradient_from_forward(const ImageTensor& gx, ImageTensor& out) {
    auto r = scratch_.data();
    auto g = gx.data();
    auto m = y().data();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = g[i] - m[i];
    op_->adjoint(scratch_, out, ws_);
}

double GradientReconstruction::data_term(const ImageTensor& gx) const {
    auto g = gx.data();
    auto m = y().data();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g[i] - m[i];
        acc += r * r;
    }
    return 0.5 * acc;
}

GradientDescent::GradientDescent(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config)
    : GradientReconstruction(std::move(op), std::move(config)) {
    if (config_.algorithm != Algorithm::gd) throw std::invalid_argument("GradientDescent requires algorithm gd");
}

void GradientDescent::iterate_once() {
    gradient_from_forward(gx_, grad_);
    auto xs = x().data();
    auto g = grad_.data();
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] -= step_size_ * g[i];
    apply_constraint(x());
    forward(x(), gx_);
}

NesterovGradientDescent::NesterovGradientDescent(std::shared_ptr<const ConvolutionOperator> op,
                                                 SolverConfig config)
    : GradientReconstruction(std::move(op), std::move(config)),
      velocity_(op_->shape()),
      lookahead_(op_->shape()) {
    if (config_.algorithm != Algorithm::nesterov) {
        throw std::invalid_argument("NesterovGradientDescent requires algorithm nesterov");
    }
}

void NesterovGradientDescent::reset() {
    GradientReconstruction::reset();
    velocity_.fill(0.0);
    t_ = 1.0;
    next_beta_ = 0.0;
}

void NesterovGradientDescent::iterate_once() {
    // next_beta_ lags the t-sequence by one step, matching FISTA's extrapolation weights
    const double beta = config_.momentum.value_or(next_beta_);
    auto xs = x().data();
    auto v = velocity_.data();
    auto la = lookahead_.data();
    for (std::size_t i = 0; i < xs.size(); ++i) la[i] = xs[i] + beta * v[i];
    forward(lookahead_, grad_);
    gradient_from_forward(grad_, grad_);
    auto g = grad_.data();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        v[i] = beta * v[i] - step_size_ * g[i];
        xs[i] += v[i];
    }
    apply_constraint(x());
    forward(x(), gx_);
    const double t_next = next_t(t_);
    next_beta_ = (t_ - 1.0) / t_next;
    t_ = t_next;
}

Fista::Fista(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config)
    : Fista(std::move(op), config, Objective{nullptr, 0.0, config.nonneg}) {
    if (config_.algorithm != Algorithm::fista) throw std::invalid_argument("Fista requires algorithm fista");
}

Fista::Fista(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config, Objective objective)
    : GradientReconstruction(std::move(op), std::move(config)),
      objective_(std::move(objective)),
      extrapolated_(op_->shape()),
      g_extrapolated_(op_->shape()),
      previous_(op_->shape()),
      g_previous_(op_->shape()) {
    if (objective_.regularizer && !(objective_.weight > 0.0)) {
        throw std::invalid_argument("regularizer weight must be > 0");
    }
}

void Fista::reset() {
    GradientReconstruction::reset();
    previous_ = x();
    g_previous_ = gx_;
    extrapolated_ = x();
    g_extrapolated_ = gx_;
    t_ = 1.0;
}

void Fista::iterate_once() {
    // G(v) is carried along by linearity, so each iteration costs one apply and one adjoint.
    gradient_from_forward(g_extrapolated_, grad_);
    auto xs = x().data();
    auto v = extrapolated_.data();
    auto g = grad_.data();
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = v[i] - step_size_ * g[i];
    if (objective_.regularizer) objective_.regularizer->prox(xs, step_size_ * objective_.weight);
    if (objective_.nonneg) project_nonnegative(xs);
    forward(x(), gx_);

    const double t_next = next_t(t_);
    const double beta = (t_ - 1.0) / t_next;
    extrapolate(x(), previous_, beta, extrapolated_);
    extrapolate(gx_, g_previous_, beta, g_extrapolated_);
    previous_ = x();
    g_previous_ = gx_;
    t_ = t_next;
}

double Fista::current_objective() {
    double f = data_term(gx_);
    if (objective_.regularizer) f += objective_.weight * objective_.regularizer->value(x().data());
    return f;
}

namespace {

Objective default_objective(const SolverConfig& config) {
    Objective obj{nullptr, 0.0, config.nonneg};
    if (config.l1_weight > 0.0) {
        obj.regularizer = std::make_shared<L1Norm>();
        obj.weight = config.l1_weight;
    }
    return obj;
}

}  // namespace

Apgd::Apgd(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config)
    : Apgd(std::move(op), config, default_objective(config)) {}

Apgd::Apgd(std::shared_ptr<const ConvolutionOperator> op, SolverConfig config, Objective objective)
    : Fista(std::move(op), std::move(config), std::move(objective)) {
    if (config_.algorithm != Algorithm::apgd) throw std::invalid_argument("Apgd requires algorithm apgd");
}

std::unique_ptr<Reconstruction> make_reconstruction(std::shared_ptr<const ConvolutionOperator> op,
                                                    const SolverConfig& config) {
    if (!op) throw std::invalid_argument("make_reconstruction: null operator");
    switch (config.algorithm) {
        case Algorithm::gd: return std::make_unique<GradientDescent>(std::move(op), config);
        case Algorithm::nesterov: return std::make_unique<NesterovGradientDescent>(std::move(op), config);
        case Algorithm::fista: return std::make_unique<Fista>(std::move(op), config);
        case Algorithm::admm: return std::make_unique<Admm>(std::move(op), config);
        case Algorithm::apgd: return std::make_unique<Apgd>(std::move(op), config);
    }
    throw std::invalid_argument("unknown algorithm");
}

std::unique_ptr<Reconstruction> make_reconstruction(const Psf& psf, const SolverConfig& config) {
    validate(config);
    return make_reconstruction(plan_convolution(psf, config.fft_path), config);
}

}  // namespace lensless
