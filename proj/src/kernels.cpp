#include "spde/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "matvec_detail.hpp"

namespace spde::kernels {

PathKernel::PathKernel(const ModelSpec& model, SchemeKind kind, std::int64_t steps)
    : model_(&model),
      kind_(kind),
      modes_(model.modes()),
      steps_(steps),
      h_(model.T / static_cast<double>(steps)) {
    if (steps < 1) throw std::invalid_argument("PathKernel: steps >= 1 required");
    if (kind != SchemeKind::ExponentialEuler && kind != SchemeKind::LinearImplicitEuler)
        throw std::invalid_argument("PathKernel: kind must be a stepping scheme");
    if (model.drift == DriftKind::Custom)
        throw std::invalid_argument("PathKernel: custom drift uses simulate_path");

    const auto m = static_cast<size_t>(modes_);
    factor_.resize(m);
    for (size_t i = 0; i < m; ++i) {
        const double lam = model.op.eigenvalues()[i];
        factor_[i] = (kind == SchemeKind::ExponentialEuler) ? std::exp(lam * h_) : 1.0 / (1.0 - h_ * lam);
    }
    drift_scale_ = (model.drift == DriftKind::Identity) ? 1.0 + h_ : 1.0;

    multiplicative_ = model.diffusion.kind == Diffusion::Kind::Multiplicative;
    if (multiplicative_) {
        if (!model.transform) throw std::invalid_argument("PathKernel: missing transform plan");
        kappa_ = model.diffusion.kappa;
        const TransformPlan& plan = *model.transform;
        grid_op_.assign(m * m, 0.0);
        // grid_op = synthesis * diag(factor) * analysis, stored column-major.
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < m; ++j) {
                double acc = 0.0;
                for (size_t k = 0; k < m; ++k) {
                    acc += plan.synthesis()[i * m + k] * factor_[k] * plan.analysis()[k * m + j];
                }
                grid_op_[j * m + i] = acc;
            }
        }
        // Collocation Parseval: sum_j b_n(x_j) b_m(x_j) = w delta_nm.
        grid_norm_scale_ = (model.op.basis_kind() == BasisKind::DirichletSine)
                               ? 1.0 / (modes_ + 1)
                               : 1.0 / modes_;
    } else {
        mu_ = model.diffusion.mu;
    }
    state_.resize(m);
    scratch_.resize(m);
    wgrid_.resize(m);
    init_state();
}

void PathKernel::init_state() { init_state(model_->initial); }

void PathKernel::init_state(const CoeffState& initial) {
    if (initial.size() != static_cast<size_t>(modes_))
        throw std::invalid_argument("PathKernel: initial state dimension mismatch");
    if (multiplicative_) {
        model_->transform->to_grid(initial.data(), state_.data());
    } else {
        state_ = initial;
    }
}

void PathKernel::step(const double* increment_row) {
    const auto m = static_cast<size_t>(modes_);
    if (multiplicative_) {
        model_->transform->to_grid(increment_row, wgrid_.data());
        for (size_t j = 0; j < m; ++j) {
            scratch_[j] = drift_scale_ * state_[j] + kappa_ * state_[j] * wgrid_[j];
        }
        detail::matvec_colmajor(grid_op_.data(), modes_, scratch_.data(), state_.data());
    } else {
        for (size_t i = 0; i < m; ++i) {
            state_[i] = factor_[i] * (drift_scale_ * state_[i] + mu_[i] * increment_row[i]);
        }
    }
}

void PathKernel::read_coeff(double* coeff_out) const {
    if (multiplicative_) {
        model_->transform->to_coeff(state_.data(), coeff_out);
    } else {
        for (size_t i = 0; i < state_.size(); ++i) coeff_out[i] = state_[i];
    }
}

double PathKernel::state_sq_distance(const PathKernel& other) const {
    double s = 0.0;
    for (size_t i = 0; i < state_.size(); ++i) {
        const double d = state_[i] - other.state_[i];
        s += d * d;
    }
    return multiplicative_ ? s * grid_norm_scale_ : s;
}

void PathKernel::run(const double* increments, double* coeff_out) {
    init_state();
    for (std::int64_t n = 0; n < steps_; ++n) {
        step(increments + static_cast<size_t>(n) * modes_);
    }
    read_coeff(coeff_out);
}

}  // namespace spde::kernels
