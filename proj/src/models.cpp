#include "spde/models.hpp"

#include <cmath>
#include <stdexcept>

#include "matvec_detail.hpp"

namespace spde {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

TransformPlan::TransformPlan(BasisKind basis, int modes)
    : basis_(basis),
      modes_(modes),
      synthesis_(static_cast<size_t>(modes) * modes),
      analysis_(static_cast<size_t>(modes) * modes) {}

TransformPlan TransformPlan::make(BasisKind basis, int modes) {
    require(modes >= 1, "TransformPlan: modes >= 1 required");
    require(basis != BasisKind::Abstract, "TransformPlan: no collocation rule for abstract bases");
    TransformPlan plan(basis, modes);
    const double pi = std::acos(-1.0);
    const auto m = static_cast<size_t>(modes);

    if (basis == BasisKind::DirichletSine) {
        // b_k(x) = sqrt2 sin(k pi x), k = 1..M, at x_j = j/(M+1).
        // Discrete orthogonality sum_j b_n(x_j) b_m(x_j) = (M+1) delta_nm makes
        // analysis = synthesis^T / (M+1) the exact inverse.
        for (size_t j = 0; j < m; ++j) {
            const double x = static_cast<double>(j + 1) / (modes + 1);
            for (size_t k = 0; k < m; ++k) {
                plan.synthesis_[j * m + k] = std::sqrt(2.0) * std::sin((static_cast<double>(k) + 1.0) * pi * x);
            }
        }
        for (size_t k = 0; k < m; ++k)
            for (size_t j = 0; j < m; ++j)
                plan.analysis_[k * m + j] = plan.synthesis_[j * m + k] / (modes + 1);
    } else {
        // b_0 = 1, b_n(x) = sqrt2 cos(n pi x), n = 1..M-1, at x_j = (j-1/2)/M.
        // sum_j b_n(x_j) b_m(x_j) = M delta_nm, so analysis = synthesis^T / M.
        for (size_t j = 0; j < m; ++j) {
            const double x = (static_cast<double>(j) + 0.5) / modes;
            plan.synthesis_[j * m + 0] = 1.0;
            for (size_t k = 1; k < m; ++k) {
                plan.synthesis_[j * m + k] = std::sqrt(2.0) * std::cos(static_cast<double>(k) * pi * x);
            }
        }
        for (size_t k = 0; k < m; ++k)
            for (size_t j = 0; j < m; ++j)
                plan.analysis_[k * m + j] = plan.synthesis_[j * m + k] / modes;
    }
    plan.synthesis_cm_.resize(m * m);
    plan.analysis_cm_.resize(m * m);
    for (size_t r = 0; r < m; ++r) {
        for (size_t col = 0; col < m; ++col) {
            plan.synthesis_cm_[col * m + r] = plan.synthesis_[r * m + col];
            plan.analysis_cm_[col * m + r] = plan.analysis_[r * m + col];
        }
    }
    return plan;
}

void TransformPlan::to_grid(const double* coeff, double* grid) const {
    detail::matvec_colmajor(synthesis_cm_.data(), modes_, coeff, grid);
}

void TransformPlan::to_coeff(const double* grid, double* coeff) const {
    detail::matvec_colmajor(analysis_cm_.data(), modes_, grid, coeff);
}

std::vector<double> TransformPlan::to_grid(const CoeffState& coeff) const {
    require(coeff.size() == static_cast<size_t>(modes_), "to_grid: dimension mismatch");
    std::vector<double> g(coeff.size());
    to_grid(coeff.data(), g.data());
    return g;
}

CoeffState TransformPlan::to_coeff(const std::vector<double>& grid) const {
    require(grid.size() == static_cast<size_t>(modes_), "to_coeff: dimension mismatch");
    CoeffState c(grid.size());
    to_coeff(grid.data(), c.data());
    return c;
}

TransformPlan make_transform(BasisKind basis, int modes) { return TransformPlan::make(basis, modes); }

ModelSpec build_anderson(int modes, double nu, double kappa, CoeffState xi, double T) {
    require(modes >= 1, "build_anderson: modes >= 1 required");
    require(xi.size() == static_cast<size_t>(modes), "build_anderson: xi dimension mismatch");
    require(T > 0.0, "build_anderson: T > 0 required");
    ModelSpec m(DiagonalOperator::dirichlet_laplacian(modes, nu));
    m.drift = DriftKind::Zero;
    m.diffusion = Diffusion{Diffusion::Kind::Multiplicative, kappa, {}};
    m.initial = std::move(xi);
    m.gamma = 0.5;
    m.T = T;
    m.transform = std::make_shared<TransformPlan>(TransformPlan::make(BasisKind::DirichletSine, modes));
    return m;
}

ModelSpec build_chc(int modes, double kappa, CoeffState xi, double T) {
    require(modes >= 1, "build_chc: modes >= 1 required");
    require(xi.size() == static_cast<size_t>(modes), "build_chc: xi dimension mismatch");
    require(T > 0.0, "build_chc: T > 0 required");
    ModelSpec m(DiagonalOperator::cahn_hilliard(modes));
    m.drift = DriftKind::Identity;
    m.diffusion = Diffusion{Diffusion::Kind::Multiplicative, kappa, {}};
    m.initial = std::move(xi);
    m.gamma = 0.25;
    m.T = T;
    m.transform = std::make_shared<TransformPlan>(TransformPlan::make(BasisKind::NeumannCosine, modes));
    return m;
}

ModelSpec build_diagonal_additive(int modes, double c, double rho, double delta, double T) {
    require(modes >= 1, "build_diagonal_additive: modes >= 1 required");
    require(c > 0.0 && rho > 0.0, "build_diagonal_additive: c > 0 and rho > 0 required");
    require(T > 0.0, "build_diagonal_additive: T > 0 required");
    ModelSpec m(DiagonalOperator::power_spectrum(modes, c, rho));
    m.drift = DriftKind::Zero;
    Diffusion d;
    d.kind = Diffusion::Kind::AdditiveDiagonal;
    d.mu.resize(static_cast<size_t>(modes));
    for (int n = 1; n <= modes; ++n) {
        d.mu[static_cast<size_t>(n - 1)] = std::pow(c * std::pow(static_cast<double>(n), rho), delta);
    }
    m.diffusion = std::move(d);
    m.initial.assign(static_cast<size_t>(modes), 0.0);
    m.gamma = 0.5;
    m.T = T;
    return m;
}

CoeffState drift_eval(const ModelSpec& model, const CoeffState& y) {
    require(y.size() == static_cast<size_t>(model.modes()), "drift_eval: dimension mismatch");
    switch (model.drift) {
        case DriftKind::Zero:
            return CoeffState(y.size(), 0.0);
        case DriftKind::Identity:
            return y;
        case DriftKind::Custom: {
            require(static_cast<bool>(model.custom_drift), "drift_eval: missing custom drift");
            CoeffState out = model.custom_drift(y);
            out.resize(y.size(), 0.0);
            return out;
        }
    }
    throw std::logic_error("drift_eval: unreachable");
}

CoeffState diffusion_apply(const ModelSpec& model, const CoeffState& y, const CoeffState& w) {
    const auto m = static_cast<size_t>(model.modes());
    require(y.size() == m && w.size() == m, "diffusion_apply: dimension mismatch");
    if (model.diffusion.kind == Diffusion::Kind::AdditiveDiagonal) {
        CoeffState out(m);
        for (size_t i = 0; i < m; ++i) out[i] = model.diffusion.mu[i] * w[i];
        return out;
    }
    require(static_cast<bool>(model.transform), "diffusion_apply: missing transform plan");
    const TransformPlan& plan = *model.transform;
    std::vector<double> gy = plan.to_grid(y);
    std::vector<double> gw = plan.to_grid(w);
    for (size_t j = 0; j < m; ++j) gy[j] = model.diffusion.kappa * gy[j] * gw[j];
    return plan.to_coeff(gy);
}

}  // namespace spde
