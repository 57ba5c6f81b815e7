#pragma once

// Concrete SPDE instances: parabolic Anderson, linear Cahn-Hilliard-Cook and
// the diagonal additive-noise family, plus the collocation transforms used to
// evaluate the pointwise (Nemytskii) diffusion product.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "spde/spectral.hpp"

namespace spde {

// Square collocation transform pair: synthesis evaluates basis functions at M
// interior points, analysis is its exact inverse (quadrature with uniform
// weights). DirichletSine uses x_j = j/(M+1), NeumannCosine the midpoint grid
// x_j = (j-1/2)/M.
class TransformPlan {
public:
    static TransformPlan make(BasisKind basis, int modes);

    int modes() const { return modes_; }
    BasisKind basis_kind() const { return basis_; }

    // grid_j = sum_k synthesis[j,k] coeff_k
    void to_grid(const double* coeff, double* grid) const;
    // coeff_k = sum_j analysis[k,j] grid_j
    void to_coeff(const double* grid, double* coeff) const;

    std::vector<double> to_grid(const CoeffState& coeff) const;
    CoeffState to_coeff(const std::vector<double>& grid) const;

    const std::vector<double>& synthesis() const { return synthesis_; }
    const std::vector<double>& analysis() const { return analysis_; }

private:
    TransformPlan(BasisKind basis, int modes);

    BasisKind basis_;
    int modes_;
    std::vector<double> synthesis_;  // row-major M x M
    std::vector<double> analysis_;   // row-major M x M
    std::vector<double> synthesis_cm_;  // column-major mirrors for the fast matvec
    std::vector<double> analysis_cm_;
};

enum class DriftKind { Zero, Identity, Custom };

struct Diffusion {
    enum class Kind { Multiplicative, AdditiveDiagonal };
    Kind kind = Kind::Multiplicative;
    double kappa = 0.0;       // Multiplicative: (B(v)u)(x) = kappa v(x) u(x)
    std::vector<double> mu;   // AdditiveDiagonal: (B u)_i = mu_i u_i
};

using DriftFn = std::function<CoeffState(const CoeffState&)>;

struct ModelSpec {
    explicit ModelSpec(DiagonalOperator op_) : op(std::move(op_)) {}

    DiagonalOperator op;
    DriftKind drift = DriftKind::Zero;
    DriftFn custom_drift;                          // used when drift == Custom
    std::optional<double> custom_drift_lipschitz;  // into H_{-theta}; needed by perturbation bounds
    Diffusion diffusion;
    CoeffState initial;
    double gamma = 0.0;  // nominal regularity label in [0, 1/2]
    double T = 1.0;
    std::shared_ptr<const TransformPlan> transform;  // present for Multiplicative diffusion

    int modes() const { return op.modes(); }
};

// dX = nu X_xx dt + kappa X dW on (0,1), Dirichlet; gamma = 1/2.
ModelSpec build_anderson(int modes, double nu, double kappa, CoeffState xi, double T);

// dX = [-X_xxxx - X_xx] dt + kappa X dW, Neumann; A = -L^2 - L - 1 and F(v) = v;
// gamma = 1/4.
ModelSpec build_chc(int modes, double kappa, CoeffState xi, double T);

// lambda_n = -c n^rho, additive diagonal noise mu_n = |lambda_n|^delta, xi = 0.
ModelSpec build_diagonal_additive(int modes, double c, double rho, double delta, double T);

// F(y): Zero -> 0, Identity -> y, Custom -> user function truncated to M modes.
CoeffState drift_eval(const ModelSpec& model, const CoeffState& y);

// B(y) w: Multiplicative -> analysis(kappa * synthesis(y) .* synthesis(w)),
// AdditiveDiagonal -> mu .* w.
CoeffState diffusion_apply(const ModelSpec& model, const CoeffState& y, const CoeffState& w);

TransformPlan make_transform(BasisKind basis, int modes);

}  // namespace spde
