#include "spde/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spde {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

DiagonalOperator::DiagonalOperator(std::vector<double> eigenvalues, BasisKind basis)
    : eigenvalues_(std::move(eigenvalues)), basis_(basis) {
    require(!eigenvalues_.empty(), "DiagonalOperator: empty spectrum");
    for (double lam : eigenvalues_) {
        require(std::isfinite(lam), "DiagonalOperator: non-finite eigenvalue");
        require(lam < 0.0, "DiagonalOperator: eigenvalues must be strictly negative");
    }
}

DiagonalOperator DiagonalOperator::dirichlet_laplacian(int modes, double nu) {
    require(modes >= 1, "dirichlet_laplacian: modes >= 1 required");
    require(nu > 0.0 && std::isfinite(nu), "dirichlet_laplacian: nu > 0 required");
    std::vector<double> lam(static_cast<size_t>(modes));
    const double pi = std::acos(-1.0);
    for (int n = 1; n <= modes; ++n) {
        lam[static_cast<size_t>(n - 1)] = -nu * pi * pi * static_cast<double>(n) * n;
    }
    return DiagonalOperator(std::move(lam), BasisKind::DirichletSine);
}

DiagonalOperator DiagonalOperator::cahn_hilliard(int modes) {
    require(modes >= 1, "cahn_hilliard: modes >= 1 required");
    std::vector<double> lam(static_cast<size_t>(modes));
    const double pi = std::acos(-1.0);
    for (int n = 0; n < modes; ++n) {
        const double w = static_cast<double>(n) * pi;
        const double w2 = w * w;
        lam[static_cast<size_t>(n)] = -w2 * w2 + w2 - 1.0;
    }
    return DiagonalOperator(std::move(lam), BasisKind::NeumannCosine);
}

DiagonalOperator DiagonalOperator::power_spectrum(int modes, double c, double rho) {
    require(modes >= 1, "power_spectrum: modes >= 1 required");
    require(c > 0.0 && rho > 0.0, "power_spectrum: c > 0 and rho > 0 required");
    std::vector<double> lam(static_cast<size_t>(modes));
    for (int n = 1; n <= modes; ++n) {
        lam[static_cast<size_t>(n - 1)] = -c * std::pow(static_cast<double>(n), rho);
    }
    return DiagonalOperator(std::move(lam), BasisKind::Abstract);
}

TimeGrid::TimeGrid(double T_, std::int64_t steps_) : T(T_), steps(steps_), h(T_ / static_cast<double>(steps_)) {
    require(std::isfinite(T_) && T_ > 0.0, "TimeGrid: T > 0 required");
    require(steps_ >= 1, "TimeGrid: steps >= 1 required");
}

double floor_grid(double t, double h) {
    require(std::isfinite(t), "floor_grid: t must be finite");
    require(std::isfinite(h) && h > 0.0, "floor_grid: h > 0 required");
    double k = std::floor(t / h);
    // One-ulp repair for quotients landing on the wrong side of an integer.
    if ((k + 1.0) * h <= t) k += 1.0;
    if (k * h > t) k -= 1.0;
    return k * h;
}

double ceil_grid(double t, double h) {
    require(std::isfinite(t), "ceil_grid: t must be finite");
    require(std::isfinite(h) && h > 0.0, "ceil_grid: h > 0 required");
    double k = std::ceil(t / h);
    if ((k - 1.0) * h >= t) k -= 1.0;
    if (k * h < t) k += 1.0;
    return k * h;
}

CoeffState semigroup_apply(const DiagonalOperator& op, double t, const CoeffState& x) {
    require(std::isfinite(t) && t >= 0.0, "semigroup_apply: t >= 0 required");
    require(x.size() == static_cast<size_t>(op.modes()), "semigroup_apply: dimension mismatch");
    CoeffState y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = std::exp(op.eigenvalues()[i] * t) * x[i];
    return y;
}

CoeffState resolvent_apply(const DiagonalOperator& op, double h, const CoeffState& x) {
    require(std::isfinite(h) && h > 0.0, "resolvent_apply: h > 0 required");
    require(x.size() == static_cast<size_t>(op.modes()), "resolvent_apply: dimension mismatch");
    CoeffState y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] / (1.0 - h * op.eigenvalues()[i]);
    return y;
}

CoeffState implicit_family_apply(const DiagonalOperator& op, double h, double t1, double t2,
                                 const CoeffState& x) {
    require(std::isfinite(h) && h > 0.0, "implicit_family_apply: h > 0 required");
    require(t1 < t2, "implicit_family_apply: t1 < t2 required");
    require(t1 >= 0.0, "implicit_family_apply: t1 >= 0 required");
    require(x.size() == static_cast<size_t>(op.modes()), "implicit_family_apply: dimension mismatch");

    const double f1 = floor_grid(t1, h);
    const double f2 = floor_grid(t2, h);
    const double lag1 = t1 - f1;
    const double lag2 = t2 - f2;
    const double steps = (f2 - f1) / h;
    const double rounded = std::round(steps);
    require(std::abs(steps - rounded) < 1e-9, "implicit_family_apply: grid offsets not commensurate with h");
    const auto m = static_cast<std::int64_t>(rounded);

    CoeffState y(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const double lam = op.eigenvalues()[i];
        double v = x[i] * (1.0 - lag1 * lam) / (1.0 - lag2 * lam);
        v *= std::pow(1.0 - h * lam, -static_cast<double>(m));
        y[i] = v;
    }
    return y;
}

double hr_norm(const DiagonalOperator& op, double r, const CoeffState& x) {
    require(x.size() == static_cast<size_t>(op.modes()), "hr_norm: dimension mismatch");
    double s = 0.0;
    if (r == 0.0) {
        for (double v : x) s += v * v;
    } else {
        for (size_t i = 0; i < x.size(); ++i) {
            const double w = std::pow(std::abs(op.eigenvalues()[i]), 2.0 * r);
            s += w * x[i] * x[i];
        }
    }
    return std::sqrt(s);
}

double calE(double r, double x) {
    require(r > 0.0 && r <= 1.0, "calE: r in (0,1] required");
    require(std::isfinite(x) && x >= 0.0, "calE: x >= 0 required");
    if (x == 0.0) return 1.0;

    const double log_x2_gamma_r = 2.0 * std::log(x) + std::lgamma(r);
    double sum = 1.0;  // n = 0 term
    constexpr int kMaxTerms = 10000;
    for (int n = 1; n < kMaxTerms; ++n) {
        const double term = std::exp(static_cast<double>(n) * log_x2_gamma_r - std::lgamma(n * r + 1.0));
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return std::sqrt(sum);
}

}  // namespace spde
