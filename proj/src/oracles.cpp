#include "spde/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace spde::oracles {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

// T/h as an exact integer.
long long step_count(double T, double h) {
    const double ratio = T / h;
    const double rounded = std::round(ratio);
    require(rounded >= 1.0 && std::abs(ratio - rounded) < 1e-9 * std::max(1.0, ratio),
            "oracles: T/h must be a positive integer");
    return static_cast<long long>(rounded);
}

double pos(double a) { return a > 0.0 ? a : 0.0; }
double neg(double a) { return a < 0.0 ? -a : 0.0; }

}  // namespace

double var_exact_mode(double lambda, double mu, double T) {
    require(lambda < 0.0, "var_exact_mode: lambda < 0 required");
    require(T > 0.0, "var_exact_mode: T > 0 required");
    const double al = -lambda;
    return mu * mu * -std::expm1(-2.0 * al * T) / (2.0 * al);
}

double var_exp_euler_mode(double lambda, double mu, double T, double h) {
    require(lambda < 0.0, "var_exp_euler_mode: lambda < 0 required");
    const long long K = step_count(T, h);
    const double al = -lambda;
    if (al * h < 1e-10) {
        double s = 0.0;
        for (long long k = K; k >= 1; --k) s += std::exp(-2.0 * al * h * static_cast<double>(k));
        return mu * mu * h * s;
    }
    const double q = std::exp(-2.0 * al * h);
    return mu * mu * h * q * -std::expm1(-2.0 * al * T) / -std::expm1(-2.0 * al * h);
}

double var_impl_euler_mode(double lambda, double mu, double T, double h) {
    require(lambda < 0.0, "var_impl_euler_mode: lambda < 0 required");
    const long long K = step_count(T, h);
    const double al = -lambda;
    if (al * h < 1e-10) {
        double s = 0.0;
        for (long long k = K; k >= 1; --k) s += std::pow(1.0 + h * al, -2.0 * static_cast<double>(k));
        return mu * mu * h * s;
    }
    const double decay = std::pow(1.0 + h * al, -2.0 * static_cast<double>(K));
    return mu * mu * (1.0 - decay) / (al * (2.0 + h * al));
}

double gap_lower_bound_exp(double lambda, double mu, double T, double h) {
    require(lambda < 0.0, "gap_lower_bound_exp: lambda < 0 required");
    const double al = -lambda;
    return mu * mu * -std::expm1(-2.0 * al * T) * h / (4.0 * std::exp(al * h));
}

double gap_lower_bound_impl(double lambda, double mu, double T, double h) {
    require(lambda < 0.0, "gap_lower_bound_impl: lambda < 0 required");
    const double al = -lambda;
    return mu * mu * -std::expm1(-2.0 * al * T) * h / (4.0 * (1.0 + h * al));
}

double expected_sq_norm(const ModeVariances& v) {
    // Neumaier-compensated sum; mode counts can reach 1e4.
    double sum = 0.0, comp = 0.0;
    for (double x : v.values) {
        const double t = sum + x;
        comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double exp_functional(const ModeVariances& v) {
    double log_sum = 0.0, comp = 0.0;
    for (double s2 : v.values) {
        const double x = std::log1p(2.0 * s2);
        const double t = log_sum + x;
        comp += (std::abs(log_sum) >= std::abs(x)) ? (log_sum - t) + x : (x - t) + log_sum;
        log_sum = t;
    }
    return std::exp(-0.5 * (log_sum + comp));
}

double weak_gap_lower_bound_general(double ex2, double ey2) {
    require(ey2 >= 0.0 && ex2 >= ey2, "weak_gap_lower_bound_general: need EX2 >= EY2 >= 0");
    return (ex2 - ey2) * std::exp(-6.0 * ex2);
}

double concrete_gap_lower_bound(double c, double rho, double delta, double T, double h) {
    require(c > 0.0 && rho > 0.0, "concrete_gap_lower_bound: c > 0 and rho > 0 required");
    (void)step_count(T, h);
    const double q = 1.0 / rho + 2.0 * delta;
    const double num = -std::expm1(-2.0 * c * T) * -std::expm1(-1.0) * std::pow(T, pos(q)) *
                       std::pow(c, 2.0 * delta) * std::pow(h, 1.0 - pos(q));
    const double den = std::pow(4.0, 1.0 + rho * neg(delta)) * std::exp(std::pow(2.0, rho) * std::exp(1.0) * c * T) *
                       (rho + neg(1.0 + 2.0 * rho * delta));
    return num / den;
}

double weak_error_lower_bound_concrete(double c, double rho, double delta, double T, double h,
                                       double ex2) {
    require(ex2 >= 0.0, "weak_error_lower_bound_concrete: EX2 >= 0 required");
    return concrete_gap_lower_bound(c, rho, delta, T, h) * std::exp(-6.0 * ex2);
}

ModeVariances mode_variances(ModeVariances::Kind kind, double c, double rho, double delta, double T,
                             double h, int modes) {
    require(modes >= 1, "mode_variances: modes >= 1 required");
    ModeVariances v;
    v.kind = kind;
    v.values.resize(static_cast<size_t>(modes));
    for (int n = 1; n <= modes; ++n) {
        const double lam = -c * std::pow(static_cast<double>(n), rho);
        const double mu = std::pow(-lam, delta);
        double s2 = 0.0;
        switch (kind) {
            case ModeVariances::Kind::ExactX: s2 = var_exact_mode(lam, mu, T); break;
            case ModeVariances::Kind::ExpEulerY1: s2 = var_exp_euler_mode(lam, mu, T, h); break;
            case ModeVariances::Kind::ImplEulerY2: s2 = var_impl_euler_mode(lam, mu, T, h); break;
        }
        v.values[static_cast<size_t>(n - 1)] = s2;
    }
    return v;
}

}  // namespace spde::oracles
