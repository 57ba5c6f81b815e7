#include "spde/schemes.hpp"

#include <cmath>
#include <stdexcept>

#include "spde/rng.hpp"

namespace spde {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

CoeffState frozen_increment(const ModelSpec& model, const CoeffState& y, const CoeffState& dw, double h) {
    CoeffState u = y;
    if (model.drift != DriftKind::Zero) {
        const CoeffState f = drift_eval(model, y);
        for (size_t i = 0; i < u.size(); ++i) u[i] += h * f[i];
    }
    const CoeffState bw = diffusion_apply(model, y, dw);
    for (size_t i = 0; i < u.size(); ++i) u[i] += bw[i];
    return u;
}

// (e^{lambda h} - 1) / lambda, series branch for |lambda h| below 1e-8.
double phi1_times_h(double lambda, double h) {
    const double x = lambda * h;
    if (std::abs(x) < 1e-8) return h * (1.0 + 0.5 * x);
    return std::expm1(x) / lambda;
}

}  // namespace

CoeffState exp_euler_step(const ModelSpec& model, const CoeffState& y, const CoeffState& dw, double h) {
    require(h > 0.0, "exp_euler_step: h > 0 required");
    require(y.size() == dw.size() && y.size() == static_cast<size_t>(model.modes()),
            "exp_euler_step: dimension mismatch");
    CoeffState u = frozen_increment(model, y, dw, h);
    for (size_t i = 0; i < u.size(); ++i) u[i] *= std::exp(model.op.eigenvalues()[i] * h);
    return u;
}

CoeffState implicit_euler_step(const ModelSpec& model, const CoeffState& y, const CoeffState& dw, double h) {
    require(h > 0.0, "implicit_euler_step: h > 0 required");
    require(y.size() == dw.size() && y.size() == static_cast<size_t>(model.modes()),
            "implicit_euler_step: dimension mismatch");
    CoeffState u = frozen_increment(model, y, dw, h);
    for (size_t i = 0; i < u.size(); ++i) u[i] /= 1.0 - h * model.op.eigenvalues()[i];
    return u;
}

PathResult simulate_path(const ModelSpec& model, SchemeKind kind, const NoiseBundle& bundle,
                         const PathOptions& options) {
    require(bundle.modes == model.modes(), "simulate_path: bundle dimension mismatch");
    require(kind == SchemeKind::ExponentialEuler || kind == SchemeKind::LinearImplicitEuler,
            "simulate_path: kind must be a stepping scheme");
    const double h = bundle.T / static_cast<double>(bundle.steps);

    PathResult result;
    result.terminal = model.initial;
    CoeffState dw(static_cast<size_t>(bundle.modes));
    for (std::int64_t n = 0; n < bundle.steps; ++n) {
        const double* row = bundle.data.data() + static_cast<size_t>(n) * bundle.modes;
        dw.assign(row, row + bundle.modes);
        result.terminal = (kind == SchemeKind::ExponentialEuler)
                              ? exp_euler_step(model, result.terminal, dw, h)
                              : implicit_euler_step(model, result.terminal, dw, h);
        if (options.record_path) result.path.push_back(result.terminal);
    }
    return result;
}

CoeffState integrated_counterpart_path(const ModelSpec& model, const NoiseBundle& bundle,
                                       const std::vector<double>& conv) {
    require(bundle.modes == model.modes(), "integrated_counterpart_path: bundle dimension mismatch");
    require(conv.size() == bundle.data.size(), "integrated_counterpart_path: missing convolution increments");
    const auto m = static_cast<size_t>(bundle.modes);
    const double h = bundle.dt();

    std::vector<double> efac(m), dh(m);
    for (size_t i = 0; i < m; ++i) {
        const double lam = model.op.eigenvalues()[i];
        efac[i] = std::exp(lam * h);
        dh[i] = phi1_times_h(lam, h);
    }

    CoeffState y = model.initial;   // exponential-Euler path, frozen coefficients
    CoeffState ybar = model.initial;
    CoeffState dw(m), in(m);
    for (std::int64_t n = 0; n < bundle.steps; ++n) {
        const double* wrow = bundle.data.data() + static_cast<size_t>(n) * bundle.modes;
        const double* crow = conv.data() + static_cast<size_t>(n) * bundle.modes;
        dw.assign(wrow, wrow + bundle.modes);
        in.assign(crow, crow + bundle.modes);

        const CoeffState f = drift_eval(model, y);
        const CoeffState bi = diffusion_apply(model, y, in);
        for (size_t i = 0; i < m; ++i) ybar[i] = efac[i] * ybar[i] + dh[i] * f[i] + bi[i];

        y = exp_euler_step(model, y, dw, h);
    }
    return ybar;
}

LinearAdditiveSample exact_linear_additive_sample(const ModelSpec& model, const TimeGrid& grid,
                                                  std::uint64_t seed, std::uint64_t stream,
                                                  std::uint64_t aux_stream) {
    require(model.drift == DriftKind::Zero &&
                model.diffusion.kind == Diffusion::Kind::AdditiveDiagonal,
            "exact_linear_additive_sample: requires zero drift and additive diagonal diffusion");
    const double ratio = grid.T / grid.h;
    require(std::abs(ratio - std::round(ratio)) < 1e-9, "exact_linear_additive_sample: T/h must be an integer");

    const auto m = static_cast<size_t>(model.modes());
    const auto K = grid.steps;
    const double h = grid.h;
    const double sd = std::sqrt(h);

    LinearAdditiveSample out;
    out.x.assign(m, 0.0);
    out.y1.assign(m, 0.0);
    out.y2.assign(m, 0.0);

    for (size_t i = 0; i < m; ++i) {
        const double lam = model.op.eigenvalues()[i];
        const double mu = model.diffusion.mu[i];
        const double al = std::abs(lam);
        const double cov = convolution_covariance(lam, h);
        const double x = al * h;
        double r2;
        if (x < 1e-3) {
            r2 = h * x * x * (1.0 / 12.0 - x / 12.0 + 17.0 * x * x / 360.0);
        } else {
            r2 = convolution_variance(lam, h) - cov * cov / h;
        }
        const double slope = cov / h;
        const double resid = std::sqrt(std::max(r2, 0.0));

        double xs = 0.0, y1s = 0.0, y2s = 0.0;
        for (std::int64_t n = 0; n < K; ++n) {
            const double dw = sd * rng::normal_at(seed, stream, static_cast<std::uint32_t>(i),
                                                  static_cast<std::uint64_t>(n));
            const double z = rng::normal_at(seed, aux_stream, static_cast<std::uint32_t>(i),
                                            static_cast<std::uint64_t>(n));
            const double conv = slope * dw + resid * z;  // int_{t_n}^{t_{n+1}} e^{l (t_{n+1}-s)} dW
            const auto k_left = static_cast<double>(K - n);  // (T - t_n)/h
            xs += std::exp(-al * h * static_cast<double>(K - n - 1)) * conv;
            y1s += std::exp(-al * h * k_left) * dw;
            y2s += std::pow(1.0 + h * al, -k_left) * dw;
        }
        out.x[i] = mu * xs;
        out.y1[i] = mu * y1s;
        out.y2[i] = mu * y2s;
    }
    return out;
}

}  // namespace spde
