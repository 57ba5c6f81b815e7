#include "spde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spde/kernels.hpp"
#include "spde/noise.hpp"
#include "spde/rng.hpp"

namespace spde {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

// Fixed chunk size for the ordered final reduction; results are independent
// of worker count because chunk partials land in chunk-indexed slots.
constexpr std::int64_t kChunk = 64;

std::int64_t chunk_count(std::int64_t samples) { return (samples + kChunk - 1) / kChunk; }

template <typename Body>
void for_each_chunk(std::int64_t samples, Engine engine, const Body& body) {
    const std::int64_t n_chunks = chunk_count(samples);
    if (engine == Engine::Serial) {
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            body(c, c * kChunk, std::min(samples, (c + 1) * kChunk));
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            body(c, c * kChunk, std::min(samples, (c + 1) * kChunk));
        }
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void validate_coupling(std::int64_t N, std::int64_t N_ref) {
    require(N >= 1 && is_pow2(N), "coupled estimator: N must be a positive power of two");
    require(is_pow2(N_ref) && N_ref % N == 0, "coupled estimator: N must divide N_ref");
    require(N == N_ref || N_ref / N >= 8,
            "coupled estimator: reference must be at least 8x finer than N");
}

struct MomentAccum {
    std::vector<double> sum;    // [chunk * width + slot]
    std::vector<double> sumsq;
    std::int64_t width;

    MomentAccum(std::int64_t n_chunks, std::int64_t w)
        : sum(static_cast<size_t>(n_chunks * w), 0.0),
          sumsq(static_cast<size_t>(n_chunks * w), 0.0),
          width(w) {}

    void add(std::int64_t chunk, std::int64_t slot, double v) {
        sum[static_cast<size_t>(chunk * width + slot)] += v;
        sumsq[static_cast<size_t>(chunk * width + slot)] += v * v;
    }

    // Ordered reduction over chunks.
    std::pair<double, double> totals(std::int64_t slot, std::int64_t n_chunks) const {
        double s = 0.0, s2 = 0.0;
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            s += sum[static_cast<size_t>(c * width + slot)];
            s2 += sumsq[static_cast<size_t>(c * width + slot)];
        }
        return {s, s2};
    }
};

double sample_sd(double sum, double sumsq, std::int64_t n) {
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, (sumsq - static_cast<double>(n) * mean * mean) /
                                         static_cast<double>(n - 1));
    return std::sqrt(var);
}

enum class SweepQuantity { WeakPhiDiff, StrongSqDist };

// Shared coupled-sample loop: one fine bundle per sample drives the reference
// path and, through in-place dyadic halving, every coarse path.
ExperimentReport coupled_sweep(const ModelSpec& model, SchemeKind kind, const Functional* phi,
                               const std::vector<std::int64_t>& Ns_in, std::int64_t N_ref,
                               const McConfig& mc, SweepQuantity what) {
    require(!Ns_in.empty(), "coupled sweep: empty N list");
    require(mc.samples >= 2, "coupled sweep: samples >= 2 required");
    for (std::int64_t N : Ns_in) validate_coupling(N, N_ref);

    std::vector<std::int64_t> Ns = Ns_in;
    std::sort(Ns.begin(), Ns.end(), std::greater<>());  // descending for progressive halving
    Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());

    const int M = model.modes();
    const auto n_points = static_cast<std::int64_t>(Ns.size());
    const std::int64_t n_chunks = chunk_count(mc.samples);
    MomentAccum accum(n_chunks, n_points);

    for_each_chunk(mc.samples, mc.engine, [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
        kernels::PathKernel ref_kernel(model, kind, N_ref);
        std::vector<kernels::PathKernel> coarse;
        coarse.reserve(Ns.size());
        for (std::int64_t N : Ns) coarse.emplace_back(model, kind, N);

        std::vector<double> fine(static_cast<size_t>(M) * static_cast<size_t>(N_ref));
        std::vector<double> coeff_ref(static_cast<size_t>(M)), coeff(static_cast<size_t>(M));

        for (std::int64_t s = begin; s < end; ++s) {
            fill_increments(fine.data(), M, N_ref, model.T, mc.seed, static_cast<std::uint64_t>(s));
            ref_kernel.run(fine.data(), coeff_ref.data());
            const double phi_ref = (what == SweepQuantity::WeakPhiDiff) ? (*phi)(coeff_ref) : 0.0;

            std::int64_t cur = N_ref;
            for (std::int64_t p = 0; p < n_points; ++p) {
                while (cur > Ns[static_cast<size_t>(p)]) {
                    halve_steps(fine.data(), M, cur);
                    cur /= 2;
                }
                coarse[static_cast<size_t>(p)].run(fine.data(), coeff.data());
                double v;
                if (what == SweepQuantity::WeakPhiDiff) {
                    v = (*phi)(coeff) - phi_ref;
                } else {
                    double q = 0.0;
                    for (int i = 0; i < M; ++i) {
                        const double d = coeff[static_cast<size_t>(i)] - coeff_ref[static_cast<size_t>(i)];
                        q += d * d;
                    }
                    v = q;
                }
                accum.add(c, p, v);
            }
        }
    });

    ExperimentReport report;
    report.seed = mc.seed;
    for (std::int64_t p = n_points - 1; p >= 0; --p) {  // ascending N
        const auto [s, s2] = accum.totals(p, n_chunks);
        const auto n = mc.samples;
        ErrorPoint pt;
        pt.steps = Ns[static_cast<size_t>(p)];
        pt.h = model.T / static_cast<double>(pt.steps);
        pt.samples = n;
        const double mean = s / static_cast<double>(n);
        const double sd = sample_sd(s, s2, n);
        if (what == SweepQuantity::WeakPhiDiff) {
            pt.estimate = std::abs(mean);
            pt.std_error = sd / std::sqrt(static_cast<double>(n));
        } else {
            pt.estimate = std::sqrt(std::max(0.0, mean));
            const double se_mean = sd / std::sqrt(static_cast<double>(n));
            pt.std_error = (pt.estimate > 0.0) ? se_mean / (2.0 * pt.estimate) : 0.0;
        }
        report.points.push_back(pt);
    }

    std::vector<std::pair<double, double>> fit_pts;
    for (const ErrorPoint& pt : report.points) fit_pts.emplace_back(pt.h, pt.estimate);
    try {
        const RateFit fit = fit_rate(fit_pts, &report.warnings);
        report.fitted_order = fit.order;
        report.fit_intercept = fit.intercept;
        report.fit_r2 = fit.r2;
    } catch (const std::invalid_argument& e) {
        report.fitted_order = std::nan("");
        report.fit_intercept = std::nan("");
        report.fit_r2 = std::nan("");
        report.warnings.push_back(std::string("no fit possible: ") + e.what());
    }

    report.config["scheme"] = (kind == SchemeKind::ExponentialEuler) ? "exponential-euler" : "linear-implicit-euler";
    report.config["grid.N_ref"] = std::to_string(N_ref);
    report.config["mc.samples"] = std::to_string(mc.samples);
    report.config["mc.seed"] = std::to_string(mc.seed);
    return report;
}

}  // namespace

const std::map<std::string, Functional>& test_functional_registry() {
    static const std::map<std::string, Functional> registry = {
        {"exp_neg_sq_norm",
         [](const CoeffState& v) {
             double s = 0.0;
             for (double x : v) s += x * x;
             return std::exp(-s);
         }},
        {"sq_norm",
         [](const CoeffState& v) {
             double s = 0.0;
             for (double x : v) s += x * x;
             return s;
         }},
        {"first_mode_sq", [](const CoeffState& v) { return v.empty() ? 0.0 : v[0] * v[0]; }},
    };
    return registry;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& h_and_error,
                 std::vector<std::string>* warnings) {
    std::vector<std::pair<double, double>> usable;
    for (const auto& [h, e] : h_and_error) {
        require(h > 0.0, "fit_rate: h > 0 required");
        if (e > 0.0) {
            usable.emplace_back(std::log(h), std::log(e));
        } else if (warnings) {
            warnings->push_back("fit_rate: excluded nonpositive error at h=" + fmt(h));
        }
    }
    require(usable.size() >= 2, "fit_rate: fewer than two usable points");

    const auto n = static_cast<double>(usable.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : usable) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : usable) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    require(sxx > 0.0, "fit_rate: degenerate h values");

    RateFit fit;
    fit.order = sxy / sxx;
    fit.intercept = my - fit.order * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : usable) {
        const double r = y - (fit.intercept + fit.order * x);
        ss_res += r * r;
    }
    fit.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    fit.used_points = static_cast<int>(usable.size());
    return fit;
}

ErrorPoint estimate_weak_error(const ModelSpec& model, SchemeKind kind, const Functional& phi,
                               std::int64_t N, std::int64_t N_ref, const McConfig& mc) {
    ExperimentReport r = coupled_sweep(model, kind, &phi, {N}, N_ref, mc, SweepQuantity::WeakPhiDiff);
    return r.points.front();
}

ErrorPoint estimate_strong_error(const ModelSpec& model, SchemeKind kind, std::int64_t N,
                                 std::int64_t N_ref, const McConfig& mc) {
    ExperimentReport r = coupled_sweep(model, kind, nullptr, {N}, N_ref, mc, SweepQuantity::StrongSqDist);
    return r.points.front();
}

ExperimentReport weak_error_sweep(const ModelSpec& model, SchemeKind kind,
                                  const std::string& functional_name,
                                  const std::vector<std::int64_t>& Ns, std::int64_t N_ref,
                                  const McConfig& mc) {
    const auto& registry = test_functional_registry();
    const auto it = registry.find(functional_name);
    require(it != registry.end(), "weak_error_sweep: unknown functional");
    ExperimentReport r = coupled_sweep(model, kind, &it->second, Ns, N_ref, mc, SweepQuantity::WeakPhiDiff);
    r.config["functional"] = functional_name;
    return r;
}

ExperimentReport strong_error_sweep(const ModelSpec& model, SchemeKind kind,
                                    const std::vector<std::int64_t>& Ns, std::int64_t N_ref,
                                    const McConfig& mc) {
    return coupled_sweep(model, kind, nullptr, Ns, N_ref, mc, SweepQuantity::StrongSqDist);
}

LowerBoundSweep lower_bound_sweep(double c, double rho, double delta, double T, int modes,
                                  const std::vector<double>& hs, SchemeKind kind) {
    require(!hs.empty(), "lower_bound_sweep: empty h list");
    require(kind == SchemeKind::ExponentialEuler || kind == SchemeKind::LinearImplicitEuler,
            "lower_bound_sweep: kind must be a stepping scheme");
    const auto scheme_kind = (kind == SchemeKind::ExponentialEuler)
                                 ? oracles::ModeVariances::Kind::ExpEulerY1
                                 : oracles::ModeVariances::Kind::ImplEulerY2;

    LowerBoundSweep sweep;
    std::vector<double> sorted = hs;
    std::sort(sorted.begin(), sorted.end());

    for (double h : sorted) {
        const auto exact = oracles::mode_variances(oracles::ModeVariances::Kind::ExactX, c, rho,
                                                   delta, T, h, modes);
        const auto scheme = oracles::mode_variances(scheme_kind, c, rho, delta, T, h, modes);
        oracles::ModeVariances gap_terms;
        gap_terms.values.resize(exact.values.size());
        for (size_t i = 0; i < exact.values.size(); ++i) {
            gap_terms.values[i] = exact.values[i] - scheme.values[i];
        }
        LowerBoundPoint pt;
        pt.h = h;
        pt.gap = oracles::expected_sq_norm(gap_terms);
        pt.bound = oracles::concrete_gap_lower_bound(c, rho, delta, T, h);
        sweep.points.push_back(pt);
    }

    // Truncation tail: per-mode gap <= Var(<b_n,X>) <= (c n^rho)^{2 delta - 1} / 2,
    // integrable when rho (1 - 2 delta) > 1.
    const double p = rho * (1.0 - 2.0 * delta);
    if (p > 1.0) {
        sweep.tail_estimate = std::pow(c, 2.0 * delta - 1.0) *
                              std::pow(static_cast<double>(modes), 1.0 - p) / (2.0 * (p - 1.0));
    } else {
        sweep.tail_estimate = std::numeric_limits<double>::infinity();
        sweep.warnings.push_back("tail estimate unavailable: rho(1-2delta) <= 1");
    }
    double min_gap = sweep.points.front().gap;
    for (const auto& pt : sweep.points) min_gap = std::min(min_gap, pt.gap);
    if (!(sweep.tail_estimate <= 1e-3 * min_gap)) {
        sweep.warnings.push_back("variance tail " + fmt(sweep.tail_estimate) +
                                 " exceeds 1e-3 of the smallest gap " + fmt(min_gap));
    }

    sweep.dominated = true;
    for (const auto& pt : sweep.points) sweep.dominated = sweep.dominated && pt.gap >= pt.bound;

    std::vector<std::pair<double, double>> fit_pts;
    for (const auto& pt : sweep.points) fit_pts.emplace_back(pt.h, pt.gap);
    sweep.fit = fit_rate(fit_pts, &sweep.warnings);

    sweep.report.seed = 0;
    sweep.report.fitted_order = sweep.fit.order;
    sweep.report.fit_intercept = sweep.fit.intercept;
    sweep.report.fit_r2 = sweep.fit.r2;
    sweep.report.warnings = sweep.warnings;
    for (const auto& pt : sweep.points) {
        ErrorPoint ep;
        ep.h = pt.h;
        ep.steps = static_cast<std::int64_t>(std::llround(T / pt.h));
        ep.estimate = pt.gap;
        ep.std_error = 0.0;
        ep.samples = 0;
        sweep.report.points.push_back(ep);
    }
    std::sort(sweep.report.points.begin(), sweep.report.points.end(),
              [](const ErrorPoint& a, const ErrorPoint& b) { return a.steps < b.steps; });
    sweep.report.config["model.kind"] = "diagonal-additive";
    sweep.report.config["model.c"] = fmt(c);
    sweep.report.config["model.rho"] = fmt(rho);
    sweep.report.config["model.delta"] = fmt(delta);
    sweep.report.config["model.modes"] = std::to_string(modes);
    sweep.report.config["grid.T"] = fmt(T);
    sweep.report.config["scheme"] = (kind == SchemeKind::ExponentialEuler) ? "exponential-euler"
                                                                           : "linear-implicit-euler";
    return sweep;
}

double default_perturbation_theta(const ModelSpec& model) {
    if (model.diffusion.kind == Diffusion::Kind::AdditiveDiagonal) return 0.5;
    // Multiplicative: theta/2 must exceed the Hilbert-Schmidt deficit of the
    // multiplication operator (1/4 for second-order, 1/8 for fourth-order
    // spectra); these leave the calE argument in a representable range.
    return (model.op.basis_kind() == BasisKind::NeumannCosine) ? 0.35 : 0.6;
}

double drift_lipschitz(const ModelSpec& model, double theta) {
    switch (model.drift) {
        case DriftKind::Zero:
            return 0.0;
        case DriftKind::Identity: {
            double w = 0.0;
            for (double lam : model.op.eigenvalues()) w = std::max(w, std::pow(-lam, -theta));
            return w;
        }
        case DriftKind::Custom:
            require(model.custom_drift_lipschitz.has_value(),
                    "perturbation bound: custom drift without declared Lipschitz constant");
            return *model.custom_drift_lipschitz;
    }
    throw std::logic_error("drift_lipschitz: unreachable");
}

double diffusion_lipschitz(const ModelSpec& model, double theta) {
    if (model.diffusion.kind == Diffusion::Kind::AdditiveDiagonal) return 0.0;
    // ||kappa M_v||_{HS(U, H_{-theta/2})}^2 <= 2 kappa^2 ||v||^2 sum_n |lambda_n|^{-theta}
    // on the truncated system (collocation Parseval is exact).
    double s = 0.0;
    for (double lam : model.op.eigenvalues()) s += std::pow(-lam, -theta);
    return std::abs(model.diffusion.kappa) * std::sqrt(2.0 * s);
}

PerturbationResult perturbation_check(const ModelSpec& model, SchemeKind kind, std::int64_t N,
                                      const McConfig& mc, const CoeffState& xi_a,
                                      const CoeffState& xi_b) {
    const int M = model.modes();
    require(xi_a.size() == static_cast<size_t>(M) && xi_b.size() == static_cast<size_t>(M),
            "perturbation_check: initial state dimension mismatch");
    require(is_pow2(N), "perturbation_check: N must be a power of two");
    require(mc.samples >= 2, "perturbation_check: samples >= 2 required");

    const double theta = default_perturbation_theta(model);
    PerturbationResult result;
    result.theta = theta;
    result.drift_lipschitz = drift_lipschitz(model, theta);
    result.diffusion_lipschitz = diffusion_lipschitz(model, theta);
    result.samples = mc.samples;

    double xi_dist = 0.0;
    for (int i = 0; i < M; ++i) {
        const double d = xi_a[static_cast<size_t>(i)] - xi_b[static_cast<size_t>(i)];
        xi_dist += d * d;
    }
    xi_dist = std::sqrt(xi_dist);

    // Corollary-style closed form with p = 2 and sup_t ||S_t|| <= 1.
    const double T = model.T;
    const double tpow = std::pow(T, 1.0 - theta);
    const double arg = result.drift_lipschitz * std::sqrt(2.0) * tpow / std::sqrt(1.0 - theta) +
                       result.diffusion_lipschitz * std::sqrt(2.0 * tpow);
    result.rhs = std::sqrt(2.0) * xi_dist * calE(1.0 - theta, arg);

    const std::int64_t n_chunks = chunk_count(mc.samples);
    MomentAccum accum(n_chunks, N);

    for_each_chunk(mc.samples, mc.engine, [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
        kernels::PathKernel ka(model, kind, N);
        kernels::PathKernel kb(model, kind, N);
        std::vector<double> inc(static_cast<size_t>(M) * static_cast<size_t>(N));
        for (std::int64_t s = begin; s < end; ++s) {
            fill_increments(inc.data(), M, N, model.T, mc.seed, static_cast<std::uint64_t>(s));
            ka.init_state(xi_a);
            kb.init_state(xi_b);
            for (std::int64_t n = 0; n < N; ++n) {
                const double* row = inc.data() + static_cast<size_t>(n) * M;
                ka.step(row);
                kb.step(row);
                accum.add(c, n, ka.state_sq_distance(kb));
            }
        }
    });

    // sup over the grid times, including t = 0 where the distance is exact.
    result.lhs = xi_dist;
    result.lhs_std_error = 0.0;
    for (std::int64_t n = 0; n < N; ++n) {
        const auto [s, s2] = accum.totals(n, n_chunks);
        const double mean = s / static_cast<double>(mc.samples);
        const double lhs_t = std::sqrt(std::max(0.0, mean));
        if (lhs_t > result.lhs) {
            result.lhs = lhs_t;
            const double se_mean = sample_sd(s, s2, mc.samples) / std::sqrt(static_cast<double>(mc.samples));
            result.lhs_std_error = (lhs_t > 0.0) ? se_mean / (2.0 * lhs_t) : 0.0;
        }
    }
    result.pass = result.lhs <= result.rhs + 3.0 * result.lhs_std_error;
    return result;
}

FunctionalCheck mc_exp_functional_check(double c, double rho, double delta, double T, int modes,
                                        const McConfig& mc) {
    require(mc.samples >= 2, "mc_exp_functional_check: samples >= 2 required");
    const auto exact =
        oracles::mode_variances(oracles::ModeVariances::Kind::ExactX, c, rho, delta, T, T, modes);
    std::vector<double> sd(exact.values.size());
    for (size_t i = 0; i < sd.size(); ++i) sd[i] = std::sqrt(exact.values[i]);

    const std::int64_t n_chunks = chunk_count(mc.samples);
    MomentAccum accum(n_chunks, 1);

    for_each_chunk(mc.samples, mc.engine, [&](std::int64_t c_idx, std::int64_t begin, std::int64_t end) {
        for (std::int64_t s = begin; s < end; ++s) {
            double q = 0.0;
            for (int i = 0; i < modes; ++i) {
                const double z = rng::normal_at(mc.seed, static_cast<std::uint64_t>(s),
                                                static_cast<std::uint32_t>(i), 0);
                const double x = sd[static_cast<size_t>(i)] * z;
                q += x * x;
            }
            accum.add(c_idx, 0, std::exp(-q));
        }
    });

    const auto [s, s2] = accum.totals(0, n_chunks);
    FunctionalCheck check;
    check.mc_estimate = s / static_cast<double>(mc.samples);
    check.std_error = sample_sd(s, s2, mc.samples) / std::sqrt(static_cast<double>(mc.samples));
    check.product_formula = oracles::exp_functional(exact);
    check.pass = std::abs(check.mc_estimate - check.product_formula) <= 3.0 * check.std_error;
    return check;
}

VarianceCheck mc_scheme_variance_check(const ModelSpec& model, SchemeKind kind, std::int64_t N,
                                       const McConfig& mc, double se_band) {
    require(model.diffusion.kind == Diffusion::Kind::AdditiveDiagonal,
            "mc_scheme_variance_check: requires the additive diagonal model");
    require(is_pow2(N), "mc_scheme_variance_check: N must be a power of two");
    const int M = model.modes();
    const double h = model.T / static_cast<double>(N);

    const std::int64_t n_chunks = chunk_count(mc.samples);
    MomentAccum accum(n_chunks, M);

    for_each_chunk(mc.samples, mc.engine, [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
        kernels::PathKernel kernel(model, kind, N);
        std::vector<double> inc(static_cast<size_t>(M) * static_cast<size_t>(N));
        std::vector<double> coeff(static_cast<size_t>(M));
        for (std::int64_t s = begin; s < end; ++s) {
            fill_increments(inc.data(), M, N, model.T, mc.seed, static_cast<std::uint64_t>(s));
            kernel.run(inc.data(), coeff.data());
            for (int i = 0; i < M; ++i) accum.add(c, i, coeff[static_cast<size_t>(i)]);
        }
    });

    VarianceCheck check;
    check.pass = true;
    for (int i = 0; i < M; ++i) {
        const double lam = model.op.eigenvalue(i);
        const double mu = model.diffusion.mu[static_cast<size_t>(i)];
        const double expected = (kind == SchemeKind::ExponentialEuler)
                                    ? oracles::var_exp_euler_mode(lam, mu, model.T, h)
                                    : oracles::var_impl_euler_mode(lam, mu, model.T, h);
        const auto [s, s2] = accum.totals(i, n_chunks);
        // Terminal values are centred; E[Y^2] estimates the variance directly,
        // with SE = var sqrt(2/n) for Gaussian marginals.
        const double vhat = s2 / static_cast<double>(mc.samples);
        const double se = expected * std::sqrt(2.0 / static_cast<double>(mc.samples));
        const double z = (se > 0.0) ? std::abs(vhat - expected) / se : 0.0;
        if (z > check.worst_z) {
            check.worst_z = z;
            check.worst_mode = i;
        }
        if (z > se_band) check.pass = false;
    }
    return check;
}

}  // namespace spde
