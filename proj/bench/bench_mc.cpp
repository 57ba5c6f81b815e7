// Throughput comparison of the serial and OpenMP Monte Carlo engines on the
// coupled weak-error workload, plus the raw kernel pieces.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "spde/experiments.hpp"
#include "spde/kernels.hpp"
#include "spde/noise.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
    const std::int64_t samples = (argc > 1) ? std::atoll(argv[1]) : 256;
    const std::int64_t n_ref = (argc > 2) ? std::atoll(argv[2]) : 2048;

    spde::CoeffState xi(64, 0.0);
    xi[0] = 1.0;
    const auto model = spde::build_anderson(64, 0.1, 0.5, xi, 1.0);
    const std::vector<std::int64_t> Ns = {8, 16, 32, 64, 128};

    {
        std::vector<double> buf(static_cast<size_t>(model.modes()) * n_ref);
        const auto t0 = Clock::now();
        for (std::int64_t s = 0; s < samples; ++s)
            spde::fill_increments(buf.data(), model.modes(), n_ref, model.T, 7, s);
        const double dt = seconds_since(t0);
        std::printf("noise fill:    %8.1f samples/s (%.1f Mdraws/s)\n", samples / dt,
                    samples * static_cast<double>(model.modes()) * n_ref / dt / 1e6);
    }
    {
        spde::kernels::PathKernel kernel(model, spde::SchemeKind::ExponentialEuler, n_ref);
        std::vector<double> buf(static_cast<size_t>(model.modes()) * n_ref);
        spde::fill_increments(buf.data(), model.modes(), n_ref, model.T, 7, 0);
        std::vector<double> coeff(model.modes());
        const auto t0 = Clock::now();
        for (std::int64_t s = 0; s < samples; ++s) kernel.run(buf.data(), coeff.data());
        std::printf("path kernel:   %8.1f paths/s at N=%lld\n", samples / seconds_since(t0),
                    static_cast<long long>(n_ref));
    }

    for (const auto engine : {spde::Engine::Serial, spde::Engine::OpenMP}) {
        const spde::McConfig mc{samples, 7, engine};
        const auto t0 = Clock::now();
        const auto report = spde::weak_error_sweep(model, spde::SchemeKind::ExponentialEuler,
                                                   "exp_neg_sq_norm", Ns, n_ref, mc);
        const double dt = seconds_since(t0);
        std::printf("%-14s %8.1f samples/s (%.2fs, threads=%d, order=%.3f)\n",
                    engine == spde::Engine::Serial ? "engine serial:" : "engine openmp:",
                    samples / dt, dt, engine == spde::Engine::Serial ? 1 : omp_get_max_threads(),
                    report.fitted_order);
    }
    return 0;
}
