#include "spde/noise.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "spde/rng.hpp"

namespace spde {

namespace {

std::atomic<std::uint64_t> g_bundles_sampled{0};

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(os, bits);
}

double read_f64(std::istream& is) {
    const std::uint64_t bits = read_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void fill_increments(double* data, int modes, std::int64_t n_max, double T, std::uint64_t seed,
                     std::uint64_t stream) {
    const double sd = std::sqrt(T / static_cast<double>(n_max));
    if (n_max == 1) {
        for (int i = 0; i < modes; ++i) {
            data[static_cast<size_t>(i)] =
                sd * rng::normal_pair(seed, stream, static_cast<std::uint32_t>(i), 0).first;
        }
        return;
    }
    for (std::int64_t p = 0; p < n_max / 2; ++p) {
        double* row0 = data + static_cast<size_t>(2 * p) * modes;
        double* row1 = row0 + modes;
        for (int i = 0; i < modes; ++i) {
            const auto z = rng::normal_pair(seed, stream, static_cast<std::uint32_t>(i),
                                            static_cast<std::uint64_t>(p));
            row0[i] = sd * z.first;
            row1[i] = sd * z.second;
        }
    }
}

NoiseBundle sample_increments(int modes, std::int64_t n_max, double T, std::uint64_t seed,
                              std::uint64_t stream) {
    require(modes >= 1, "sample_increments: modes >= 1 required");
    require(is_pow2(n_max), "sample_increments: N_max must be a power of two");
    require(std::isfinite(T) && T > 0.0, "sample_increments: T > 0 required");

    NoiseBundle b;
    b.modes = modes;
    b.steps = n_max;
    b.T = T;
    b.seed = seed;
    b.stream = stream;
    b.data.resize(static_cast<size_t>(modes) * static_cast<size_t>(n_max));
    fill_increments(b.data.data(), modes, n_max, T, seed, stream);
    g_bundles_sampled.fetch_add(1, std::memory_order_relaxed);
    return b;
}

void halve_steps(double* data, int modes, std::int64_t steps) {
    const std::int64_t half = steps / 2;
    for (std::int64_t k = 0; k < half; ++k) {
        const double* a = data + static_cast<size_t>(2 * k) * modes;
        const double* b = a + modes;
        double* dst = data + static_cast<size_t>(k) * modes;
        for (int i = 0; i < modes; ++i) dst[i] = a[i] + b[i];
    }
}

NoiseBundle coarsen(const NoiseBundle& bundle, std::int64_t factor) {
    require(factor >= 1, "coarsen: factor >= 1 required");
    require(bundle.steps % factor == 0, "coarsen: factor must divide N_max");
    require(is_pow2(factor), "coarsen: factor must be a power of two");
    NoiseBundle out = bundle;
    while (out.steps > bundle.steps / factor) {
        halve_steps(out.data.data(), out.modes, out.steps);
        out.steps /= 2;
    }
    out.data.resize(static_cast<size_t>(out.steps) * out.modes);
    return out;
}

double convolution_variance(double lambda, double h) {
    const double al = std::abs(lambda);
    return -std::expm1(-2.0 * al * h) / (2.0 * al);
}

double convolution_covariance(double lambda, double h) {
    const double al = std::abs(lambda);
    return -std::expm1(-al * h) / al;
}

std::vector<double> convolution_increments(const DiagonalOperator& op, const NoiseBundle& bundle,
                                           std::uint64_t aux_stream) {
    require(op.modes() == bundle.modes, "convolution_increments: dimension mismatch");
    const int M = bundle.modes;
    const double h = bundle.dt();

    // I | DW is Gaussian: I = (Cov/h) DW + sqrt(Var(I) - Cov^2/h) Z.
    std::vector<double> slope(static_cast<size_t>(M)), resid(static_cast<size_t>(M));
    for (int i = 0; i < M; ++i) {
        const double lam = op.eigenvalue(i);
        const double x = std::abs(lam) * h;
        const double cov = convolution_covariance(lam, h);
        double r2;
        if (x < 1e-3) {
            // Var - Cov^2/h = h (x^2/12 - x^3/12 + 17 x^4/360 - ...), cancellation-safe.
            r2 = h * x * x * (1.0 / 12.0 - x / 12.0 + 17.0 * x * x / 360.0);
        } else {
            r2 = convolution_variance(lam, h) - cov * cov / h;
        }
        slope[static_cast<size_t>(i)] = cov / h;
        resid[static_cast<size_t>(i)] = std::sqrt(std::max(r2, 0.0));
    }

    std::vector<double> out(bundle.data.size());
    for (std::int64_t n = 0; n < bundle.steps; ++n) {
        const double* dw = bundle.data.data() + static_cast<size_t>(n) * M;
        double* dst = out.data() + static_cast<size_t>(n) * M;
        for (int i = 0; i < M; ++i) {
            const double z = rng::normal_at(bundle.seed, aux_stream, static_cast<std::uint32_t>(i),
                                            static_cast<std::uint64_t>(n));
            dst[i] = slope[static_cast<size_t>(i)] * dw[i] + resid[static_cast<size_t>(i)] * z;
        }
    }
    return out;
}

void dump_bundle(const NoiseBundle& bundle, std::ostream& os) {
    write_u64(os, static_cast<std::uint64_t>(bundle.modes));
    write_u64(os, static_cast<std::uint64_t>(bundle.steps));
    write_f64(os, bundle.T);
    write_u64(os, bundle.seed);
    write_u64(os, bundle.stream);
    for (int i = 0; i < bundle.modes; ++i) {
        for (std::int64_t n = 0; n < bundle.steps; ++n) write_f64(os, bundle.at(i, n));
    }
}

NoiseBundle load_bundle(std::istream& is) {
    NoiseBundle b;
    b.modes = static_cast<int>(read_u64(is));
    b.steps = static_cast<std::int64_t>(read_u64(is));
    b.T = read_f64(is);
    b.seed = read_u64(is);
    b.stream = read_u64(is);
    if (!is || b.modes < 1 || b.steps < 1) throw std::runtime_error("load_bundle: bad header");
    b.data.resize(static_cast<size_t>(b.modes) * static_cast<size_t>(b.steps));
    for (int i = 0; i < b.modes; ++i) {
        for (std::int64_t n = 0; n < b.steps; ++n) {
            b.data[static_cast<size_t>(n) * b.modes + i] = read_f64(is);
        }
    }
    if (!is) throw std::runtime_error("load_bundle: truncated payload");
    return b;
}

void dump_bundle_file(const NoiseBundle& bundle, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dump_bundle_file: cannot open " + path);
    dump_bundle(bundle, os);
    if (!os) throw std::runtime_error("dump_bundle_file: write failed for " + path);
}

NoiseBundle load_bundle_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_bundle_file: cannot open " + path);
    return load_bundle(is);
}

std::uint64_t bundles_sampled() { return g_bundles_sampled.load(std::memory_order_relaxed); }

}  // namespace spde
