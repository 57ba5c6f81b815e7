#pragma once

// Discretisation of the cylindrical Wiener process: per-mode Brownian
// increments at a finest dyadic resolution, coarsenable by exact block sums,
// plus jointly-sampled stochastic-convolution increments.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spde/spectral.hpp"

namespace spde {

// Increment matrix; entry (mode i, step n) ~ Normal(0, T/steps), independent
// across modes and steps, a pure function of (seed, stream, i, n).
//
// Storage is step-major (data[n*modes + i]) so one time step is contiguous.
// N_max is restricted to powers of two; coarsening halves the step count one
// dyadic level at a time, so block sums are reproduced bit-for-bit by any
// composition of coarsenings.
struct NoiseBundle {
    int modes = 0;
    std::int64_t steps = 0;
    double T = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> data;

    double at(int mode, std::int64_t step) const { return data[static_cast<size_t>(step) * modes + mode]; }
    double dt() const { return T / static_cast<double>(steps); }
};

NoiseBundle sample_increments(int modes, std::int64_t n_max, double T, std::uint64_t seed,
                              std::uint64_t stream = 0);

// Fills a preallocated step-major buffer with the same entries sample_increments
// would produce; the Monte Carlo engine uses this to avoid reallocation.
void fill_increments(double* data, int modes, std::int64_t n_max, double T, std::uint64_t seed,
                     std::uint64_t stream);

// One in-place dyadic halving pass: row k := row 2k + row 2k+1 for k < steps/2.
// coarsen() is the composition of such passes.
void halve_steps(double* data, int modes, std::int64_t steps);

// Block sums over `factor` consecutive fine steps (factor divides steps; both
// are powers of two). Implemented as repeated pairwise halving.
NoiseBundle coarsen(const NoiseBundle& bundle, std::int64_t factor);

// Per-step convolution increments I_{i,n} = int_{t_n}^{t_{n+1}} e^{lambda_i (t_{n+1}-s)} dW_s,
// jointly Gaussian with the bundle's Delta W entries:
//   Var(DW) = h, Var(I) = (1 - e^{-2|l|h}) / (2|l|), Cov(DW,I) = (1 - e^{-|l|h}) / |l|.
// Sampled conditionally on DW with refinement noise from stream `aux_stream` of
// the same seed. Returned step-major, like NoiseBundle::data.
std::vector<double> convolution_increments(const DiagonalOperator& op, const NoiseBundle& bundle,
                                           std::uint64_t aux_stream);

// Closed forms behind convolution_increments (also used by tests).
double convolution_variance(double lambda, double h);
double convolution_covariance(double lambda, double h);

// Binary dump/load: little-endian header {u64 modes, u64 steps, f64 T, u64 seed,
// u64 stream}, then modes*steps doubles in mode-major (row-major) order.
void dump_bundle(const NoiseBundle& bundle, std::ostream& os);
NoiseBundle load_bundle(std::istream& is);
void dump_bundle_file(const NoiseBundle& bundle, const std::string& path);
NoiseBundle load_bundle_file(const std::string& path);

// Number of bundles sampled process-wide; deterministic code paths are checked
// to leave it untouched.
std::uint64_t bundles_sampled();

}  // namespace spde
