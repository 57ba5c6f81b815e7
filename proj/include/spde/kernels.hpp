#pragma once

// Allocation-free path stepping used by the Monte Carlo engine. For
// multiplicative models the state is kept on the collocation grid and the
// per-step linear map (synthesis o diag(factor) o analysis) is applied as one
// precomputed matrix, which is algebraically identical to the reference step
// functions in schemes.hpp. simulate_path stays as the plainly-written serial
// reference; tests pin the two against each other.

#include <cstdint>
#include <vector>

#include "spde/models.hpp"
#include "spde/schemes.hpp"

namespace spde::kernels {

class PathKernel {
public:
    // h = model.T / steps
    PathKernel(const ModelSpec& model, SchemeKind kind, std::int64_t steps);

    // Runs the full path from model.initial; `increments` holds `steps()`
    // step-major rows of mode increments; writes the terminal coefficient
    // state (size modes()). Not safe to share one instance across threads.
    void run(const double* increments, double* coeff_out);

    // Single in-place step of the grid/coeff state with one increment row.
    void init_state();
    void init_state(const CoeffState& initial);
    void step(const double* increment_row);
    void read_coeff(double* coeff_out) const;

    // Squared H-norm of the difference between this kernel's current state and
    // another kernel's (same model family and basis).
    double state_sq_distance(const PathKernel& other) const;

    int modes() const { return modes_; }
    std::int64_t steps() const { return steps_; }
    double h() const { return h_; }

private:
    const ModelSpec* model_;
    SchemeKind kind_;
    int modes_;
    std::int64_t steps_;
    double h_;
    bool multiplicative_;
    double kappa_ = 0.0;
    double drift_scale_ = 1.0;  // 1 + h for Identity drift, 1 otherwise
    std::vector<double> factor_;     // per-mode semigroup/resolvent factor
    std::vector<double> mu_;         // additive diagonal diffusion
    std::vector<double> grid_op_;    // M x M: synthesis * diag(factor) * analysis
    std::vector<double> state_;      // grid values (multiplicative) or coefficients
    std::vector<double> scratch_;
    std::vector<double> wgrid_;
    double grid_norm_scale_ = 1.0;   // ||coeff||^2 = ||grid||^2 * scale
};

}  // namespace spde::kernels
