#pragma once

// Diagonal spectral representation of the generator A: semigroup, resolvent,
// the two-parameter evolution family of the linear-implicit scheme, fractional
// power norms, grid rounding maps and the constant function calE.

#include <cstdint>
#include <vector>

namespace spde {

enum class BasisKind { DirichletSine, NeumannCosine, Abstract };

// Coefficient state: coordinates <b_i, v>_H of a state v in the eigenbasis.
using CoeffState = std::vector<double>;

// Generator with spectrum {lambda_1, ..., lambda_M}, all strictly negative.
class DiagonalOperator {
public:
    DiagonalOperator(std::vector<double> eigenvalues, BasisKind basis);

    // lambda_n = -nu pi^2 n^2, n = 1..M (Dirichlet Laplacian on (0,1) scaled by nu)
    static DiagonalOperator dirichlet_laplacian(int modes, double nu);
    // lambda_n = -(n pi)^4 + (n pi)^2 - 1, n = 0..M-1 (Neumann, A = -L^2 - L - 1)
    static DiagonalOperator cahn_hilliard(int modes);
    // lambda_n = -c n^rho, n = 1..M
    static DiagonalOperator power_spectrum(int modes, double c, double rho);

    int modes() const { return static_cast<int>(eigenvalues_.size()); }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double eigenvalue(int i) const { return eigenvalues_[static_cast<size_t>(i)]; }
    BasisKind basis_kind() const { return basis_; }

private:
    std::vector<double> eigenvalues_;
    BasisKind basis_;
};

struct TimeGrid {
    double T;
    std::int64_t steps;
    double h;

    TimeGrid(double T_, std::int64_t steps_);
};

// Largest grid point floor(t)_h = max((-inf,t] cap {0,h,-h,2h,...}).
double floor_grid(double t, double h);
// Smallest grid point ceil(t)_h = min([t,inf) cap {0,h,-h,2h,...}).
double ceil_grid(double t, double h);

// e^{tA} x, t >= 0.
CoeffState semigroup_apply(const DiagonalOperator& op, double t, const CoeffState& x);
// (I - hA)^{-1} x, h > 0.
CoeffState resolvent_apply(const DiagonalOperator& op, double h, const CoeffState& x);
// S^h_{t1,t2} x = (I-(t1-floor(t1))A) (I-(t2-floor(t2))A)^{-1} (I-hA)^{-(floor(t2)-floor(t1))/h} x
// with the integer exponent recovered exactly.
CoeffState implicit_family_apply(const DiagonalOperator& op, double h, double t1, double t2,
                                 const CoeffState& x);

// || (-A)^r x ||_H = sqrt( sum |lambda_i|^{2r} x_i^2 ).
double hr_norm(const DiagonalOperator& op, double r, const CoeffState& x);

// calE_r(x) = [ sum_{n>=0} x^{2n} Gamma(r)^n / Gamma(nr+1) ]^{1/2}, r in (0,1].
// Series truncated at relative term size 1e-16 with a hard cap of 10000 terms.
double calE(double r, double x);

}  // namespace spde
