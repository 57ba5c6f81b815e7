#pragma once

// Column-major dense matvec. The inner loop is a pure axpy with no reduction,
// so it vectorizes fully while keeping a fixed, deterministic summation order.

#include <cstddef>

namespace spde::detail {

inline void matvec_colmajor(const double* __restrict__ mat_cm, int n, const double* __restrict__ x,
                            double* __restrict__ y) {
    for (int i = 0; i < n; ++i) y[i] = 0.0;
    for (int j = 0; j < n; ++j) {
        const double xj = x[j];
        const double* __restrict__ col = mat_cm + static_cast<size_t>(j) * n;
        for (int i = 0; i < n; ++i) y[i] += col[i] * xj;
    }
}

}  // namespace spde::detail
