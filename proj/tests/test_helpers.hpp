#pragma once

#include <cmath>

#include "mimodfe/decomp.hpp"
#include "mimodfe/rng.hpp"

namespace testutil {

using mimodfe::CMat;
using mimodfe::Complex;
using mimodfe::CVec;
using mimodfe::RVec;

inline CMat random_complex_matrix(mimodfe::Rng& rng, int rows, int cols) {
    CMat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.complex_normal(1.0);
    }
    return m;
}

inline CMat random_hermitian(mimodfe::Rng& rng, int n) {
    const CMat a = random_complex_matrix(rng, n, n);
    return 0.5 * (a + a.adjoint());
}

/// Hermitian positive definite with eigenvalues bounded away from zero.
inline CMat random_hpd(mimodfe::Rng& rng, int n) {
    const CMat a = random_complex_matrix(rng, n, n);
    return a.adjoint() * a + CMat::Identity(n, n);
}

inline double rel_error(const CMat& got, const CMat& want) {
    return (got - want).norm() / std::max(1e-300, want.norm());
}

}  // namespace testutil
