#pragma once

#include <complex>

#include <Eigen/Dense>

#include "mimodfe/errors.hpp"

namespace mimodfe {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Ordered spectral factorization of a Hermitian matrix.
struct HermitianEig {
    RVec eigenvalues;   ///< sorted non-increasing
    CMat eigenvectors;  ///< unitary; column i pairs with eigenvalues[i]
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (a + a^H)/2 before factorizing, eigenvalues come back non-increasing.
HermitianEig hermitian_eig(const CMat& a);

/// Upper-triangular factor C with C^H C = a and real positive diagonal.
/// Throws FactorizationError (with the pivot index) if a is not positive
/// definite.
CMat cholesky_upper(const CMat& a);

/// Solves a x = rhs given the upper Cholesky factor of a.
CMat cholesky_solve(const CMat& upper_factor, const CMat& rhs);

/// log2 det of a Hermitian positive definite matrix.
double log2_det_pd(const CMat& a);

/// Hermitian square root of a positive semidefinite matrix; tiny negative
/// eigenvalues from roundoff are clamped to zero.
CMat hermitian_sqrt(const CMat& a);

/// Factors of the equal-diagonal QRS decomposition a * s = q * r.
struct QrsFactors {
    CMat q;  ///< orthonormal columns
    CMat r;  ///< upper triangular; all diagonal entries equal the geometric
             ///< mean of the singular values of the input
    CMat s;  ///< unitary
};

/// Equal-diagonal QRS (geometric mean) decomposition of a full-column-rank
/// matrix. Starting from the SVD, pairs of diagonal entries (current
/// largest with current smallest) are rotated until every diagonal entry of
/// r equals the geometric mean of the singular values. Deterministic for a
/// fixed input.
QrsFactors qrs_equal_diagonal(const CMat& a);

}  // namespace mimodfe
