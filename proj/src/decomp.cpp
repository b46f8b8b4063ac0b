#include "mimodfe/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mimodfe {

namespace {

void require_square(const CMat& a, const char* who) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string(who) + ": expected a square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

}  // namespace

HermitianEig hermitian_eig(const CMat& a) {
    require_square(a, "hermitian_eig");
    const CMat sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw FactorizationError("hermitian_eig: eigensolver did not converge", -1);
    }
    HermitianEig out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

CMat cholesky_upper(const CMat& a) {
    require_square(a, "cholesky_upper");
    const Eigen::Index n = a.rows();
    CMat c = CMat::Zero(n, n);

    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i).real()));
    const double pivot_floor = scale * 1e-13;

    // Reads only the upper triangle, treating the input as Hermitian.
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = a(i, i).real();
        for (Eigen::Index k = 0; k < i; ++k) d -= std::norm(c(k, i));
        if (!(d > pivot_floor)) {
            throw FactorizationError(
                "cholesky_upper: matrix not positive definite at pivot " + std::to_string(i),
                static_cast<int>(i));
        }
        const double diag = std::sqrt(d);
        c(i, i) = diag;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            Complex s = a(i, j);
            for (Eigen::Index k = 0; k < i; ++k) s -= std::conj(c(k, i)) * c(k, j);
            c(i, j) = s / diag;
        }
    }
    return c;
}

CMat cholesky_solve(const CMat& upper_factor, const CMat& rhs) {
    if (upper_factor.rows() != upper_factor.cols() || upper_factor.rows() != rhs.rows()) {
        throw DimensionError("cholesky_solve: factor/rhs dimension mismatch");
    }
    CMat y = upper_factor.adjoint().triangularView<Eigen::Lower>().solve(rhs);
    return upper_factor.triangularView<Eigen::Upper>().solve(y);
}

double log2_det_pd(const CMat& a) {
    const CMat c = cholesky_upper(a);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) acc += std::log2(c(i, i).real());
    return 2.0 * acc;
}

CMat hermitian_sqrt(const CMat& a) {
    const HermitianEig eig = hermitian_eig(a);
    RVec roots(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        roots(i) = std::sqrt(std::max(0.0, eig.eigenvalues(i)));
    }
    CMat out = eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
    return 0.5 * (out + out.adjoint());
}

namespace {

// Swap diagonal positions i and j of the working factorization. The
// symmetric row+column swap on r keeps it upper triangular because rows
// >= k of r are still pure diagonal when this runs.
void swap_positions(Eigen::MatrixXd& r, CMat& q, CMat& s, Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    r.row(i).swap(r.row(j));
    r.col(i).swap(r.col(j));
    q.col(i).swap(q.col(j));
    s.col(i).swap(s.col(j));
}

}  // namespace

QrsFactors qrs_equal_diagonal(const CMat& a) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (m == 0 || n == 0) throw DimensionError("qrs_equal_diagonal: empty input");

    if (m == 1 && n == 1) {
        const double mag = std::abs(a(0, 0));
        if (mag <= 0.0) throw RankError("qrs_equal_diagonal: zero 1x1 input (numerical rank 0)", 0);
        QrsFactors out;
        out.q = CMat::Constant(1, 1, a(0, 0) / mag);
        out.r = CMat::Constant(1, 1, mag);
        out.s = CMat::Identity(1, 1);
        return out;
    }

    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& sv = svd.singularValues();
    const double smax = sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > smax * 1e-10) ++rank;
    }
    if (m < n || rank < n) {
        throw RankError("qrs_equal_diagonal: input is not full column rank (numerical rank " +
                            std::to_string(rank) + " of " + std::to_string(n) + ")",
                        rank);
    }

    double log_gm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_gm += std::log(sv(i));
    const double sigma_bar = std::exp(log_gm / static_cast<double>(n));

    CMat q = svd.matrixU();
    CMat s = svd.matrixV();
    // The rotations below are real, so the triangular factor stays real.
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    r.diagonal() = sv.head(n);

    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        Eigen::Index imax = k, imin = k;
        for (Eigen::Index i = k; i < n; ++i) {
            if (r(i, i) > r(imax, imax)) imax = i;
            if (r(i, i) < r(imin, imin)) imin = i;
        }
        swap_positions(r, q, s, k, imax);
        if (imin == k) imin = imax;
        swap_positions(r, q, s, k + 1, imin);

        const double d1 = r(k, k);
        const double d2 = r(k + 1, k + 1);
        double c = 1.0, sn = 0.0;
        if (d1 - d2 > 1e-15 * sigma_bar) {
            const double num = std::max(0.0, sigma_bar * sigma_bar - d2 * d2);
            c = std::sqrt(std::min(1.0, num / (d1 * d1 - d2 * d2)));
            sn = std::sqrt(std::max(0.0, 1.0 - c * c));
        }

        // Right rotation on columns (k, k+1) of r and s.
        {
            Eigen::VectorXd ck = r.col(k), ck1 = r.col(k + 1);
            r.col(k) = c * ck + sn * ck1;
            r.col(k + 1) = -sn * ck + c * ck1;
            CVec sk = s.col(k), sk1 = s.col(k + 1);
            s.col(k) = c * sk + sn * sk1;
            s.col(k + 1) = -sn * sk + c * sk1;
        }
        // Left rotation on rows (k, k+1) of r, absorbed into q's columns.
        {
            const double c2 = c * d1 / sigma_bar;
            const double s2 = sn * d2 / sigma_bar;
            Eigen::RowVectorXd rk = r.row(k), rk1 = r.row(k + 1);
            r.row(k) = c2 * rk + s2 * rk1;
            r.row(k + 1) = -s2 * rk + c2 * rk1;
            CVec qk = q.col(k), qk1 = q.col(k + 1);
            q.col(k) = c2 * qk + s2 * qk1;
            q.col(k + 1) = -s2 * qk + c2 * qk1;
        }
        r(k + 1, k) = 0.0;
    }

    QrsFactors out;
    out.q = std::move(q);
    out.r = r.template triangularView<Eigen::Upper>().toDenseMatrix().cast<Complex>();
    out.s = std::move(s);
    return out;
}

}  // namespace mimodfe
