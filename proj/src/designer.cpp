#include "mimodfe/designer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mimodfe/waterfill.hpp"

namespace mimodfe {

namespace {

int numerical_rank(const CMat& h) {
    Eigen::JacobiSVD<CMat> svd(h);
    const RVec& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > sv(0) * 1e-10) ++rank;
    }
    return rank;
}

}  // namespace

ChannelSet ChannelSet::from_matrices(std::vector<CMat> h) {
    if (h.empty()) throw ConfigError("ChannelSet: no channels");
    const Eigen::Index rows = h[0].rows();
    for (const CMat& m : h) {
        if (m.rows() != rows) {
            throw ConfigError("ChannelSet: all channels must share the received dimension");
        }
        if (m.cols() == 0 || m.rows() == 0) throw DimensionError("ChannelSet: empty channel");
    }
    ChannelSet set;
    set.ranks.reserve(h.size());
    for (const CMat& m : h) set.ranks.push_back(numerical_rank(m));
    set.channels = std::move(h);
    return set;
}

ChannelSet ChannelSet::from_channels(const std::vector<IsiChannel>& chans) {
    std::vector<CMat> h;
    h.reserve(chans.size());
    for (const IsiChannel& c : chans) h.push_back(c.matrix());
    return from_matrices(std::move(h));
}

DesignResult design_transceivers(const ChannelSet& channels, const std::vector<int>& streams,
                                 double sum_info_bits) {
    const int user_count = channels.users();
    if (static_cast<int>(streams.size()) != user_count) {
        throw ConfigError("design_transceivers: stream counts do not match user count");
    }
    if (!(sum_info_bits > 0.0)) {
        throw DomainError("design_transceivers: sum information must be positive");
    }
    int total_streams = 0;
    for (int k = 0; k < user_count; ++k) {
        if (streams[k] < 1) throw ConfigError("design_transceivers: streams must be >= 1");
        if (streams[k] > channels.ranks[k]) {
            throw ConfigError("design_transceivers: user " + std::to_string(k + 1) +
                              " requests " + std::to_string(streams[k]) +
                              " streams but channel rank is " +
                              std::to_string(channels.ranks[k]));
        }
        total_streams += streams[k];
    }

    const int rows = channels.rows();
    DesignResult result;
    result.sum_info_bits = sum_info_bits;
    result.total_streams = total_streams;
    result.users.reserve(user_count);

    CMat noise_cov = CMat::Identity(rows, rows);
    for (int k = 0; k < user_count; ++k) {
        const CMat& h = channels.channels[k];
        const int nk = streams[k];
        const double user_info = sum_info_bits * nk / total_streams;

        // whitened channel Gram matrix, inverted through the Cholesky factor
        const CMat cov_factor = cholesky_upper(noise_cov);
        const CMat whitened = cholesky_solve(cov_factor, h);
        const CMat gram = 0.5 * ((h.adjoint() * whitened) + (h.adjoint() * whitened).adjoint());

        const HermitianEig eig = hermitian_eig(gram);
        int usable = 0;
        const double eig_floor = std::max(0.0, eig.eigenvalues(0)) * 1e-14;
        for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
            if (eig.eigenvalues(i) > eig_floor) ++usable;
        }
        if (usable < nk) {
            throw ConfigError("design_transceivers: user " + std::to_string(k + 1) +
                              " has only " + std::to_string(usable) +
                              " usable eigenmodes for " + std::to_string(nk) + " streams");
        }

        const InverseWaterfillResult wf =
            inverse_waterfill(eig.eigenvalues.head(usable), user_info, nk);

        UserDesign user;
        user.eigenvalues = eig.eigenvalues;
        user.basis = eig.eigenvectors.leftCols(nk);
        user.loadings = wf.loadings;
        user.active_rank = wf.active_rank;
        user.info_bits = user_info;
        user.noise_cov = noise_cov;

        for (int n = wf.active_rank; n < nk; ++n) {
            result.dead_streams.emplace_back(k, n);
        }

        // Pre-rotation information matrix is diagonal in the eigenbasis;
        // its S-factor makes the triangular factor of J equal-diagonal.
        CMat info_diag = CMat::Zero(nk, nk);
        for (int n = 0; n < nk; ++n) {
            info_diag(n, n) = 1.0 + wf.loadings(n) * eig.eigenvalues(n);
        }
        if (nk == 1) {
            user.s_factor = CMat::Identity(1, 1);
        } else {
            user.s_factor = qrs_equal_diagonal(hermitian_sqrt(info_diag)).s;
        }

        RVec root_loadings(nk);
        for (int n = 0; n < nk; ++n) root_loadings(n) = std::sqrt(std::max(0.0, wf.loadings(n)));
        user.precoder = user.basis * root_loadings.asDiagonal() * user.s_factor;
        user.power = (user.precoder.adjoint() * user.precoder).trace().real();

        const CMat effective = h * user.precoder;
        const CMat j_raw = CMat::Identity(nk, nk) +
                           effective.adjoint() * cholesky_solve(cov_factor, effective);
        user.info_matrix = 0.5 * (j_raw + j_raw.adjoint());

        noise_cov += effective * effective.adjoint();
        noise_cov = 0.5 * (noise_cov + noise_cov.adjoint());
        result.users.push_back(std::move(user));
    }
    return result;
}

bool VerificationReport::ok() const {
    for (const Residual& r : residuals) {
        if (r.flagged) return false;
    }
    return true;
}

double VerificationReport::max_abs() const {
    double m = 0.0;
    for (const Residual& r : residuals) m = std::max(m, std::abs(r.value));
    return m;
}

std::string VerificationReport::to_string() const {
    std::ostringstream os;
    for (const Residual& r : residuals) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e", r.value);
        os << (r.flagged ? "FLAG " : "ok   ") << r.name << " = " << buf << '\n';
    }
    return os.str();
}

VerificationReport verify_design(const DesignResult& design, const ChannelSet& channels,
                                 double tolerance) {
    const int user_count = channels.users();
    if (static_cast<int>(design.users.size()) != user_count) {
        throw ConfigError("verify_design: design/channel user count mismatch");
    }
    const int rows = channels.rows();
    for (int k = 0; k < user_count; ++k) {
        if (design.users[k].precoder.rows() != channels.channels[k].cols()) {
            throw ConfigError("verify_design: precoder " + std::to_string(k + 1) +
                              " does not match its channel");
        }
    }

    VerificationReport report;
    report.tolerance = tolerance;
    auto push = [&](const std::string& name, double value) {
        report.residuals.push_back({name, value, std::abs(value) > tolerance});
    };

    // Rebuild the noise-covariance recursion from the precoders alone.
    const int total = design.total_streams;
    CMat cov = CMat::Identity(rows, rows);
    std::vector<double> log2_dets;
    log2_dets.push_back(0.0);
    std::vector<double> ratios;
    double predicted_mse_sum = 0.0;

    for (int k = 0; k < user_count; ++k) {
        const UserDesign& user = design.users[k];
        const CMat effective = channels.channels[k] * user.precoder;
        const CMat factor = cholesky_upper(cov);
        const CMat j_raw = CMat::Identity(user.streams(), user.streams()) +
                           effective.adjoint() * cholesky_solve(factor, effective);
        const CMat j = 0.5 * (j_raw + j_raw.adjoint());

        const double log2_det_j = log2_det_pd(j);
        push("user" + std::to_string(k + 1) + "_information",
             log2_det_j - design.sum_info_bits * user.streams() / total);

        const CMat tri = cholesky_upper(j);
        double dmin = tri(0, 0).real(), dmax = dmin;
        for (int i = 1; i < user.streams(); ++i) {
            const double d = tri(i, i).real();
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        push("user" + std::to_string(k + 1) + "_equal_diagonal",
             (dmax - dmin) / (0.5 * (dmax + dmin)));

        for (int i = 0; i < user.streams(); ++i) {
            const double d = tri(i, i).real();
            predicted_mse_sum += 1.0 / (d * d);
        }

        cov += effective * effective.adjoint();
        cov = 0.5 * (cov + cov.adjoint());
        log2_dets.push_back(log2_det_pd(cov));
    }

    push("sum_information", log2_dets.back() - design.sum_info_bits);

    // det(cov_k) must form a geometric sequence: each per-user per-stream
    // det ratio equals the common value 2^(-info/N).
    for (int k = 0; k < user_count; ++k) {
        ratios.push_back(
            std::exp2((log2_dets[k] - log2_dets[k + 1]) / design.users[k].streams()));
    }
    double rmin = ratios[0], rmax = ratios[0];
    for (double r : ratios) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    push("geometric_sequence", (rmax - rmin) / (0.5 * (rmax + rmin)));

    const double predicted_mse = predicted_mse_sum / total;
    push("mse_gap", predicted_mse - design.mse_bound());

    return report;
}

}  // namespace mimodfe
