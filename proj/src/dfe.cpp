#include "mimodfe/dfe.hpp"

#include <cmath>

namespace mimodfe {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

}  // namespace

Constellation Constellation::from_string(const std::string& name) {
    if (name == "qpsk") return qpsk();
    throw ConfigError("unknown constellation '" + name + "' (expected qpsk)");
}

Complex Constellation::map(const std::uint8_t* bits) const {
    return {bits[0] ? -inv_sqrt2 : inv_sqrt2, bits[1] ? -inv_sqrt2 : inv_sqrt2};
}

void Constellation::demap(Complex point, std::uint8_t* bits) const {
    bits[0] = point.real() < 0.0 ? 1 : 0;
    bits[1] = point.imag() < 0.0 ? 1 : 0;
}

Complex Constellation::slice(Complex soft) const {
    // On a tie (component exactly zero) the 0-bit, i.e. positive, point wins.
    return {soft.real() < 0.0 ? -inv_sqrt2 : inv_sqrt2,
            soft.imag() < 0.0 ? -inv_sqrt2 : inv_sqrt2};
}

DfeReceiver build_receiver(const DesignResult& design, const ChannelSet& channels) {
    const int user_count = channels.users();
    if (static_cast<int>(design.users.size()) != user_count) {
        throw ConfigError("build_receiver: design/channel user count mismatch");
    }

    DfeReceiver receiver;
    receiver.users.reserve(user_count);
    double mse_sum = 0.0;

    for (int k = 0; k < user_count; ++k) {
        const UserDesign& user = design.users[k];
        const CMat& h = channels.channels[k];
        if (user.precoder.rows() != h.cols()) {
            throw ConfigError("build_receiver: precoder " + std::to_string(k + 1) +
                              " does not match its channel");
        }
        const int nk = user.streams();
        const CMat effective = h * user.precoder;

        const CMat tri = cholesky_upper(user.info_matrix);
        RVec diag(nk);
        for (int i = 0; i < nk; ++i) diag(i) = tri(i, i).real();

        UserDfe filt;
        filt.r_diag = diag;
        filt.error_variance = diag.array().square().inverse();

        const CMat unit_tri = diag.cwiseInverse().asDiagonal() * tri;
        filt.feedback = unit_tri - CMat::Identity(nk, nk);

        // F = D^-1 C^-H (H T)^H cov^-1, assembled through triangular and
        // Cholesky solves only.
        const CMat cov_factor = cholesky_upper(user.noise_cov);
        const CMat whitened = cholesky_solve(cov_factor, effective);  // cov^-1 H T
        const CMat lifted = tri.adjoint().triangularView<Eigen::Lower>().solve(
            CMat(whitened.adjoint()));
        filt.feedforward = diag.cwiseInverse().asDiagonal() * lifted;

        mse_sum += filt.error_variance.sum();
        receiver.users.push_back(std::move(filt));
    }

    receiver.predicted_mse = mse_sum / design.total_streams;
    return receiver;
}

DetectionResult detect(const DfeReceiver& receiver, const DesignResult& design,
                       const ChannelSet& channels, const CVec& received,
                       const Constellation& constellation, const std::vector<CVec>* genie) {
    const int user_count = channels.users();
    if (static_cast<int>(receiver.users.size()) != user_count) {
        throw ConfigError("detect: receiver/channel user count mismatch");
    }
    if (received.size() != channels.rows()) {
        throw DimensionError("detect: received vector has length " +
                             std::to_string(received.size()) + ", expected " +
                             std::to_string(channels.rows()));
    }
    if (genie && static_cast<int>(genie->size()) != user_count) {
        throw ConfigError("detect: genie symbol count mismatch");
    }

    DetectionResult out;
    out.symbols.resize(user_count);
    out.bits.resize(user_count);
    out.soft.resize(user_count);

    CVec residual = received;
    for (int k = user_count - 1; k >= 0; --k) {
        const UserDesign& user = design.users[k];
        const UserDfe& filt = receiver.users[k];
        const int nk = user.streams();

        const CVec stats = filt.feedforward * residual;
        CVec decided(nk), soft(nk);
        const CVec* fed_back = genie ? &(*genie)[k] : &decided;

        for (int j = nk - 1; j >= 0; --j) {
            Complex s = stats(j);
            for (int m = j + 1; m < nk; ++m) s -= filt.feedback(j, m) * (*fed_back)(m);
            soft(j) = s;
            decided(j) = constellation.slice(s);
        }

        out.bits[k].resize(static_cast<size_t>(nk) * constellation.bits_per_symbol());
        for (int j = 0; j < nk; ++j) {
            constellation.demap(decided(j),
                                out.bits[k].data() + static_cast<size_t>(j) * 2);
        }

        const CVec& cancelled = genie ? (*genie)[k] : decided;
        residual -= channels.channels[k] * (user.precoder * cancelled);
        out.symbols[k] = std::move(decided);
        out.soft[k] = std::move(soft);
    }
    return out;
}

LinearReceiver build_linear_receiver(const DesignResult& design, const ChannelSet& channels) {
    const int user_count = channels.users();
    if (static_cast<int>(design.users.size()) != user_count) {
        throw ConfigError("build_linear_receiver: design/channel user count mismatch");
    }
    const int rows = channels.rows();
    CMat stacked(rows, design.total_streams);
    std::vector<int> streams;
    int col = 0;
    for (int k = 0; k < user_count; ++k) {
        const CMat effective = channels.channels[k] * design.users[k].precoder;
        stacked.middleCols(col, effective.cols()) = effective;
        streams.push_back(static_cast<int>(effective.cols()));
        col += static_cast<int>(effective.cols());
    }

    CMat gram = stacked * stacked.adjoint() + CMat::Identity(rows, rows);
    gram = 0.5 * (gram + gram.adjoint());
    const CMat factor = cholesky_upper(gram);

    LinearReceiver receiver;
    receiver.combiner = cholesky_solve(factor, stacked).adjoint();
    receiver.streams = std::move(streams);

    const CMat err = CMat::Identity(design.total_streams, design.total_streams) -
                     receiver.combiner * stacked;
    receiver.error_variance = err.diagonal().real();
    receiver.predicted_mse = receiver.error_variance.mean();
    return receiver;
}

DetectionResult linear_mmse_detect(const LinearReceiver& receiver, const CVec& received,
                                   const Constellation& constellation) {
    if (received.size() != receiver.combiner.cols()) {
        throw DimensionError("linear_mmse_detect: received vector has length " +
                             std::to_string(received.size()) + ", expected " +
                             std::to_string(receiver.combiner.cols()));
    }
    const CVec stacked = receiver.combiner * received;

    DetectionResult out;
    const int user_count = static_cast<int>(receiver.streams.size());
    out.symbols.resize(user_count);
    out.bits.resize(user_count);
    out.soft.resize(user_count);

    int offset = 0;
    for (int k = 0; k < user_count; ++k) {
        const int nk = receiver.streams[k];
        out.soft[k] = stacked.segment(offset, nk);
        out.symbols[k] = CVec(nk);
        out.bits[k].resize(static_cast<size_t>(nk) * constellation.bits_per_symbol());
        for (int j = 0; j < nk; ++j) {
            out.symbols[k](j) = constellation.slice(out.soft[k](j));
            constellation.demap(out.symbols[k](j),
                                out.bits[k].data() + static_cast<size_t>(j) * 2);
        }
        offset += nk;
    }
    return out;
}

DetectionResult linear_mmse_detect(const DesignResult& design, const ChannelSet& channels,
                                   const CVec& received, const Constellation& constellation) {
    return linear_mmse_detect(build_linear_receiver(design, channels), received, constellation);
}

}  // namespace mimodfe
