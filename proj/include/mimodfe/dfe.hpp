#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mimodfe/designer.hpp"

namespace mimodfe {

/// Complex symbol constellation with Gray bit mapping and unit average
/// energy. QPSK is the one shipped; slicing ties round toward the point
/// with the lexicographically smaller bit label.
class Constellation {
public:
    static Constellation qpsk() { return Constellation(); }
    static Constellation from_string(const std::string& name);

    int bits_per_symbol() const { return 2; }
    std::string name() const { return "qpsk"; }

    Complex map(const std::uint8_t* bits) const;
    void demap(Complex point, std::uint8_t* bits) const;
    Complex slice(Complex soft) const;

private:
    Constellation() = default;
};

/// Per-user MMSE decision-feedback filters.
struct UserDfe {
    CMat feedforward;     ///< F_k, streams x received-dimension
    CMat feedback;        ///< B_k, strictly upper triangular
    RVec r_diag;          ///< diagonal of the triangular factor of J_k
    RVec error_variance;  ///< predicted per-symbol error power, r_diag^-2
};

struct DfeReceiver {
    std::vector<UserDfe> users;
    double predicted_mse = 0.0;  ///< average predicted error power per symbol
};

/// Builds the MMSE-DFE for a designed system: with C the upper Cholesky
/// factor of J_k and D its diagonal, W = D^-1 C, B = W - I and
/// F = D^-1 C^-H (H T)^H noise_cov^-1. The predicted error covariance
/// W J^-1 W^H is then exactly diag(d_j^-2).
DfeReceiver build_receiver(const DesignResult& design, const ChannelSet& channels);

struct DetectionResult {
    std::vector<CVec> symbols;                    ///< decided constellation points per user
    std::vector<std::vector<std::uint8_t>> bits;  ///< decided bits per user
    std::vector<CVec> soft;                       ///< decision statistics before slicing
};

/// Two-level successive cancellation: users are detected in reverse index
/// order with their reconstructed signals subtracted from the received
/// vector, and symbols inside a user's block are decided from last to
/// first through the feedback filter. Passing `genie` feeds back the true
/// transmitted symbols instead of decisions (both levels).
DetectionResult detect(const DfeReceiver& receiver, const DesignResult& design,
                       const ChannelSet& channels, const CVec& received,
                       const Constellation& constellation,
                       const std::vector<CVec>* genie = nullptr);

/// One-shot linear MMSE front end over the stacked streams of all users.
struct LinearReceiver {
    CMat combiner;        ///< total-streams x received-dimension
    RVec error_variance;  ///< predicted per-symbol error power
    double predicted_mse = 0.0;
    std::vector<int> streams;  ///< per-user stream counts, for splitting
};

LinearReceiver build_linear_receiver(const DesignResult& design, const ChannelSet& channels);

DetectionResult linear_mmse_detect(const LinearReceiver& receiver, const CVec& received,
                                   const Constellation& constellation);

/// Convenience overload that builds the linear receiver on the fly.
DetectionResult linear_mmse_detect(const DesignResult& design, const ChannelSet& channels,
                                   const CVec& received, const Constellation& constellation);

}  // namespace mimodfe
