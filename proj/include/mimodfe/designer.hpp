#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mimodfe/channels.hpp"
#include "mimodfe/decomp.hpp"

namespace mimodfe {

/// The per-user channel matrices of one multiple-access realization. All
/// matrices share the received-signal dimension; noise covariance is
/// identity by convention.
struct ChannelSet {
    std::vector<CMat> channels;  ///< H_k
    std::vector<int> ranks;      ///< numerical rank of each H_k

    static ChannelSet from_matrices(std::vector<CMat> h);
    static ChannelSet from_channels(const std::vector<IsiChannel>& chans);

    int users() const { return static_cast<int>(channels.size()); }
    int rows() const { return channels.empty() ? 0 : static_cast<int>(channels[0].rows()); }
};

/// Everything the sequential closed-form construction produces for one user.
struct UserDesign {
    CMat precoder;        ///< T_k, columns = streams
    CMat noise_cov;       ///< interference-plus-noise covariance seen by this user
    CMat info_matrix;     ///< J_k = I + (H T)^H noise_cov^-1 (H T)
    CMat basis;           ///< leading eigenvectors of H^H noise_cov^-1 H
    CMat s_factor;        ///< unitary S from the equal-diagonal QRS step
    RVec eigenvalues;     ///< spectrum of H^H noise_cov^-1 H, non-increasing
    RVec loadings;        ///< per-stream powers, zero past active_rank
    int active_rank = 0;  ///< streams that actually carry power
    double info_bits = 0.0;
    double power = 0.0;   ///< trace(T^H T)

    int streams() const { return static_cast<int>(precoder.cols()); }
};

struct DesignResult {
    std::vector<UserDesign> users;
    double sum_info_bits = 0.0;
    int total_streams = 0;
    /// (user, stream) pairs whose loading came out zero. Such streams carry
    /// no information; the simulator refuses to map bits onto them.
    std::vector<std::pair<int, int>> dead_streams;

    double mse_bound() const { return std::exp2(-sum_info_bits / total_streams); }
};

/// Sequential closed-form design of all K precoders under a fixed sum
/// mutual information. User k is designed against the interference of users
/// 1..k-1 plus thermal noise and receives the (N_k / N) share of the
/// information budget.
DesignResult design_transceivers(const ChannelSet& channels, const std::vector<int>& streams,
                                 double sum_info_bits);

struct Residual {
    std::string name;
    double value = 0.0;
    bool flagged = false;
};

struct VerificationReport {
    std::vector<Residual> residuals;
    double tolerance = 0.0;

    bool ok() const;
    double max_abs() const;
    std::string to_string() const;
};

/// Recomputes the optimality conditions of a design from scratch and
/// reports the residuals: sum-information constraint, per-user information
/// split, geometric det sequence, equal-diagonal triangular factors, and
/// the gap between predicted average MSE and its lower bound.
VerificationReport verify_design(const DesignResult& design, const ChannelSet& channels,
                                 double tolerance);

}  // namespace mimodfe
