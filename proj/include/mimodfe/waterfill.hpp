#pragma once

#include "mimodfe/decomp.hpp"

namespace mimodfe {

/// Power loadings that meet a mutual-information target at minimum power.
struct InverseWaterfillResult {
    int active_rank = 0;            ///< number of strictly positive loadings
    RVec loadings;                  ///< length max_streams, zero padded past active_rank
    double achieved_info_bits = 0;  ///< sum of log2(1 + loading * eigenvalue)
    double total_power() const { return loadings.sum(); }
};

/// Minimizes total transmit power subject to a fixed Gaussian mutual
/// information over parallel subchannels with gains `eigenvalues`
/// (non-increasing, strictly positive). At most `max_streams` subchannels
/// receive power; when the target information does not support that many,
/// the trailing loadings are zero.
InverseWaterfillResult inverse_waterfill(const RVec& eigenvalues, double info_bits,
                                         int max_streams);

}  // namespace mimodfe
