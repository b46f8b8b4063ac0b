#include "mimodfe/waterfill.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mimodfe {

InverseWaterfillResult inverse_waterfill(const RVec& eigenvalues, double info_bits,
                                         int max_streams) {
    const Eigen::Index n = eigenvalues.size();
    if (n == 0) throw DimensionError("inverse_waterfill: empty eigenvalue vector");
    if (max_streams < 1 || max_streams > n) {
        throw DimensionError("inverse_waterfill: max_streams " + std::to_string(max_streams) +
                             " outside [1, " + std::to_string(n) + "]");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(eigenvalues(i) > 0.0)) {
            throw DomainError("inverse_waterfill: eigenvalue " + std::to_string(i) +
                              " is not positive");
        }
        if (i > 0 && eigenvalues(i) > eigenvalues(i - 1)) {
            throw DomainError("inverse_waterfill: eigenvalues not sorted non-increasing");
        }
    }
    if (!(info_bits > 0.0)) {
        throw DomainError("inverse_waterfill: information target must be positive");
    }

    // prefix[r] = sum of log2(eigenvalue_i) over the first r entries
    std::vector<double> prefix(static_cast<size_t>(n) + 1, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        prefix[static_cast<size_t>(i) + 1] = prefix[static_cast<size_t>(i)] + std::log2(eigenvalues(i));
    }

    // Largest r whose weakest member still clears the water threshold. The
    // eigenvalues are sorted, so testing the r-th entry suffices. The small
    // multiplicative slack keeps boundary channels (loading would be a
    // numerical zero) out of the active set.
    const double strictness = std::log2(1.0 + 1e-12);
    int natural = 1;
    for (int r = static_cast<int>(n); r >= 1; --r) {
        const double log2_threshold = (prefix[static_cast<size_t>(r)] - info_bits) / r;
        if (std::log2(eigenvalues(r - 1)) > log2_threshold + strictness) {
            natural = r;
            break;
        }
    }

    const int active = std::min(max_streams, natural);
    // water level = (2^info / prod of active eigenvalues)^(1/active)
    const double level = std::exp2((info_bits - prefix[static_cast<size_t>(active)]) / active);

    InverseWaterfillResult out;
    out.active_rank = active;
    out.loadings = RVec::Zero(max_streams);
    for (int i = 0; i < active; ++i) out.loadings(i) = level - 1.0 / eigenvalues(i);

    double achieved = 0.0;
    for (int i = 0; i < active; ++i) {
        achieved += std::log2(1.0 + out.loadings(i) * eigenvalues(i));
    }
    out.achieved_info_bits = achieved;
    return out;
}

}  // namespace mimodfe
