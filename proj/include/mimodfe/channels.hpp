#pragma once

#include <string>

#include "mimodfe/decomp.hpp"
#include "mimodfe/rng.hpp"

namespace mimodfe {

enum class Modulation { zero_padded, dmt };

std::string to_string(Modulation m);
Modulation modulation_from_string(const std::string& name);

/// One user's ISI channel: taps h[0..L] plus the block modulation that
/// turns them into a matrix.
struct IsiChannel {
    CVec taps;
    Modulation modulation = Modulation::dmt;
    int block_size = 0;  ///< M

    int memory() const { return static_cast<int>(taps.size()) - 1; }
    CMat matrix() const;
};

/// (M+L) x M tall block-Toeplitz matrix of zero-padded block transmission:
/// entry (i, j) = taps[i-j] for 0 <= i-j <= L, else 0.
CMat toeplitz_matrix(const CVec& taps, int block_size);

/// M x M diagonal channel of DMT (cyclic prefix) transmission: diagonal
/// entry m is the M-point DFT of the zero-padded taps at bin m. Requires
/// the taps to fit inside one block.
CMat dmt_matrix(const CVec& taps, int block_size);

/// Draws L+1 i.i.d. circularly-symmetric complex Gaussian taps with total
/// expected energy 1 (per-tap variance 1/(L+1)).
IsiChannel sample_channel(Rng& rng, int memory, int block_size, Modulation modulation);

}  // namespace mimodfe
