#include "mimodfe/channels.hpp"

#include <cmath>

namespace mimodfe {

std::string to_string(Modulation m) {
    return m == Modulation::dmt ? "dmt" : "zeropad";
}

Modulation modulation_from_string(const std::string& name) {
    if (name == "dmt") return Modulation::dmt;
    if (name == "zeropad" || name == "zero_padded") return Modulation::zero_padded;
    throw ConfigError("unknown modulation '" + name + "' (expected dmt or zeropad)");
}

CMat IsiChannel::matrix() const {
    return modulation == Modulation::dmt ? dmt_matrix(taps, block_size)
                                         : toeplitz_matrix(taps, block_size);
}

CMat toeplitz_matrix(const CVec& taps, int block_size) {
    if (taps.size() == 0) throw DimensionError("toeplitz_matrix: empty taps");
    if (block_size < 1) throw DimensionError("toeplitz_matrix: block size must be >= 1");
    const int memory = static_cast<int>(taps.size()) - 1;
    CMat h = CMat::Zero(block_size + memory, block_size);
    for (int j = 0; j < block_size; ++j) {
        for (int l = 0; l <= memory; ++l) h(j + l, j) = taps(l);
    }
    return h;
}

CMat dmt_matrix(const CVec& taps, int block_size) {
    if (taps.size() == 0) throw DimensionError("dmt_matrix: empty taps");
    if (block_size < 1) throw DimensionError("dmt_matrix: block size must be >= 1");
    if (taps.size() > block_size) {
        throw ConfigError("dmt_matrix: " + std::to_string(taps.size()) +
                          " taps exceed block size " + std::to_string(block_size) +
                          " (cyclic prefix assumption violated)");
    }
    constexpr double two_pi = 6.28318530717958647692;
    CMat h = CMat::Zero(block_size, block_size);
    for (int m = 0; m < block_size; ++m) {
        Complex sum = 0.0;
        for (int l = 0; l < taps.size(); ++l) {
            const double phase = -two_pi * static_cast<double>(l) * m / block_size;
            sum += taps(l) * Complex(std::cos(phase), std::sin(phase));
        }
        h(m, m) = sum;
    }
    return h;
}

IsiChannel sample_channel(Rng& rng, int memory, int block_size, Modulation modulation) {
    if (memory < 0) throw DimensionError("sample_channel: memory must be >= 0");
    if (block_size < 1) throw DimensionError("sample_channel: block size must be >= 1");
    IsiChannel ch;
    ch.modulation = modulation;
    ch.block_size = block_size;
    ch.taps = CVec(memory + 1);
    const double tap_variance = 1.0 / (memory + 1);
    for (int l = 0; l <= memory; ++l) ch.taps(l) = rng.complex_normal(tap_variance);
    return ch;
}

}  // namespace mimodfe
