#pragma once

#include <string>
#include <vector>

#include "mimodfe/designer.hpp"

namespace mimodfe {

/// A design together with the channels it was produced for, as stored on
/// disk.
struct SavedDesign {
    DesignResult design;
    ChannelSet channels;
    std::string modulation = "matrix";
};

/// Writes the full design (channels, precoders, recursion artifacts) as
/// JSON so it can be re-verified later.
void save_design_json(const DesignResult& design, const ChannelSet& channels,
                      const std::string& modulation, const std::string& path);

SavedDesign load_design_json(const std::string& path);

/// Reads per-user channel taps: one complex tap per line as "re im",
/// users separated by blank lines.
std::vector<CVec> read_channel_taps(const std::string& path);

}  // namespace mimodfe
