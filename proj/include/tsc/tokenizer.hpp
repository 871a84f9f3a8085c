#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsc/types.hpp"

namespace tsc {

/// Token positions to mask for the auto-encoding objective.
struct MaskPlan {
    std::vector<std::size_t> masked_indices; // ascending
    double mask_ratio = 0.15;
};

/// Slices a series at the given boundaries into zero-padded tokens of stored
/// length padded_length. Concatenating the unpadded tokens reproduces the
/// series exactly.
ComponentSequence tokenize(const TimeSeries& s, const SegmentBoundaries& b,
                           std::size_t padded_length);

/// Draws max(1, floor(ratio * k)) mask positions without replacement from the
/// interior {1, ..., k-2} so bidirectional context always exists; k = 2 masks
/// token 0. Deterministic for a fixed seed.
MaskPlan plan_mask(std::size_t k, double ratio, std::uint64_t seed);

/// Returns a copy with the planned tokens replaced by all-zero vectors.
ComponentSequence apply_mask(const ComponentSequence& cs, const MaskPlan& plan);

} // namespace tsc
