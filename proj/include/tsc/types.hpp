#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsc/errors.hpp"

namespace tsc {

/// One univariate sequence with an optional class label.
struct TimeSeries {
    std::vector<double> values;
    std::optional<int> label;
    std::string id;

    std::size_t length() const { return values.size(); }
};

/// Checks length and finiteness; returns the series unchanged on success.
TimeSeries validate_series(TimeSeries s);

/// Configuration of the multi-scale change-space kernel.
struct ChangeSpaceConfig {
    int scale_min = 10;
    int scale_max = 500;
    int scale_step = 10;
    /// Explicit scale set; when empty the arithmetic grid
    /// {scale_min, scale_min + scale_step, ..., scale_max} is used.
    std::vector<int> scales;

    double penalty_weight = 1.0;
    double variance_floor = 1e-8;
    int smoothing_window = 5;
    int saliency_window = 25;
    double saliency_sigma = 2.0;

    /// The effective ascending scale set (explicit or grid).
    std::vector<int> scale_set() const;

    /// Throws InvalidArgumentError on any violated invariant.
    void validate() const;
};

/// Population variances of the left, right and pooled windows around a
/// candidate change index, each floored at the configured variance floor.
struct WindowStats {
    double var_left = 0.0;
    double var_right = 0.0;
    double var_pooled = 0.0;
};

/// A per-index change score plus the interval of indices where at least one
/// scale was valid. Scores outside the support are exactly zero.
struct ChangeCurve {
    std::vector<double> scores;
    std::vector<int> scale_count;
    std::size_t support_lo = 0;
    std::size_t support_hi = 0; // inclusive

    bool empty() const { return scores.empty(); }
    bool in_support(std::size_t t) const { return t >= support_lo && t <= support_hi; }
    std::size_t support_length() const {
        return support_hi >= support_lo ? support_hi - support_lo + 1 : 0;
    }
};

/// Ordered interior cut indices partitioning a series of length n into
/// half-open segments [0, c1), [c1, c2), ..., [cm, n).
struct SegmentBoundaries {
    std::vector<std::size_t> cuts;

    std::size_t segment_count() const { return cuts.size() + 1; }
};

/// Throws PartitionMismatchError unless 0 < c1 < ... < cm < n.
void validate_boundaries(const SegmentBoundaries& b, std::size_t n);

/// Materializes the half-open segments implied by the cuts.
std::vector<std::pair<std::size_t, std::size_t>> segments_of(const SegmentBoundaries& b,
                                                             std::size_t n);

/// K fixed-length zero-padded component vectors, the encoder's token sequence.
struct ComponentSequence {
    std::vector<std::vector<double>> tokens;
    std::vector<std::size_t> true_lengths;

    std::size_t size() const { return tokens.size(); }
    std::size_t padded_length() const { return tokens.empty() ? 0 : tokens.front().size(); }
};

} // namespace tsc
