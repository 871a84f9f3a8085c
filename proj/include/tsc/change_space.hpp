#pragma once

#include <cstddef>
#include <vector>

#include "tsc/types.hpp"

namespace tsc {

struct Peak {
    std::size_t index = 0;
    double score = 0.0;
    double saliency = 0.0;
};

/// Salient peaks of a change curve, sorted by descending saliency and then
/// ascending index.
struct PeakSet {
    std::vector<Peak> peaks;

    std::size_t size() const { return peaks.size(); }
    bool empty() const { return peaks.empty(); }
};

/// Population variances of the windows [t-delta, t), [t, t+delta) and
/// [t-delta, t+delta), each floored at cfg.variance_floor.
WindowStats window_stats(const TimeSeries& s, std::size_t t, int delta,
                         const ChangeSpaceConfig& cfg);

/// Per-scale change score at index t:
///   S(t, d) = d*ln(var_pooled) - (d/2)*(ln var_left + ln var_right)
///             - penalty_weight * d * ln(2d)
/// Higher values mean the two half-windows are better explained by separate
/// Gaussian models than by a pooled one.
double tscs_score(const TimeSeries& s, std::size_t t, int delta,
                  const ChangeSpaceConfig& cfg);

/// Multi-scale change curve: scores[t] is the sum of tscs_score over every
/// scale valid at t. Scales with 2*delta > N are skipped; throws
/// NoValidScaleError when no scale fits at all. O(scales * N) via prefix sums.
ChangeCurve ms_tscs_curve(const TimeSeries& s, const ChangeSpaceConfig& cfg);

/// Centered moving average of width cfg.smoothing_window over the valid
/// indices. The window is clamped to the largest odd width that fits the
/// support; the support shrinks by half the effective width on each side.
ChangeCurve smooth_curve(const ChangeCurve& c, const ChangeSpaceConfig& cfg);

/// Salient peak extraction. A peak is the (leftmost) maximum of a maximal run
/// of indices whose score exceeds median + saliency_sigma * sigma, where the
/// median and sigma (1.4826 * MAD) are robust statistics of the curve over its
/// support. saliency = (score - median) / max(sigma, 1e-12). Peaks closer than
/// cfg.saliency_window indices to a more salient peak are dropped.
PeakSet detect_peaks(const ChangeCurve& c, const ChangeSpaceConfig& cfg);

/// Full detection pipeline for one series: penalty-free multi-scale curve,
/// smoothing, peak extraction. The penalty term is excluded here because
/// summing it over a position-dependent scale set produces a scale-count
/// staircase that dwarfs the likelihood-ratio signal; see detect_peaks for
/// the saliency gate that replaces its model-selection role.
PeakSet find_change_points(const TimeSeries& s, const ChangeSpaceConfig& cfg);

/// Dataset-level segment count policy, applied to per-series peak counts:
/// average component counts (peaks + 1) within each class, average the class
/// means, round half away from zero and clamp to [2, 50]. When more than half
/// of the series have no detected peaks the fallback of 15 uniform segments
/// is returned. Each pair is (class label, peak count).
int select_segment_count_from_counts(const std::vector<std::pair<int, std::size_t>>& counts);

/// Runs the detection pipeline over a labeled training set and applies the
/// segment count policy. Throws EmptyTrainingSetError on an empty set.
int select_segment_count(const std::vector<TimeSeries>& train, const ChangeSpaceConfig& cfg);

/// Converts a peak set into exactly k segments: the k-1 most salient peak
/// indices become cuts; missing cuts are filled from the nearest-integer
/// positions of a k-uniform grid, skipping positions within one index of an
/// existing cut.
SegmentBoundaries boundaries_from_peaks(const PeakSet& peaks, std::size_t n, int k);

/// Segments one series into exactly k components via the detection pipeline.
SegmentBoundaries segment_series(const TimeSeries& s, int k, const ChangeSpaceConfig& cfg);

} // namespace tsc
