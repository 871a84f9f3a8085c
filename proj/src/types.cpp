#include "tsc/types.hpp"

#include <algorithm>
#include <cmath>

namespace tsc {

TimeSeries validate_series(TimeSeries s) {
    if (s.values.size() < 2) {
        throw TooShortError(s.values.size());
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i])) {
            throw NonFiniteError(i);
        }
    }
    return s;
}

std::vector<int> ChangeSpaceConfig::scale_set() const {
    if (!scales.empty()) {
        return scales;
    }
    std::vector<int> grid;
    for (int d = scale_min; d <= scale_max; d += scale_step) {
        grid.push_back(d);
    }
    return grid;
}

void ChangeSpaceConfig::validate() const {
    if (scale_min < 2) {
        throw InvalidArgumentError("scale_min must be >= 2");
    }
    if (scale_max < scale_min) {
        throw InvalidArgumentError("scale_max must be >= scale_min");
    }
    if (scale_step < 1) {
        throw InvalidArgumentError("scale_step must be >= 1");
    }
    for (int d : scales) {
        if (d < scale_min || d > scale_max) {
            throw InvalidArgumentError("explicit scale " + std::to_string(d) +
                                       " outside [scale_min, scale_max]");
        }
    }
    if (!std::is_sorted(scales.begin(), scales.end())) {
        throw InvalidArgumentError("explicit scales must be ascending");
    }
    if (variance_floor <= 0.0) {
        throw InvalidArgumentError("variance_floor must be positive");
    }
    if (smoothing_window < 1 || smoothing_window % 2 == 0) {
        throw InvalidArgumentError("smoothing_window must be odd and >= 1");
    }
    if (saliency_window < 1) {
        throw InvalidArgumentError("saliency_window must be >= 1");
    }
    if (saliency_sigma <= 0.0) {
        throw InvalidArgumentError("saliency_sigma must be positive");
    }
}

void validate_boundaries(const SegmentBoundaries& b, std::size_t n) {
    std::size_t prev = 0;
    for (std::size_t c : b.cuts) {
        if (c <= prev || c >= n) {
            throw PartitionMismatchError("cut " + std::to_string(c) +
                                         " does not define a non-empty interior segment");
        }
        prev = c;
    }
}

std::vector<std::pair<std::size_t, std::size_t>> segments_of(const SegmentBoundaries& b,
                                                             std::size_t n) {
    validate_boundaries(b, n);
    std::vector<std::pair<std::size_t, std::size_t>> segs;
    segs.reserve(b.cuts.size() + 1);
    std::size_t start = 0;
    for (std::size_t c : b.cuts) {
        segs.emplace_back(start, c);
        start = c;
    }
    segs.emplace_back(start, n);
    return segs;
}

} // namespace tsc
