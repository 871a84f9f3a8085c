#pragma once

#include <cstdint>
#include <vector>

#include "tsc/types.hpp"

namespace tsc {

struct SegmentSpec {
    std::size_t length = 0;
    double mean = 0.0;
    double stddev = 1.0;
};

/// Piecewise-stationary Gaussian series specification with known boundaries.
struct SyntheticSpec {
    std::vector<SegmentSpec> segments;
    std::uint64_t seed = 0;
    int label = 0;
    /// Maximum uniform perturbation of each interior boundary position.
    std::size_t jitter = 0;
};

struct GeneratedSeries {
    TimeSeries series;
    SegmentBoundaries truth;
};

/// Draws independent Gaussian samples per segment; boundaries are jittered by
/// a uniform integer in [-jitter, jitter] while keeping every segment at
/// least two samples long. Deterministic per seed.
GeneratedSeries generate(const SyntheticSpec& spec);

struct ClassificationSuite {
    std::vector<TimeSeries> train;
    std::vector<TimeSeries> test;
    std::vector<SegmentBoundaries> train_truth;
    std::vector<SegmentBoundaries> test_truth;
};

/// Two classes, 100 train / 100 test series each, N = 600. Class 0 has
/// segment means (0, 4, 0) and class 1 (4, 0, 0): the same multiset of
/// components in a different order, so per-series global statistics match and
/// only order-aware features separate the classes. Segment lengths 200 with
/// boundary jitter of 20, unit noise.
ClassificationSuite make_classification_suite(std::uint64_t seed);

} // namespace tsc
