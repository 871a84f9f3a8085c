#pragma once

#include <string>
#include <vector>

#include "tsc/types.hpp"

namespace tsc {

/// Jaccard-weighted overlap of a predicted partition against the ground
/// truth: (1/n) * sum over ground-truth segments A of |A| * max over
/// predicted segments A' of |A ∩ A'| / |A ∪ A'|. Result lies in [0, 1];
/// 1 means exact agreement. Not symmetric in its arguments.
double covering_score(const SegmentBoundaries& ground_truth, const SegmentBoundaries& predicted,
                      std::size_t n);

/// Fraction of exact matches.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

struct Summary {
    double mean = 0.0;
    double stddev = 0.0; // population
    std::vector<std::pair<std::string, double>> table; // sorted by name
};

Summary summarize(std::vector<std::pair<std::string, double>> per_dataset);

} // namespace tsc
