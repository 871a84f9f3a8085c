#include "tsc/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace tsc {

double covering_score(const SegmentBoundaries& ground_truth, const SegmentBoundaries& predicted,
                      std::size_t n) {
    if (n == 0) {
        throw PartitionMismatchError("cannot cover an empty index range");
    }
    const auto gt = segments_of(ground_truth, n);
    const auto pred = segments_of(predicted, n);

    double total = 0.0;
    for (const auto& [a, b] : gt) {
        double best = 0.0;
        for (const auto& [c, d] : pred) {
            const std::size_t lo = std::max(a, c);
            const std::size_t hi = std::min(b, d);
            if (hi <= lo) {
                continue;
            }
            const double inter = static_cast<double>(hi - lo);
            const double uni = static_cast<double>((b - a) + (d - c)) - inter;
            best = std::max(best, inter / uni);
        }
        total += static_cast<double>(b - a) * best;
    }
    return total / static_cast<double>(n);
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw LengthMismatchError("prediction and label counts differ");
    }
    if (predictions.empty()) {
        throw EmptyInputError("accuracy of an empty list is undefined");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

Summary summarize(std::vector<std::pair<std::string, double>> per_dataset) {
    if (per_dataset.empty()) {
        throw EmptyInputError("cannot summarize an empty table");
    }
    std::sort(per_dataset.begin(), per_dataset.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    Summary s;
    for (const auto& [name, value] : per_dataset) {
        s.mean += value;
    }
    s.mean /= static_cast<double>(per_dataset.size());
    double acc = 0.0;
    for (const auto& [name, value] : per_dataset) {
        const double d = value - s.mean;
        acc += d * d;
    }
    s.stddev = std::sqrt(acc / static_cast<double>(per_dataset.size()));
    s.table = std::move(per_dataset);
    return s;
}

} // namespace tsc
