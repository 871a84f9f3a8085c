#include "tsc/synthetic.hpp"

#include <algorithm>
#include <string>

#include "tsc/rng.hpp"

namespace tsc {

GeneratedSeries generate(const SyntheticSpec& spec) {
    if (spec.segments.empty()) {
        throw InvalidArgumentError("synthetic spec needs at least one segment");
    }
    std::size_t n = 0;
    for (const SegmentSpec& seg : spec.segments) {
        if (seg.length < 2) {
            throw InvalidArgumentError("synthetic segment lengths must be >= 2");
        }
        if (seg.stddev < 0.0) {
            throw InvalidArgumentError("synthetic segment stddev must be >= 0");
        }
        n += seg.length;
    }

    std::mt19937_64 gen(spec.seed);

    // Jitter the interior boundaries, clamped so every segment keeps >= 2
    // samples and the total length stays fixed.
    std::vector<std::size_t> bounds;
    std::size_t cum = 0;
    for (std::size_t i = 0; i + 1 < spec.segments.size(); ++i) {
        cum += spec.segments[i].length;
        bounds.push_back(cum);
    }
    if (spec.jitter > 0) {
        std::size_t prev = 0;
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            const auto j = static_cast<long long>(spec.jitter);
            const long long offset = rng::uniform_int(gen, -j, j);
            const std::size_t remaining = bounds.size() - i; // boundaries still to place
            const long long lo = static_cast<long long>(prev) + 2;
            const long long hi = static_cast<long long>(n) - 2 * static_cast<long long>(remaining);
            long long pos = static_cast<long long>(bounds[i]) + offset;
            pos = std::clamp(pos, lo, hi);
            bounds[i] = static_cast<std::size_t>(pos);
            prev = bounds[i];
        }
    }

    GeneratedSeries out;
    out.truth.cuts = bounds;
    out.series.label = spec.label;
    out.series.id = "synthetic-" + std::to_string(spec.seed);
    out.series.values.reserve(n);
    std::size_t start = 0;
    for (std::size_t i = 0; i < spec.segments.size(); ++i) {
        const std::size_t end = i < bounds.size() ? bounds[i] : n;
        const SegmentSpec& seg = spec.segments[i];
        for (std::size_t t = start; t < end; ++t) {
            out.series.values.push_back(seg.mean + seg.stddev * rng::normal(gen));
        }
        start = end;
    }
    return out;
}

ClassificationSuite make_classification_suite(std::uint64_t seed) {
    ClassificationSuite suite;
    const double class_means[2][3] = {{0.0, 4.0, 0.0}, {4.0, 0.0, 0.0}};

    for (int split = 0; split < 2; ++split) {
        auto& series_out = split == 0 ? suite.train : suite.test;
        auto& truth_out = split == 0 ? suite.train_truth : suite.test_truth;
        for (int cls = 0; cls < 2; ++cls) {
            for (std::size_t i = 0; i < 100; ++i) {
                SyntheticSpec spec;
                for (double mean : class_means[cls]) {
                    spec.segments.push_back(SegmentSpec{200, mean, 1.0});
                }
                spec.seed = rng::mix(seed, static_cast<std::uint64_t>(split * 2 + cls), i);
                spec.label = cls;
                spec.jitter = 20;
                GeneratedSeries g = generate(spec);
                g.series.id = (split == 0 ? "train-" : "test-") + std::to_string(cls) + "-" +
                              std::to_string(i);
                series_out.push_back(std::move(g.series));
                truth_out.push_back(std::move(g.truth));
            }
        }
    }
    return suite;
}

} // namespace tsc
