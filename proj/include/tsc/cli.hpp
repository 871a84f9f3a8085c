#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tsc/config.hpp"

namespace tsc {

struct SegmentOptions {
    std::string input_path;
    std::string ground_truth_path; // optional
    std::string output_path;       // optional; reports always go to the returned string
    std::string format = "text";   // text | csv (per-series table)
    ExperimentConfig config;
    std::optional<std::uint64_t> seed;
};

struct TrainOptions {
    std::string train_path;
    std::string test_path;
    std::string checkpoint_path; // optional
    std::string output_path;     // optional
    std::string format = "text";
    ExperimentConfig config;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda1; // overrides both phases
    std::optional<double> lambda2;
};

struct BenchOptions {
    std::size_t length = 1000;
    std::size_t repetitions = 20;
    std::string output_path;
    ExperimentConfig config;
    std::optional<std::uint64_t> seed;
};

/// Segments every series of the input archive; with a ground-truth boundary
/// file, also reports per-series and mean/stddev covering.
std::string run_segment(const SegmentOptions& opts);

/// Full pipeline: segment-count selection, tokenization, scheduled training,
/// checkpointing and test evaluation.
std::string run_train(const TrainOptions& opts);

/// Median wall time of the multi-scale curve kernel on a seeded random
/// series, single-threaded.
std::string run_bench(const BenchOptions& opts);

} // namespace tsc
