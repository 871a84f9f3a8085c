#pragma once

#include <map>
#include <string>

#include "tsc/encoder.hpp"
#include "tsc/types.hpp"

namespace tsc {

/// Flat `key = value` text with `#` comments, one entry per line.
struct KeyValueFile {
    std::map<std::string, std::string> entries;

    static KeyValueFile parse_text(const std::string& text);
    static KeyValueFile parse_file(const std::string& path);
};

/// Every tunable of one experiment, addressable from a single flat file.
struct ExperimentConfig {
    ChangeSpaceConfig change_space;
    TrainConfig train;
    LossSchedule schedule;
    double val_fraction = 0.05;
    std::string normalize = "zscore"; // zscore | none
    int segment_count = 0;            // 0 = derive from the training set

    static ExperimentConfig from_kv(const KeyValueFile& kv); // ConfigError on unknown keys
    static ExperimentConfig defaults() { return ExperimentConfig{}; }

    /// Full resolved configuration, one sorted `key = value` per line.
    /// Parsing this text back yields an identical configuration.
    std::string to_text() const;

    void validate() const;
};

} // namespace tsc
