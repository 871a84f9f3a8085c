#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tsc/types.hpp"

namespace tsc {

/// Remaps raw archive labels to contiguous ids in first-appearance order.
struct LabelMap {
    std::map<int, int> raw_to_id;
    std::vector<int> id_to_raw;

    int intern(int raw);
    std::size_t class_count() const { return id_to_raw.size(); }
};

struct Dataset {
    std::vector<TimeSeries> series;
    LabelMap labels;
    bool ragged_lengths = false; // recorded, not an error
};

/// Reads a delimiter-separated archive: one series per line, integer class
/// label first, then the samples. Tab or comma is auto-detected from the
/// first non-blank line; blank lines are skipped.
Dataset parse_archive_file(const std::string& path);

/// Same, but interning labels into an existing map (shared across splits).
std::vector<TimeSeries> parse_archive_file(const std::string& path, LabelMap& labels,
                                           bool* ragged = nullptr);

/// Parses archive-format content from memory.
std::vector<TimeSeries> parse_archive_text(const std::string& text, LabelMap& labels,
                                           bool* ragged = nullptr);

/// Re-emits series in the archive grammar (raw labels when a map is given).
std::string to_archive_text(const std::vector<TimeSeries>& series,
                            const LabelMap* labels = nullptr, char delimiter = '\t');
void write_archive_file(const std::string& path, const std::vector<TimeSeries>& series,
                        const LabelMap* labels = nullptr, char delimiter = '\t');

/// (x - mean) / population stddev; a constant series maps to all zeros.
TimeSeries z_normalize(const TimeSeries& s);

/// Deterministic stratified split. The validation side receives
/// max(1, round(fraction * n)) series, spread over classes proportionally
/// where class sizes permit.
std::pair<std::vector<TimeSeries>, std::vector<TimeSeries>> train_val_split(
    const std::vector<TimeSeries>& train, double fraction, std::uint64_t seed);

} // namespace tsc
