#include "tsc/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsc/rng.hpp"

namespace tsc {

namespace {

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, delimiter)) {
        fields.push_back(field);
    }
    return fields;
}

bool parse_int(const std::string& text, int& out) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size()) {
            return false;
        }
        out = v;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_double(const std::string& text, double& out) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            return false;
        }
        out = v;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

int LabelMap::intern(int raw) {
    const auto it = raw_to_id.find(raw);
    if (it != raw_to_id.end()) {
        return it->second;
    }
    const int id = static_cast<int>(id_to_raw.size());
    raw_to_id.emplace(raw, id);
    id_to_raw.push_back(raw);
    return id;
}

std::vector<TimeSeries> parse_archive_text(const std::string& text, LabelMap& labels,
                                           bool* ragged) {
    std::vector<TimeSeries> out;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    char delimiter = '\0';
    std::size_t first_length = 0;

    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue; // blank
        }
        if (delimiter == '\0') {
            delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
        }
        const auto fields = split_fields(line, delimiter);
        if (fields.size() < 2) {
            throw ParseError(line_no, fields.size(), "expected a label and at least one sample");
        }
        int raw_label = 0;
        if (!parse_int(fields[0], raw_label)) {
            throw ParseError(line_no, 1, "non-numeric label");
        }
        TimeSeries s;
        s.label = labels.intern(raw_label);
        s.id = "line-" + std::to_string(line_no);
        s.values.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            double v = 0.0;
            if (!parse_double(fields[i], v)) {
                throw ParseError(line_no, i + 1, "non-numeric sample");
            }
            s.values.push_back(v);
        }
        if (out.empty()) {
            first_length = s.values.size();
        } else if (s.values.size() != first_length && ragged != nullptr) {
            *ragged = true;
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) {
        throw EmptyInputError("archive holds no series");
    }
    return out;
}

std::vector<TimeSeries> parse_archive_file(const std::string& path, LabelMap& labels,
                                           bool* ragged) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_archive_text(buffer.str(), labels, ragged);
}

Dataset parse_archive_file(const std::string& path) {
    Dataset ds;
    ds.series = parse_archive_file(path, ds.labels, &ds.ragged_lengths);
    return ds;
}

std::string to_archive_text(const std::vector<TimeSeries>& series, const LabelMap* labels,
                            char delimiter) {
    std::string out;
    for (const TimeSeries& s : series) {
        int label = s.label.value_or(0);
        if (labels != nullptr && label >= 0 &&
            static_cast<std::size_t>(label) < labels->id_to_raw.size()) {
            label = labels->id_to_raw[static_cast<std::size_t>(label)];
        }
        out += std::to_string(label);
        for (double v : s.values) {
            out += delimiter;
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

void write_archive_file(const std::string& path, const std::vector<TimeSeries>& series,
                        const LabelMap* labels, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << to_archive_text(series, labels, delimiter);
}

TimeSeries z_normalize(const TimeSeries& s) {
    TimeSeries out = s;
    const double n = static_cast<double>(s.values.size());
    if (s.values.empty()) {
        return out;
    }
    double mean = 0.0;
    for (double v : s.values) {
        mean += v;
    }
    mean /= n;
    double var = 0.0;
    for (double v : s.values) {
        const double d = v - mean;
        var += d * d;
    }
    var /= n;
    if (var <= 0.0) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        return out;
    }
    const double inv_std = 1.0 / std::sqrt(var);
    for (double& v : out.values) {
        v = (v - mean) * inv_std;
    }
    return out;
}

std::pair<std::vector<TimeSeries>, std::vector<TimeSeries>> train_val_split(
    const std::vector<TimeSeries>& train, double fraction, std::uint64_t seed) {
    if (train.size() < 2) {
        throw TooFewSeriesError("need at least 2 series to split");
    }
    if (fraction <= 0.0 || fraction >= 1.0) {
        throw InvalidArgumentError("validation fraction must lie in (0, 1)");
    }
    const std::size_t n = train.size();
    std::size_t val_total = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
    val_total = std::min(val_total, n - 1);

    // Group indices by class; unlabeled series form their own stratum.
    std::map<int, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < n; ++i) {
        strata[train[i].label.value_or(-1)].push_back(i);
    }

    // Proportional allocation with largest remainders.
    std::vector<std::pair<int, double>> remainders;
    std::map<int, std::size_t> take;
    std::size_t assigned = 0;
    for (const auto& [label, idx] : strata) {
        const double exact = fraction == 0.0
                                 ? 0.0
                                 : static_cast<double>(val_total) *
                                       static_cast<double>(idx.size()) / static_cast<double>(n);
        auto base = static_cast<std::size_t>(exact);
        base = std::min(base, idx.size() - 1 > 0 ? idx.size() - 1 : std::size_t{0});
        take[label] = base;
        assigned += base;
        remainders.emplace_back(label, exact - static_cast<double>(base));
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    for (const auto& [label, rem] : remainders) {
        if (assigned >= val_total) {
            break;
        }
        // leave at least one training series per class where possible
        if (take[label] + 1 < strata[label].size() || strata.size() == 1) {
            take[label] += 1;
            ++assigned;
        }
    }
    // If class minima blocked the quota, fill from the largest strata.
    for (auto& [label, idx] : strata) {
        while (assigned < val_total && take[label] + 1 <= idx.size()) {
            take[label] += 1;
            ++assigned;
        }
    }

    std::vector<bool> to_val(n, false);
    for (auto& [label, idx] : strata) {
        std::mt19937_64 gen(rng::mix(seed, static_cast<std::uint64_t>(label) + 0x517cc1b7ull));
        rng::shuffle(gen, idx);
        for (std::size_t i = 0; i < take[label]; ++i) {
            to_val[idx[i]] = true;
        }
    }

    std::pair<std::vector<TimeSeries>, std::vector<TimeSeries>> out;
    for (std::size_t i = 0; i < n; ++i) {
        (to_val[i] ? out.second : out.first).push_back(train[i]);
    }
    return out;
}

} // namespace tsc
