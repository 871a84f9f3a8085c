#include "tsc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "tsc/change_space.hpp"
#include "tsc/encoder.hpp"
#include "tsc/evaluation.hpp"
#include "tsc/ingestion.hpp"
#include "tsc/rng.hpp"
#include "tsc/tokenizer.hpp"

namespace tsc {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void emit_header(std::ostringstream& out, const std::string& command,
                 const ExperimentConfig& cfg, std::uint64_t seed) {
    out << "schema_version: 1\n";
    out << "command: " << command << "\n";
    out << "generated_at_unix: " << std::time(nullptr) << "\n";
    out << "seed: " << seed << "\n";
    out << "config:\n";
    std::istringstream lines(cfg.to_text());
    std::string line;
    while (std::getline(lines, line)) {
        out << "  " << line << "\n";
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write report " + path);
    }
    out << text;
}

std::vector<SegmentBoundaries> parse_boundary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open ground truth file " + path);
    }
    std::vector<SegmentBoundaries> out;
    std::string line;
    std::size_t line_no = 0;
    char delimiter = '\0';
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        SegmentBoundaries b;
        if (line.find_first_not_of(" \t") != std::string::npos) {
            if (delimiter == '\0') {
                delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
            }
            std::stringstream fields(line);
            std::string field;
            std::size_t col = 0;
            while (std::getline(fields, field, delimiter)) {
                ++col;
                try {
                    std::size_t used = 0;
                    const long long v = std::stoll(field, &used);
                    if (used != field.size() || v <= 0) {
                        throw std::invalid_argument(field);
                    }
                    b.cuts.push_back(static_cast<std::size_t>(v));
                } catch (const std::exception&) {
                    throw ParseError(line_no, col, "expected a positive cut index");
                }
            }
            std::sort(b.cuts.begin(), b.cuts.end());
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<TimeSeries> maybe_normalize(std::vector<TimeSeries> series,
                                        const ExperimentConfig& cfg) {
    if (cfg.normalize == "zscore") {
        for (TimeSeries& s : series) {
            s = z_normalize(s);
        }
    }
    return series;
}

struct TokenizedSplit {
    std::vector<LabeledSequence> items;
    std::vector<std::string> ids;
};

} // namespace

std::string run_segment(const SegmentOptions& opts) {
    ExperimentConfig cfg = opts.config;
    if (opts.seed) {
        cfg.train.seed = *opts.seed;
    }
    cfg.validate();

    LabelMap labels;
    bool ragged = false;
    std::vector<TimeSeries> series = parse_archive_file(opts.input_path, labels, &ragged);
    series = maybe_normalize(std::move(series), cfg);

    std::vector<SegmentBoundaries> truth;
    if (!opts.ground_truth_path.empty()) {
        truth = parse_boundary_file(opts.ground_truth_path);
        if (truth.size() != series.size()) {
            throw Error("ground truth holds " + std::to_string(truth.size()) +
                        " lines for " + std::to_string(series.size()) + " series");
        }
    }

    std::vector<SegmentBoundaries> cuts;
    cuts.reserve(series.size());
    for (const TimeSeries& s : series) {
        if (cfg.segment_count > 0) {
            cuts.push_back(segment_series(s, cfg.segment_count, cfg.change_space));
        } else {
            // unsupervised mode: every salient change point becomes a cut
            SegmentBoundaries b;
            try {
                const PeakSet peaks = find_change_points(s, cfg.change_space);
                for (const Peak& p : peaks.peaks) {
                    b.cuts.push_back(p.index);
                }
                std::sort(b.cuts.begin(), b.cuts.end());
            } catch (const NoValidScaleError&) {
                // too short for any scale: one segment
            }
            cuts.push_back(std::move(b));
        }
    }

    std::vector<double> coverings;
    if (!truth.empty()) {
        coverings.reserve(series.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            coverings.push_back(covering_score(truth[i], cuts[i], series[i].length()));
        }
    }

    std::ostringstream out;
    emit_header(out, "segment", cfg, cfg.train.seed);
    out << "input_file: " << opts.input_path << "\n";
    out << "series_count: " << series.size() << "\n";
    if (ragged) {
        out << "warning: ragged_lengths\n";
    }
    if (opts.format == "csv") {
        out << "series_csv:\n";
        out << (truth.empty() ? "id,length,cuts\n" : "id,length,cuts,covering\n");
        for (std::size_t i = 0; i < series.size(); ++i) {
            out << series[i].id << "," << series[i].length() << ",";
            for (std::size_t j = 0; j < cuts[i].cuts.size(); ++j) {
                out << (j > 0 ? " " : "") << cuts[i].cuts[j];
            }
            if (!truth.empty()) {
                out << "," << format_double(coverings[i]);
            }
            out << "\n";
        }
    } else {
        out << "series:\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            out << "  " << series[i].id << " length=" << series[i].length() << " cuts=[";
            for (std::size_t j = 0; j < cuts[i].cuts.size(); ++j) {
                out << (j > 0 ? " " : "") << cuts[i].cuts[j];
            }
            out << "]";
            if (!truth.empty()) {
                out << " covering=" << format_double(coverings[i]);
            }
            out << "\n";
        }
    }
    if (!truth.empty()) {
        std::vector<std::pair<std::string, double>> table;
        for (std::size_t i = 0; i < series.size(); ++i) {
            table.emplace_back(series[i].id, coverings[i]);
        }
        const Summary summary = summarize(std::move(table));
        out << "covering_mean: " << format_double(summary.mean) << "\n";
        out << "covering_stddev: " << format_double(summary.stddev) << "\n";
    }

    const std::string text = out.str();
    write_output(opts.output_path, text);
    return text;
}

std::string run_train(const TrainOptions& opts) {
    ExperimentConfig cfg = opts.config;
    if (opts.seed) {
        cfg.train.seed = *opts.seed;
    }
    if (opts.lambda1) {
        cfg.schedule.lambda1_pre = *opts.lambda1;
        cfg.schedule.lambda1_post = *opts.lambda1;
    }
    if (opts.lambda2) {
        cfg.schedule.lambda2_pre = *opts.lambda2;
        cfg.schedule.lambda2_post = *opts.lambda2;
    }
    cfg.validate();

    LabelMap labels;
    bool ragged = false;
    std::vector<TimeSeries> train_series = parse_archive_file(opts.train_path, labels, &ragged);
    std::vector<TimeSeries> test_series = parse_archive_file(opts.test_path, labels, &ragged);
    train_series = maybe_normalize(std::move(train_series), cfg);
    test_series = maybe_normalize(std::move(test_series), cfg);

    const int k = cfg.segment_count > 0 ? cfg.segment_count
                                        : select_segment_count(train_series, cfg.change_space);

    std::vector<SegmentBoundaries> train_cuts;
    std::vector<SegmentBoundaries> test_cuts;
    std::size_t padded = 0;
    for (const TimeSeries& s : train_series) {
        train_cuts.push_back(segment_series(s, k, cfg.change_space));
        for (const auto& [a, b] : segments_of(train_cuts.back(), s.length())) {
            padded = std::max(padded, b - a);
        }
    }
    for (const TimeSeries& s : test_series) {
        test_cuts.push_back(segment_series(s, k, cfg.change_space));
        for (const auto& [a, b] : segments_of(test_cuts.back(), s.length())) {
            padded = std::max(padded, b - a);
        }
    }

    std::vector<LabeledSequence> train_items;
    for (std::size_t i = 0; i < train_series.size(); ++i) {
        train_items.push_back(LabeledSequence{
            tokenize(train_series[i], train_cuts[i], padded), *train_series[i].label});
    }
    std::vector<LabeledSequence> test_items;
    for (std::size_t i = 0; i < test_series.size(); ++i) {
        test_items.push_back(LabeledSequence{
            tokenize(test_series[i], test_cuts[i], padded), *test_series[i].label});
    }

    // The split works on series; rebuild items by matching tokenization.
    std::vector<std::size_t> order(train_items.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::vector<TimeSeries> tagged = train_series;
    for (std::size_t i = 0; i < tagged.size(); ++i) {
        tagged[i].id = std::to_string(i);
    }
    const auto [fit_series, val_series] = train_val_split(tagged, cfg.val_fraction, cfg.train.seed);
    std::vector<LabeledSequence> fit_items;
    std::vector<LabeledSequence> val_items;
    for (const TimeSeries& s : fit_series) {
        fit_items.push_back(train_items[static_cast<std::size_t>(std::stoll(s.id))]);
    }
    for (const TimeSeries& s : val_series) {
        val_items.push_back(train_items[static_cast<std::size_t>(std::stoll(s.id))]);
    }

    const TrainResult result = train(fit_items, val_items, cfg.train, cfg.schedule);

    std::vector<int> predictions;
    std::vector<int> truth_labels;
    for (const LabeledSequence& item : test_items) {
        predictions.push_back(classify(result.params, item.sequence).label);
        truth_labels.push_back(item.label);
    }
    const double test_accuracy = accuracy(predictions, truth_labels);

    // Nearest-centroid probe over the dense features; the evaluation route
    // when the classifier head is untrained (lambda2 = 0).
    const std::size_t classes = result.params.classes;
    std::vector<Vector> centroids(classes, Vector(2 * result.params.hidden, 0.0));
    std::vector<std::size_t> counts(classes, 0);
    for (const LabeledSequence& item : fit_items) {
        const EncoderOutput eo = forward_features(result.params, item.sequence);
        auto& c = centroids[static_cast<std::size_t>(item.label)];
        for (std::size_t j = 0; j < c.size(); ++j) {
            c[j] += eo.feature[j];
        }
        counts[static_cast<std::size_t>(item.label)] += 1;
    }
    for (std::size_t cls = 0; cls < classes; ++cls) {
        if (counts[cls] > 0) {
            for (double& v : centroids[cls]) {
                v /= static_cast<double>(counts[cls]);
            }
        }
    }
    std::vector<int> probe_predictions;
    for (const LabeledSequence& item : test_items) {
        const EncoderOutput eo = forward_features(result.params, item.sequence);
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t cls = 0; cls < classes; ++cls) {
            double dist = 0.0;
            for (std::size_t j = 0; j < eo.feature.size(); ++j) {
                const double d = eo.feature[j] - centroids[cls][j];
                dist += d * d;
            }
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(cls);
            }
        }
        probe_predictions.push_back(best);
    }
    const double probe_accuracy = accuracy(probe_predictions, truth_labels);

    if (!opts.checkpoint_path.empty()) {
        save_checkpoint(opts.checkpoint_path, result.params, cfg.train);
    }

    std::ostringstream out;
    emit_header(out, "train", cfg, cfg.train.seed);
    out << "train_file: " << opts.train_path << "\n";
    out << "test_file: " << opts.test_path << "\n";
    out << "train_series: " << train_series.size() << "\n";
    out << "test_series: " << test_series.size() << "\n";
    out << "classes: " << classes << "\n";
    out << "segment_count: " << k << "\n";
    out << "padded_length: " << padded << "\n";
    out << "parameter_count: " << result.params.parameter_count() << "\n";
    out << "epochs:\n";
    if (opts.format == "csv") {
        out << "epoch,mae,ce,total,val_total,lambda1,lambda2\n";
        for (const TrainLogEntry& e : result.log) {
            out << e.epoch << "," << format_double(e.mae) << "," << format_double(e.ce) << ","
                << format_double(e.total) << "," << format_double(e.val_total) << ","
                << format_double(e.lambda1) << "," << format_double(e.lambda2) << "\n";
        }
    } else {
        for (const TrainLogEntry& e : result.log) {
            out << "  epoch=" << e.epoch << " mae=" << format_double(e.mae)
                << " ce=" << format_double(e.ce) << " total=" << format_double(e.total)
                << " val_total=" << format_double(e.val_total)
                << " lambda1=" << format_double(e.lambda1)
                << " lambda2=" << format_double(e.lambda2) << "\n";
        }
    }
    out << "best_epoch: " << result.best_epoch << "\n";
    out << "best_val_total: " << format_double(result.best_val) << "\n";
    out << "test_accuracy: " << format_double(test_accuracy) << "\n";
    out << "probe_accuracy: " << format_double(probe_accuracy) << "\n";
    if (!opts.checkpoint_path.empty()) {
        out << "checkpoint: " << opts.checkpoint_path << "\n";
    }

    const std::string text = out.str();
    write_output(opts.output_path, text);
    return text;
}

std::string run_bench(const BenchOptions& opts) {
    ExperimentConfig cfg = opts.config;
    if (opts.seed) {
        cfg.train.seed = *opts.seed;
    }
    cfg.validate();
    if (opts.length < 2 * static_cast<std::size_t>(cfg.change_space.scale_min)) {
        throw Error("bench length must be at least twice scale_min");
    }

    TimeSeries s;
    s.id = "bench";
    s.values.reserve(opts.length);
    std::mt19937_64 gen(cfg.train.seed);
    for (std::size_t i = 0; i < opts.length; ++i) {
        s.values.push_back(rng::normal(gen));
    }

    std::vector<double> times_ms;
    times_ms.reserve(opts.repetitions);
    double sink = 0.0;
    for (std::size_t rep = 0; rep < opts.repetitions; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        const ChangeCurve curve = ms_tscs_curve(s, cfg.change_space);
        const auto stop = std::chrono::steady_clock::now();
        sink += curve.scores[curve.support_lo];
        times_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
    std::vector<double> sorted = times_ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median =
        sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

    std::ostringstream out;
    emit_header(out, "bench", cfg, cfg.train.seed);
    out << "length: " << opts.length << "\n";
    out << "repetitions: " << opts.repetitions << "\n";
    out << "median_ms: " << format_double(median) << "\n";
    out << "min_ms: " << format_double(sorted.front()) << "\n";
    out << "max_ms: " << format_double(sorted.back()) << "\n";
    out << "checksum: " << format_double(sink) << "\n";

    const std::string text = out.str();
    write_output(opts.output_path, text);
    return text;
}

} // namespace tsc
