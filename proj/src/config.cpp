#include "tsc/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tsc {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct KvReader {
    std::map<std::string, std::string> entries;

    bool take(const std::string& key, std::string& out) {
        const auto it = entries.find(key);
        if (it == entries.end()) {
            return false;
        }
        out = it->second;
        entries.erase(it);
        return true;
    }

    void take_double(const std::string& key, double& out) {
        std::string raw;
        if (!take(key, raw)) {
            return;
        }
        try {
            std::size_t used = 0;
            out = std::stod(raw, &used);
            if (used != raw.size()) {
                throw std::invalid_argument(raw);
            }
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' needs a numeric value, got '" + raw + "'");
        }
    }

    template <class Int>
    void take_int(const std::string& key, Int& out) {
        std::string raw;
        if (!take(key, raw)) {
            return;
        }
        try {
            std::size_t used = 0;
            const long long v = std::stoll(raw, &used);
            if (used != raw.size()) {
                throw std::invalid_argument(raw);
            }
            out = static_cast<Int>(v);
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' needs an integer value, got '" + raw + "'");
        }
    }
};

} // namespace

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
    KeyValueFile kv;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        kv.entries[key] = value;
    }
    return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueFile& kv) {
    ExperimentConfig cfg;
    KvReader r{kv.entries};

    r.take_int("scale_min", cfg.change_space.scale_min);
    r.take_int("scale_max", cfg.change_space.scale_max);
    r.take_int("scale_step", cfg.change_space.scale_step);
    r.take_double("penalty_weight", cfg.change_space.penalty_weight);
    r.take_double("variance_floor", cfg.change_space.variance_floor);
    r.take_int("smoothing_window", cfg.change_space.smoothing_window);
    r.take_int("saliency_window", cfg.change_space.saliency_window);
    r.take_double("saliency_sigma", cfg.change_space.saliency_sigma);

    r.take_int("max_epochs", cfg.train.max_epochs);
    r.take_int("patience", cfg.train.patience);
    r.take_double("learning_rate", cfg.train.learning_rate);
    r.take_double("beta1", cfg.train.beta1);
    r.take_double("beta2", cfg.train.beta2);
    r.take_double("adam_eps", cfg.train.adam_eps);
    r.take_double("grad_clip", cfg.train.grad_clip);
    r.take_int("batch_size", cfg.train.batch_size);
    r.take_int("seed", cfg.train.seed);
    r.take_double("mask_ratio", cfg.train.mask_ratio);

    r.take_int("phase_boundary", cfg.schedule.phase_boundary);
    r.take_double("lambda1_pre", cfg.schedule.lambda1_pre);
    r.take_double("lambda2_pre", cfg.schedule.lambda2_pre);
    r.take_double("lambda1_post", cfg.schedule.lambda1_post);
    r.take_double("lambda2_post", cfg.schedule.lambda2_post);

    r.take_double("val_fraction", cfg.val_fraction);
    r.take("normalize", cfg.normalize);
    r.take_int("k", cfg.segment_count);

    if (!r.entries.empty()) {
        throw ConfigError("unknown config key '" + r.entries.begin()->first + "'");
    }
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "adam_eps = " << format_double(train.adam_eps) << "\n";
    out << "batch_size = " << train.batch_size << "\n";
    out << "beta1 = " << format_double(train.beta1) << "\n";
    out << "beta2 = " << format_double(train.beta2) << "\n";
    out << "grad_clip = " << format_double(train.grad_clip) << "\n";
    out << "k = " << segment_count << "\n";
    out << "lambda1_post = " << format_double(schedule.lambda1_post) << "\n";
    out << "lambda1_pre = " << format_double(schedule.lambda1_pre) << "\n";
    out << "lambda2_post = " << format_double(schedule.lambda2_post) << "\n";
    out << "lambda2_pre = " << format_double(schedule.lambda2_pre) << "\n";
    out << "learning_rate = " << format_double(train.learning_rate) << "\n";
    out << "mask_ratio = " << format_double(train.mask_ratio) << "\n";
    out << "max_epochs = " << train.max_epochs << "\n";
    out << "normalize = " << normalize << "\n";
    out << "patience = " << train.patience << "\n";
    out << "penalty_weight = " << format_double(change_space.penalty_weight) << "\n";
    out << "phase_boundary = " << schedule.phase_boundary << "\n";
    out << "saliency_sigma = " << format_double(change_space.saliency_sigma) << "\n";
    out << "saliency_window = " << change_space.saliency_window << "\n";
    out << "scale_max = " << change_space.scale_max << "\n";
    out << "scale_min = " << change_space.scale_min << "\n";
    out << "scale_step = " << change_space.scale_step << "\n";
    out << "seed = " << train.seed << "\n";
    out << "smoothing_window = " << change_space.smoothing_window << "\n";
    out << "val_fraction = " << format_double(val_fraction) << "\n";
    out << "variance_floor = " << format_double(change_space.variance_floor) << "\n";
    return out.str();
}

void ExperimentConfig::validate() const {
    try {
        change_space.validate();
        train.validate();
    } catch (const InvalidArgumentError& e) {
        throw ConfigError(e.what());
    }
    if (schedule.lambda1_pre < 0.0 || schedule.lambda2_pre < 0.0 ||
        schedule.lambda1_post < 0.0 || schedule.lambda2_post < 0.0) {
        throw ConfigError("loss weights must be non-negative");
    }
    if (val_fraction <= 0.0 || val_fraction >= 1.0) {
        throw ConfigError("val_fraction must lie in (0, 1)");
    }
    if (normalize != "zscore" && normalize != "none") {
        throw ConfigError("normalize must be 'zscore' or 'none'");
    }
    if (segment_count != 0 && (segment_count < 2 || segment_count > 50)) {
        throw ConfigError("k must be 0 (auto) or lie in [2, 50]");
    }
}

} // namespace tsc
