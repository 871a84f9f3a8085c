#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tsc/cli.hpp"

namespace {

// 0 success, 2 input error, 3 config error, 4 training divergence
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitDiverged = 4;

tsc::ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) {
        return tsc::ExperimentConfig::defaults();
    }
    return tsc::ExperimentConfig::from_kv(tsc::KeyValueFile::parse_file(path));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-scale change-space segmentation and compositional encoding "
                 "for univariate time series"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "text";
    app.add_option("--config", config_path, "Flat key = value configuration file")
        ->capture_default_str();
    app.add_option("--seed", seed, "Seed for every random choice");
    app.add_option("--out", out_path, "Write the report to this path");
    app.add_option("--format", format, "Report table format: text or csv")
        ->check(CLI::IsMember({"text", "csv"}));

    auto* segment = app.add_subcommand("segment", "Segment each series of an archive");
    std::string input_path;
    std::string gt_path;
    int k_override = 0;
    std::string normalize_override;
    segment->add_option("--input", input_path, "Input archive (label + samples per line)")
        ->required();
    segment->add_option("--gt", gt_path, "Ground-truth boundary file (cut indices per line)");
    segment->add_option("--k", k_override, "Fixed segment count instead of salient peaks");
    segment->add_option("--normalize", normalize_override, "zscore or none")
        ->check(CLI::IsMember({"zscore", "none"}));

    auto* train = app.add_subcommand("train", "Train the encoder on an archive pair");
    std::string train_path;
    std::string test_path;
    std::string checkpoint_path;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    train->add_option("--train", train_path, "Training archive")->required();
    train->add_option("--test", test_path, "Test archive")->required();
    train->add_option("--checkpoint", checkpoint_path, "Write the trained model here");
    train->add_option("--k", k_override, "Fixed segment count instead of the dataset policy");
    train->add_option("--lambda1", lambda1, "Reconstruction weight for both phases");
    train->add_option("--lambda2", lambda2, "Classification weight for both phases");
    train->add_option("--normalize", normalize_override, "zscore or none")
        ->check(CLI::IsMember({"zscore", "none"}));

    auto* bench = app.add_subcommand("bench", "Time the change-space kernel");
    std::size_t length = 1000;
    std::size_t repetitions = 20;
    bench->add_option("--length", length, "Series length")->capture_default_str();
    bench->add_option("--reps", repetitions, "Repetitions for the median")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        tsc::ExperimentConfig cfg = load_config(config_path);
        if (k_override != 0) {
            cfg.segment_count = k_override;
            cfg.validate();
        }
        if (!normalize_override.empty()) {
            cfg.normalize = normalize_override;
        }

        std::string report;
        if (segment->parsed()) {
            tsc::SegmentOptions opts;
            opts.input_path = input_path;
            opts.ground_truth_path = gt_path;
            opts.output_path = out_path;
            opts.format = format;
            opts.config = cfg;
            opts.seed = seed;
            report = tsc::run_segment(opts);
        } else if (train->parsed()) {
            tsc::TrainOptions opts;
            opts.train_path = train_path;
            opts.test_path = test_path;
            opts.checkpoint_path = checkpoint_path;
            opts.output_path = out_path;
            opts.format = format;
            opts.config = cfg;
            opts.seed = seed;
            opts.lambda1 = lambda1;
            opts.lambda2 = lambda2;
            report = tsc::run_train(opts);
        } else {
            tsc::BenchOptions opts;
            opts.length = length;
            opts.repetitions = repetitions;
            opts.output_path = out_path;
            opts.config = cfg;
            opts.seed = seed;
            report = tsc::run_bench(opts);
        }
        std::cout << report;
        return 0;
    } catch (const tsc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const tsc::NonFiniteGradientError& e) {
        std::cerr << "training diverged: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const tsc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
