// Command-line harness: run experiments from config files and print defaults.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ktd/error.hpp"
#include "ktd/experiments.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr const char* kOutputDirEnv = "KTD_OUTPUT_DIR";

struct RunOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    long long seed = -1;
    long long trials = -1;
    std::string out;
};

ktd::Config build_config(const RunOptions& opt) {
    ktd::Config user = ktd::Config::load(opt.config_path);
    for (const auto& kv : opt.overrides) user.assign(kv);
    if (opt.seed >= 0) user.set("seed", static_cast<double>(opt.seed));
    if (opt.trials >= 0) user.set("trials", static_cast<double>(opt.trials));
    if (!opt.out.empty()) user.set("output", opt.out);

    ktd::Config config = ktd::resolve_config(user);
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
        const std::string output = config.text("output");
        if (output != "none") {
            config.set("output", (std::filesystem::path(dir) / std::filesystem::path(output).filename()).string());
        }
    }
    return config;
}

int run(const RunOptions& opt) {
    ktd::Config config;
    try {
        config = build_config(opt);
    } catch (const ktd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    const ktd::ExperimentResult result = ktd::run_experiment(config);
    const auto& series = result.series;
    const ktd::Vector mean = series.mean();
    const ktd::Vector se = series.standard_error();
    const ktd::Index last = series.checkpoint_count() - 1;
    std::printf("experiment %s, algorithm %s, %lld trial(s)\n", config.text("experiment").c_str(),
                config.text("algorithm").c_str(), static_cast<long long>(series.trial_count()));
    if (last >= 0) {
        std::printf("checkpoint %lld: mean %.6g, stderr %.3g\n", series.checkpoints().back(), mean(last), se(last));
    }
    if (result.audit.checks > 0) {
        std::printf("covariance audit: %llu checks, max asymmetry %.3g, min eigenvalue %.3g%s\n",
                    static_cast<unsigned long long>(result.audit.checks), result.audit.max_asymmetry,
                    result.audit.min_eigenvalue, result.audit.passes() ? "" : "  [VIOLATION]");
    }
    if (!result.output_path.empty()) std::printf("wrote %s\n", result.output_path.c_str());
    return result.audit.passes() ? 0 : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kalman temporal-difference experiments"};
    app.require_subcommand(1);

    RunOptions opt;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a config file");
    run_cmd->add_option("config", opt.config_path, "Config file (key = value lines)")->required();
    run_cmd->add_option("--seed", opt.seed, "Base seed; trial t uses seed + t")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--trials", opt.trials, "Number of trials")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", opt.out, "Output CSV path (\"none\" to skip)");
    run_cmd->add_option("--set", opt.overrides, "Override a config entry, key=value (repeatable)");

    auto* list_cmd = app.add_subcommand("list-experiments", "List experiments and their algorithms");

    std::string experiment;
    auto* defaults_cmd = app.add_subcommand("print-defaults", "Print the default config of an experiment");
    defaults_cmd->add_option("experiment", experiment, "Experiment name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run_cmd) return run(opt);
        if (*list_cmd) {
            for (const auto& info : ktd::experiments()) {
                std::string algorithms;
                for (const auto& a : info.algorithms) algorithms += (algorithms.empty() ? "" : ",") + a;
                std::printf("%-16s %-44s %s\n", info.name.c_str(), algorithms.c_str(), info.description.c_str());
            }
            return 0;
        }
        if (*defaults_cmd) {
            std::cout << ktd::default_config(experiment).to_text();
            return 0;
        }
    } catch (const ktd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return 0;
}
