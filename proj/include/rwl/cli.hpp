#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rwl/config.hpp"
#include "rwl/experiments.hpp"

namespace rwl::cli {

using Runner = std::function<ExperimentReport(const RunConfig&)>;

struct Command {
    std::string_view name;
    std::string_view summary;
    Runner run;
};

inline const std::vector<Command>& commands() {
    static const std::vector<Command> table = {
        {"simulate", "nonlinear evolution, snapshot CSV", run_simulate},
        {"linear", "free evolution through the d'Alembert profile", run_linear},
        {"stationary", "singular stationary solutions, both signs", run_stationary_suite},
        {"channel", "exterior channel dichotomy over seeded data", run_channel},
        {"huygens", "free-wave concentration near the light cone", run_huygens},
        {"conservation", "almost-conservation of E_m", run_conservation},
        {"smalldata", "nonlinear correction rate for small data", run_smalldata_rate},
        {"exterior-decay", "decay of the weighted exterior energy", run_exterior_decay},
        {"blowup-ode", "focusing plateau against the ODE blow-up", run_blowup_ode},
        {"hardy", "Hardy-type inequalities over seeded functions", run_hardy},
        {"operators", "T_R and indicator bounds, continuity in R", run_operator_bounds},
        {"norms", "norm table of the configured data", run_norms},
    };
    return table;
}

inline const Command* find_command(std::string_view name) {
    for (const auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

inline std::string usage() {
    std::string out = "usage: rwl <command> [--config PATH] [--out DIR] [--seed U64] [--threads N] [--quiet]\n\ncommands:\n";
    for (const auto& c : commands()) {
        std::string name(c.name);
        name.resize(16, ' ');
        out += "  " + name + std::string(c.summary) + "\n";
    }
    out += "  all             full acceptance suite\n";
    return out;
}

/// Built-in configuration of each command; a config file overrides it key by key.
inline RunConfig default_config(std::string_view command) {
    RunConfig cfg;
    cfg.command = std::string(command);
    cfg.data.family = Family::gaussian;
    if (command == "simulate") {
        cfg.iota = Sign::defocusing;
        cfg.data.amplitude = 0.5;
        cfg.grid.record_stride = 10;
        cfg.experiment.R = {1.0};
    } else if (command == "linear") {
        cfg.experiment.R = {1.0};
    } else if (command == "channel") {
        cfg.data.family = Family::bump_sum;
        cfg.experiment.R = {0.5};
        cfg.experiment.trials = 100;
    } else if (command == "huygens") {
        cfg.data.family = Family::bump_sum;
        cfg.grid.r_max = 48.0;
        cfg.grid.n = 4800;
    } else if (command == "smalldata") {
        cfg.grid.r_max = 12.0;
        cfg.grid.n = 1200;
        cfg.grid.t_end = 5.0;
    } else if (command == "exterior-decay") {
        cfg.iota = Sign::defocusing;
        cfg.data.amplitude = 0.5;
        cfg.grid.r_max = 20.0;
        cfg.grid.n = 2000;
        cfg.grid.record_stride = 10;
    } else if (command == "blowup-ode") {
        cfg.data.family = Family::plateau;
        cfg.grid.r_max = 4.0;
        cfg.grid.n = 4000;
        cfg.grid.t_end = 1.0;
    } else if (command == "hardy") {
        cfg.grid.r_max = 8.0;
        cfg.grid.n = 65536;
        cfg.experiment.trials = 50;
    } else if (command == "operators") {
        cfg.grid.n = 8192;
        cfg.experiment.trials = 30;
    }
    return cfg;
}

/// The configurations run by `all`.
inline std::vector<RunConfig> suite(std::uint64_t seed) {
    std::vector<RunConfig> out;
    for (const auto& c : commands()) {
        RunConfig cfg = default_config(c.name);
        cfg.experiment.seed = seed;
        out.push_back(cfg);
        if (c.name == "conservation") {
            cfg.p = 9.0;
            out.push_back(cfg);
        }
    }
    return out;
}

enum ExitCode : int { ok = 0, failed = 1, config_error = 2, numerical_error = 3 };

inline int exit_code_for(const Error& e) {
    return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError ? config_error : numerical_error;
}

struct Options {
    std::string command;
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool quiet = false;
};

inline unsigned thread_count(const Options& opt) {
    if (opt.threads) return std::max(1u, *opt.threads);
    if (const char* env = std::getenv("RWL_THREADS")) {
        unsigned n = 0;
        const std::string_view s(env);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        require(ec == std::errc() && p == s.data() + s.size() && n > 0, ErrorCode::ConfigError,
                "RWL_THREADS must be a positive integer");
        return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline void apply_overrides(RunConfig& cfg, const Options& opt) {
    if (opt.out) cfg.output.directory = *opt.out;
    if (opt.seed) {
        cfg.experiment.seed = *opt.seed;
        cfg.data.seed = *opt.seed;
    }
}

inline void emit(const ExperimentReport& report, const RunConfig& cfg) {
    write_report(report, cfg.output.directory, cfg.output.wants("json"), cfg.output.wants("csv"));
}

inline int run_single(const Command& command, const Options& opt, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = default_config(command.name);
        if (opt.config) cfg = load_config(*opt.config, cfg);
        cfg.command = std::string(command.name);
        apply_overrides(cfg, opt);
        const ExperimentReport report = command.run(cfg);
        emit(report, cfg);
        if (!opt.quiet)
            out << (report.pass ? "PASS " : "FAIL ") << report.name << " -> "
                << (std::filesystem::path(cfg.output.directory) / (report.name + ".json")).string() << "\n";
        return report.pass ? ok : failed;
    } catch (const Error& e) {
        err << "rwl " << command.name << ": " << e.what() << "\n";
        return exit_code_for(e);
    }
}

inline int run_all(const Options& opt, std::ostream& out, std::ostream& err) {
    if (opt.config) {
        err << "rwl all: --config is not accepted; the suite uses built-in configurations\n";
        return config_error;
    }
    if (!opt.seed) {
        err << "rwl all: --seed is required (the suite contains randomized experiments)\n";
        return config_error;
    }
    unsigned threads = 1;
    try {
        threads = thread_count(opt);
    } catch (const Error& e) {
        err << "rwl all: " << e.what() << "\n";
        return config_error;
    }
    std::vector<RunConfig> configs = suite(*opt.seed);
    for (auto& cfg : configs) {
        if (opt.out) cfg.output.directory = *opt.out;
        cfg.data.seed = *opt.seed;
    }

    std::vector<int> codes(configs.size(), ok);
    std::atomic<std::size_t> next{0};
    std::mutex io;
    auto worker = [&]() {
        for (std::size_t k = next++; k < configs.size(); k = next++) {
            const RunConfig& cfg = configs[k];
            std::string line;
            try {
                const ExperimentReport report = find_command(cfg.command)->run(cfg);
                emit(report, cfg);
                codes[k] = report.pass ? ok : failed;
                line = std::string(report.pass ? "PASS " : "FAIL ") + report.name;
            } catch (const Error& e) {
                codes[k] = exit_code_for(e);
                line = "ERROR " + cfg.command + ": " + e.what();
            }
            std::lock_guard lock(io);
            if (!opt.quiet || codes[k] != ok) (codes[k] == ok ? out : err) << line << std::endl;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::min<std::size_t>(threads, configs.size()); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return *std::max_element(codes.begin(), codes.end());
}

/// Parses argv and runs one command; returns the process exit code.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"radial wave lab"};
    Options opt;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string config, dir;
    app.add_option("command", opt.command, "command to run")->required();
    auto* config_opt = app.add_option("--config", config, "config file");
    auto* out_opt = app.add_option("--out", dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized experiments");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads for `all`")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", opt.quiet, "suppress progress lines");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << usage();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "rwl: " << e.what() << "\n" << usage();
        return config_error;
    }
    if (*config_opt) opt.config = config;
    if (*out_opt) opt.out = dir;
    if (*seed_opt) opt.seed = seed;
    if (*threads_opt) opt.threads = threads;

    if (opt.command == "all") return run_all(opt, out, err);
    const Command* command = find_command(opt.command);
    if (command == nullptr) {
        err << "rwl: unknown command '" << opt.command << "'\n" << usage();
        return config_error;
    }
    return run_single(*command, opt, out, err);
}

} // namespace rwl::cli
