// qme — scenario-driven master-equation solver CLI.
//
//   qme run <config|name> [--check] [--seed N] [--out DIR]
//   qme validate <config|name> [--seed N]
//   qme list
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 --check predicate failure.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qme/scenario.hpp"

namespace {

int run_command(const std::string& config_arg, bool check, std::optional<std::uint64_t> seed,
                const std::string& out_dir) {
    const auto config = qme::scenario::load_config(config_arg);
    qme::scenario::RunOptions opts;
    opts.seed = seed;
    opts.out_dir = out_dir;
    opts.check = check;
    const auto report = qme::scenario::run(config, opts);
    for (const auto& path : report.outputs_written)
        std::printf("wrote %s\n", path.c_str());
    std::printf("wrote %s\n", report.manifest_path.c_str());
    if (check) {
        std::printf("check: %s (%s)\n", report.check_passed ? "PASS" : "FAIL",
                    report.check_message.c_str());
        if (!report.check_passed) return 4;
    }
    return 0;
}

int validate_command(const std::string& config_arg, std::optional<std::uint64_t> seed) {
    const auto config = qme::scenario::load_config(config_arg);
    const auto scenario = qme::scenario::parse(config);
    qme::scenario::validate(scenario, seed);
    std::printf("valid: %s\n", scenario.name.c_str());
    return 0;
}

int list_command() {
    for (const auto& name : qme::scenario::bundled_names())
        std::printf("%s\n", name.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qme — open quantum system dynamics via density-operator master equations"};
    app.require_subcommand(1);

    std::string config_arg;
    std::string out_dir = ".";
    bool check = false;
    std::uint64_t seed_value = 0;

    auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
    run->add_option("config", config_arg, "config file path or bundled scenario name")
        ->required();
    auto* run_seed = run->add_option("--seed", seed_value, "random seed (mcwf scenarios)");
    run->add_flag("--check", check, "assert the scenario's acceptance predicate");
    run->add_option("--out", out_dir, "output directory (default: current)");

    auto* validate = app.add_subcommand("validate", "validate a config without running");
    validate->add_option("config", config_arg, "config file path or bundled scenario name")
        ->required();
    auto* val_seed = validate->add_option("--seed", seed_value, "random seed to assume");

    app.add_subcommand("list", "list the bundled scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run")) {
            std::optional<std::uint64_t> seed;
            if (run_seed->count() > 0) seed = seed_value;
            return run_command(config_arg, check, seed, out_dir);
        }
        if (app.got_subcommand("validate")) {
            std::optional<std::uint64_t> seed;
            if (val_seed->count() > 0) seed = seed_value;
            return validate_command(config_arg, seed);
        }
        return list_command();
    } catch (const qme::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const qme::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
