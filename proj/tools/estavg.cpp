#include "estavg/errors.hpp"
#include "estavg/harness/config.hpp"
#include "estavg/harness/experiment.hpp"
#include "estavg/harness/report.hpp"
#include "estavg/harness/verify.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace estavg;
using namespace estavg::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFailures = 3;

struct RunOptions {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> boot;
    std::optional<std::size_t> threads;
    double scale = 1.0;
    std::optional<double> boot_scale;
    std::string out_dir = "estavg-out";
    bool records = false;
    bool quiet = false;
};

ExperimentConfig resolve_config(const RunOptions& o) {
    if (o.config_path.empty() == o.preset.empty()) throw ConfigError("give exactly one of --config or --preset");
    ExperimentConfig c;
    if (!o.preset.empty()) {
        auto found = find_preset(o.preset);
        if (!found) throw ConfigError("unknown preset '" + o.preset + "' (see 'estavg presets list')");
        c = *found;
    } else {
        c = load_config(o.config_path);
    }
    c = scaled(c, o.scale, o.boot_scale.value_or(o.scale));
    if (o.seed) c.seed = *o.seed;
    if (o.reps) c.reps = *o.reps;
    if (o.boot) c.boot = *o.boot;
    if (o.threads) c.threads = *o.threads;
    validate(c);
    return c;
}

int run_command(const RunOptions& o) {
    const ExperimentConfig config = resolve_config(o);
    fs::create_directories(o.out_dir);
    const ExperimentResult result = run_experiment(config);
    emit_config_echo(config, (fs::path(o.out_dir) / "config.json").string());
    emit_csv(result.summary, (fs::path(o.out_dir) / "summary.csv").string());
    if (o.records) emit_records_csv(result.records, result.layout, (fs::path(o.out_dir) / "records.csv").string());
    if (!o.quiet) print_table(std::cout, config, result.summary);
    return 0;
}

int verify_command(std::uint64_t seed, std::size_t trials) {
    bool ok = true;
    for (const CheckResult& r : run_property_suite(seed, trials)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  (" << r.detail << ")\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Estimator averaging: Monte-Carlo studies and checks"};
    app.require_subcommand(1);
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

    RunOptions run;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment and write summary.csv and config.json");
    run_cmd->add_option("--config", run.config_path, "Flat JSON experiment config");
    run_cmd->add_option("--preset", run.preset, "Named preset instead of a config file");
    run_cmd->add_option("--seed", run.seed, "Override the master seed");
    run_cmd->add_option("--reps", run.reps, "Override the number of replications R");
    run_cmd->add_option("--boot", run.boot, "Override the bootstrap size B");
    run_cmd->add_option("--threads", run.threads, "Worker threads (results do not depend on it)");
    run_cmd->add_option("--scale", run.scale, "Multiply R and B (applied before explicit overrides)");
    run_cmd->add_option("--boot-scale", run.boot_scale, "Separate multiplier for B");
    run_cmd->add_option("--out", run.out_dir, "Output directory")->capture_default_str();
    run_cmd->add_flag("--records", run.records, "Also write per-replicate records.csv");
    run_cmd->add_flag("--quiet", run.quiet, "Do not print the table");

    CLI::App* presets_cmd = app.add_subcommand("presets", "List, show or export presets");
    presets_cmd->require_subcommand(1);
    CLI::App* list_cmd = presets_cmd->add_subcommand("list", "Print preset names and descriptions");
    std::string show_name;
    CLI::App* show_cmd = presets_cmd->add_subcommand("show", "Print a preset as JSON");
    show_cmd->add_option("name", show_name)->required();
    std::string export_dir;
    CLI::App* export_cmd = presets_cmd->add_subcommand("export", "Write every preset as <dir>/<name>.json");
    export_cmd->add_option("dir", export_dir)->required();

    std::uint64_t verify_seed = 1;
    std::size_t verify_trials = 200;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run the randomized property suite");
    verify_cmd->add_option("--seed", verify_seed)->capture_default_str();
    verify_cmd->add_option("--trials", verify_trials)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*run_cmd) return run_command(run);
        if (*verify_cmd) return verify_command(verify_seed, verify_trials);
        if (*list_cmd) {
            for (const Preset& p : presets()) std::cout << p.name << "\t" << p.description << "\n";
            return 0;
        }
        if (*show_cmd) {
            const auto c = find_preset(show_name);
            if (!c) throw ConfigError("unknown preset '" + show_name + "'");
            std::cout << canonical_text(*c);
            return 0;
        }
        if (*export_cmd) {
            fs::create_directories(export_dir);
            for (const Preset& p : presets()) emit_config_echo(p.config, (fs::path(export_dir) / (p.name + ".json")).string());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ExcessFailures& e) {
        std::cerr << "aborted: " << e.what() << "\n";
        return kExitFailures;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
