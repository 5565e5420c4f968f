// mmtc-sim: runs detector sweeps and writes the metrics CSV.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or
// arguments, 130 interrupted (finished trials are still written).

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <unistd.h>

#include <CLI11.hpp>

#include "config_io.hpp"

namespace {

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<int> workers;
    std::optional<std::string> algos;
    bool coded = false;
};

void add_overrides(CLI::App* app, Overrides& o) {
    app->add_option("--seed", o.seed, "Base seed");
    app->add_option("--trials", o.trials, "Number of trials");
    app->add_option("--workers", o.workers, "Worker threads (results do not depend on this)");
    app->add_option("--algos", o.algos, "Comma-separated algorithm tags");
    app->add_flag("--coded", o.coded, "Run the coded IDD pipeline");
}

void apply(const Overrides& o, mmtc::SimConfig& c) {
    if (o.seed) c.base_seed = *o.seed;
    if (o.trials) c.trials = *o.trials;
    if (o.workers) c.workers = *o.workers;
    if (o.algos) c.algorithms = mmtc::parse_algorithm_list(*o.algos);
    if (o.coded) c.coded = true;
    c.validate();
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

int run_sweep(const mmtc::SimConfig& config, const std::string& output, const std::string& emit_config) {
    if (!emit_config.empty()) write_text(emit_config, mmtc::dump_config(config));

    g_cancel.store(false);
    std::signal(SIGINT, on_sigint);
    mmtc::SweepOptions opt;
    opt.cancel = &g_cancel;
    const bool tty = isatty(fileno(stderr));
    opt.progress = [tty](std::uint64_t done, std::uint64_t total) {
        if (tty) std::fprintf(stderr, "\r%llu/%llu trials", static_cast<unsigned long long>(done),
                              static_cast<unsigned long long>(total));
    };
    const auto records = mmtc::sweep(config, opt);
    std::signal(SIGINT, SIG_DFL);
    if (tty) std::fprintf(stderr, "\n");

    const bool interrupted = g_cancel.load();
    const bool any_trials = !records.empty() && records.front().trials > 0;
    if (any_trials) {
        if (output.empty() || output == "-")
            std::cout << mmtc::format_csv(records) << std::flush;
        else
            mmtc::emit_csv(records, output);
        for (const auto& r : records)
            std::fprintf(stderr, "%s snr=%g false_alarms=%llu macs=%llu\n", r.algorithm.c_str(), r.snr_db,
                         static_cast<unsigned long long>(r.false_alarms), static_cast<unsigned long long>(r.macs));
    }
    if (interrupted) {
        std::fprintf(stderr, "interrupted after %llu trials\n",
                     static_cast<unsigned long long>(any_trials ? records.front().trials : 0));
        return 130;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grant-free uplink detection simulator"};
    app.require_subcommand(1);

    std::string config_path, output, emit_config, preset_name;
    Overrides run_o, preset_o;

    auto* run = app.add_subcommand("run", "Run one sweep from a config file");
    run->add_option("--config", config_path, "YAML config file")->required()->check(CLI::ExistingFile);
    run->add_option("--output", output, "CSV output path (default: stdout)");
    run->add_option("--emit-config", emit_config, "Write the resolved config to this path ('-' for stdout)");
    add_overrides(run, run_o);

    auto* preset = app.add_subcommand("preset", "Named configurations");
    preset->require_subcommand(1);
    auto* list = preset->add_subcommand("list", "List preset names");
    auto* prun = preset->add_subcommand("run", "Run a named preset");
    prun->add_option("name", preset_name, "Preset name")->required();
    prun->add_option("--output", output, "CSV output path (default: stdout)");
    prun->add_option("--emit-config", emit_config, "Write the resolved config to this path ('-' for stdout)");
    add_overrides(prun, preset_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& name : mmtc::preset_names()) std::cout << name << '\n';
            return 0;
        }
        mmtc::SimConfig config;
        if (run->parsed()) {
            config = mmtc::load_config(config_path);
            apply(run_o, config);
        } else {
            config = mmtc::preset(preset_name);
            apply(preset_o, config);
        }
        return run_sweep(config, output, emit_config);
    } catch (const mmtc::ContractError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
