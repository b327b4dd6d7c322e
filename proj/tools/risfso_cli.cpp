// risfso command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "risfso/risfso.h"

namespace {

struct Owned {
    char* p = nullptr;
    ~Owned() { risfso_string_free(p); }
};

int report_failure(risfso_status s) {
    std::cerr << "error (" << risfso_status_name(s) << "): " << risfso_last_error() << "\n";
    return s == RISFSO_ERR_CONFIG || s == RISFSO_ERR_UNKNOWN_PROFILE ? 2 : 1;
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

// Number of grid points reported as failed across all runs.
std::size_t failed_rows(const std::string& report) {
    std::size_t n = 0;
    for (const auto& run : nlohmann::json::parse(report)["runs"]) n += run["errors"].size();
    return n;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Performance sweeps for cascaded RIS-assisted FSO-RF relay links"};
    app.set_version_flag("--version", std::string(risfso_version()));
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, mode;
    std::uint64_t seed = 0;
    std::int64_t samples = 0;
    unsigned threads = 0;
    bool timing = false;

    auto* run = app.add_subcommand("run", "evaluate a sweep and write CSV (and SVG) output");
    auto* cfg_opt = run->add_option("--config", config_path, "sweep configuration (JSON)");
    auto* preset_opt = run->add_option("--preset", preset, "builtin preset: paper-fig1a, paper-fig1b, paper-fig1c");
    cfg_opt->excludes(preset_opt);
    auto* out_opt = run->add_option("--out", out_dir, "output directory (overrides RISFSO_OUT_DIR and the config)");
    auto* seed_opt = run->add_option("--seed", seed, "Monte-Carlo seed");
    auto* samples_opt = run->add_option("--samples", samples, "Monte-Carlo sample count")->check(CLI::Range(10000L, 1000000000L));
    auto* mode_opt = run->add_option("--mode", mode, "analytic | asymptotic | mc | all")
                         ->check(CLI::IsMember({"analytic", "asymptotic", "mc", "all"}));
    auto* threads_opt = run->add_option("--threads", threads, "worker threads (overrides RISFSO_THREADS)");
    run->add_flag("--timing", timing, "record per-point wall time (output is then not reproducible)");

    auto* profiles = app.add_subcommand("profiles", "builtin parameter profiles");
    auto* profiles_list = profiles->add_subcommand("list", "print the builtin profiles as JSON");
    profiles->require_subcommand(1);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a configuration without running it");
    validate->add_option("--config", validate_path, "sweep configuration (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    if (profiles_list->parsed()) {
        Owned s;
        if (auto st = risfso_profiles_json(&s.p); st != RISFSO_OK) return report_failure(st);
        Owned p;
        if (auto st = risfso_presets_json(&p.p); st != RISFSO_OK) return report_failure(st);
        std::cout << "{\n\"profiles\": " << s.p << ",\n\"presets\": " << p.p << "\n}\n";
        return 0;
    }

    if (validate->parsed()) {
        const auto text = read_file(validate_path);
        if (!text) {
            std::cerr << "error: cannot read '" << validate_path << "'\n";
            return 1;
        }
        Owned summary;
        if (auto st = risfso_config_validate(text->c_str(), &summary.p); st != RISFSO_OK) return report_failure(st);
        std::cout << "ok: " << summary.p << "\n";
        return 0;
    }

    if (!cfg_opt->count() && !preset_opt->count()) {
        std::cerr << "error: run needs --config or --preset\n";
        return 2;
    }

    risfso_sweep_overrides ov{};
    std::optional<std::string> dir = env("RISFSO_OUT_DIR");
    if (out_opt->count()) dir = out_dir;
    if (dir) ov.output_dir = dir->c_str();
    if (mode_opt->count()) ov.mode = mode.c_str();
    if (seed_opt->count()) {
        ov.has_seed = 1;
        ov.seed = seed;
    }
    if (samples_opt->count()) {
        ov.has_samples = 1;
        ov.samples = samples;
    }
    if (timing) {
        ov.has_timing = 1;
        ov.timing = 1;
    }
    if (threads_opt->count()) {
        ov.threads = threads;
    } else if (auto t = env("RISFSO_THREADS")) {
        try {
            ov.threads = static_cast<unsigned>(std::stoul(*t));
        } catch (const std::exception&) {
            std::cerr << "error: RISFSO_THREADS must be a nonnegative integer\n";
            return 2;
        }
    }

    Owned report;
    risfso_status st;
    if (preset_opt->count()) {
        st = risfso_preset_run(preset.c_str(), &ov, &report.p);
    } else {
        const auto text = read_file(config_path);
        if (!text) {
            std::cerr << "error: cannot read '" << config_path << "'\n";
            return 1;
        }
        st = risfso_sweep_run(text->c_str(), &ov, &report.p);
    }
    if (st != RISFSO_OK) return report_failure(st);
    std::cout << report.p << "\n";
    if (failed_rows(report.p) > 0) {
        std::cerr << "warning: some grid points failed; their rows carry value nan\n";
        return 3;
    }
    return 0;
}
