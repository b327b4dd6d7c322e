#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "risfso/channels.hpp"
#include "risfso/metrics.hpp"

namespace risfso::sweep {

/// Library version string, e.g. "0.1.0".
const char* version();

enum class Metric { Outage, Ber, Capacity };
enum class Mode { Analytic, Asymptotic, Mc, All };

const char* to_string(Metric m);
const char* to_string(Mode m);

struct SweepConfig {
    std::string name = "sweep";
    Metric metric = Metric::Outage;
    Mode mode = Mode::Analytic;
    double power_start_dbm = 0.0;
    double power_stop_dbm = 0.0;
    double power_step_db = 1.0;
    std::vector<int> hop_counts;
    std::string fso_profile;
    std::string rf_profile;
    channels::DGGParams fso;
    channels::DGGParams rf;
    /// Pointing errors of the first and last FSO factor, and of every other one.
    channels::PointingErrorParams pointing_endpoints;
    channels::PointingErrorParams pointing_interior;
    metrics::ModulationParams modulation;
    double gamma_th_db = 0.0;
    double fso_noise_dbm = -104.4;
    double rf_noise_dbm = -104.4;
    double fso_path_gain = 1.0;
    double rf_path_gain = 1.0;
    long mc_samples = 1'000'000;
    std::uint64_t seed = 1;
    std::string output = "out";
    bool plot = true;
    bool timing = false;
    /// Canonical JSON the config was parsed from; hashed into the CSV header.
    nlohmann::json source;

    std::vector<double> power_grid() const;
    metrics::LinkBudget link_budget(double power_dbm) const;
};

/// Strict parse: unknown keys, missing fields and bad values raise
/// ConfigError; unknown profile names raise UnknownProfile.
SweepConfig parse_config(const nlohmann::json& j);
SweepConfig load_config(const std::string& path);

/// FNV-1a over the key-sorted compact dump; stable under field reordering.
/// "output" and "plot" are left out since they do not change any value.
std::string config_hash(const nlohmann::json& j);

/// Builtin table: ST, MT, RF-default, PE-endpoints, PE-interior.
channels::DGGParams fading_profile(const std::string& name);
channels::PointingErrorParams pointing_profile(const std::string& name);
nlohmann::json profiles_json();

/// Builtin figure presets: paper-fig1a (outage), paper-fig1b (BER),
/// paper-fig1c (capacity). One config per FSO turbulence profile.
std::vector<std::string> preset_names();
std::vector<SweepConfig> preset(const std::string& name);

channels::CascadeSpec build_fso(const SweepConfig& cfg, int K);
channels::CascadeSpec build_rf(const SweepConfig& cfg, int K);

struct Row {
    int K = 0;
    double power_dbm = 0.0;
    std::string metric;
    std::string mode;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    double wall_ms = 0.0;

    bool operator==(const Row&) const = default;
};

struct SweepResult {
    std::string version;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<Row> rows;
    /// Grid points that failed; their rows carry value = nan.
    std::vector<std::string> errors;

    bool operator==(const SweepResult& o) const;
};

/// Evaluates every (K, power, mode) triple on a worker pool. Failures are
/// recorded per row and do not stop the sweep. threads = 0 picks the
/// hardware concurrency.
SweepResult run_sweep(const SweepConfig& cfg, unsigned threads = 0);

std::string to_csv(const SweepResult& r);
SweepResult parse_csv(const std::string& text);

/// Minimal line plot; log-y for outage and BER, linear for capacity.
std::string to_svg(const SweepResult& r, const std::string& title);

struct WrittenFiles {
    std::string csv;
    std::string svg;
};

/// Writes <output>/<name>.csv (and .svg when cfg.plot). Throws IoError.
WrittenFiles write_outputs(const SweepConfig& cfg, const SweepResult& r, const std::string& output_dir);

}  // namespace risfso::sweep
