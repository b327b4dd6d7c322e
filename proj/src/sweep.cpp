#include "risfso/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "risfso/errors.hpp"
#include "risfso/mc.hpp"

#ifndef RISFSO_VERSION
#define RISFSO_VERSION "0.0.0"
#endif

namespace risfso::sweep {

using nlohmann::json;

namespace {

const char* const kCsvHeader = "K,power_dbm,metric,mode,value,std_error,ci_low,ci_high,wall_ms";

// -- profiles ----------------------------------------------------------------

struct FadingEntry {
    const char* name;
    const char* description;
    channels::DGGParams params;
};

struct PointingEntry {
    const char* name;
    const char* description;
    channels::PointingErrorParams params;
};

const std::vector<FadingEntry>& fading_table() {
    static const std::vector<FadingEntry> t = {
        {"ST", "strong turbulence FSO factor", {{1.8621, 0.5, 1.5074}, {1.0, 1.8, 0.928}}},
        {"MT", "moderate turbulence FSO factor", {{2.169, 0.55, 1.5793}, {1.0, 2.35, 0.9671}}},
        {"RF-default", "RF dGG factor", {{1.5, 1.5, 1.5793}, {1.0, 1.5, 0.9671}}},
    };
    return t;
}

const std::vector<PointingEntry>& pointing_table() {
    static const std::vector<PointingEntry> t = {
        {"PE-endpoints", "first and last optical factor", {0.02, 6.0}},
        {"PE-interior", "RIS-to-RIS factors (A0 assumed equal to the endpoints)", {0.02, 25.0}},
    };
    return t;
}

// -- JSON helpers ------------------------------------------------------------

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) config_fail(where, "expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) config_fail(where, "unknown key '" + k + "'");
}

const json& need(const json& j, const std::string& where, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) config_fail(where, std::string("missing required key '") + key + "'");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) config_fail(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_fail(where, "expected a finite number");
    return d;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
    auto it = j.find(key);
    return it == j.end() ? fallback : number(*it, where + "." + key);
}

double positive(const json& j, const char* key, const std::string& where) {
    const double v = number(need(j, where, key), where + "." + key);
    if (!(v > 0.0)) config_fail(where + "." + key, "must be positive");
    return v;
}

channels::GenGammaParams parse_gg(const json& j, const std::string& where) {
    allow_keys(j, where, {"alpha", "beta", "omega", "second_moment"});
    const double alpha = positive(j, "alpha", where);
    const double beta = positive(j, "beta", where);
    const bool has_omega = j.contains("omega");
    const bool has_m2 = j.contains("second_moment");
    if (has_omega == has_m2) config_fail(where, "give exactly one of 'omega' and 'second_moment'");
    if (has_omega) return {alpha, beta, positive(j, "omega", where)};
    return channels::GenGammaParams::from_second_moment(alpha, beta, positive(j, "second_moment", where));
}

channels::DGGParams parse_fading(const json& j, const std::string& where, std::string& label) {
    if (j.is_string()) {
        label = j.get<std::string>();
        return fading_profile(label);
    }
    allow_keys(j, where, {"first", "second"});
    label = "inline";
    return {parse_gg(need(j, where, "first"), where + ".first"), parse_gg(need(j, where, "second"), where + ".second")};
}

channels::PointingErrorParams parse_pointing(const json& j, const std::string& where) {
    if (j.is_string()) return pointing_profile(j.get<std::string>());
    if (j.contains("geometry")) {
        allow_keys(j, where, {"geometry"});
        const json& g = j["geometry"];
        const std::string w = where + ".geometry";
        allow_keys(g, w,
                   {"aperture_radius", "beam_width", "equivalent_beam_width", "sigma_theta", "sigma_beta", "d1", "d2"});
        channels::PointingGeometry geo;
        geo.aperture_radius = number(need(g, w, "aperture_radius"), w);
        geo.beam_width = number(need(g, w, "beam_width"), w);
        geo.equivalent_beam_width = number(need(g, w, "equivalent_beam_width"), w);
        geo.sigma_theta = number(need(g, w, "sigma_theta"), w);
        geo.sigma_beta = number(need(g, w, "sigma_beta"), w);
        geo.d1 = number(need(g, w, "d1"), w);
        geo.d2 = number(need(g, w, "d2"), w);
        try {
            return channels::pe_from_geometry(geo);
        } catch (const DomainError& e) {
            config_fail(w, e.what());
        }
    }
    allow_keys(j, where, {"a0", "rho2"});
    channels::PointingErrorParams p{number(need(j, where, "a0"), where + ".a0"),
                                    number(need(j, where, "rho2"), where + ".rho2")};
    try {
        channels::validate(p);
    } catch (const InvalidParams& e) {
        config_fail(where, e.what());
    }
    return p;
}

Metric parse_metric(const json& v) {
    if (!v.is_string()) config_fail("metric", "expected a string");
    const auto s = v.get<std::string>();
    if (s == "outage") return Metric::Outage;
    if (s == "ber") return Metric::Ber;
    if (s == "capacity") return Metric::Capacity;
    config_fail("metric", "expected outage, ber or capacity, got '" + s + "'");
}

Mode parse_mode(const json& v) {
    if (!v.is_string()) config_fail("mode", "expected a string");
    const auto s = v.get<std::string>();
    if (s == "analytic") return Mode::Analytic;
    if (s == "asymptotic") return Mode::Asymptotic;
    if (s == "mc") return Mode::Mc;
    if (s == "all") return Mode::All;
    config_fail("mode", "expected analytic, asymptotic, mc or all, got '" + s + "'");
}

// -- number formatting ---------------------------------------------------------

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("bad number in CSV: '" + s + "'");
    return v;
}

std::optional<double> parse_optional(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

// -- evaluation ----------------------------------------------------------------

struct Task {
    int K;
    std::size_t grid_index;
    double power;
    Mode mode;
};

std::vector<Mode> expand(const SweepConfig& cfg) {
    if (cfg.mode != Mode::All) return {cfg.mode};
    if (cfg.metric == Metric::Outage) return {Mode::Analytic, Mode::Asymptotic, Mode::Mc};
    return {Mode::Analytic, Mode::Mc};
}

Row evaluate(const SweepConfig& cfg, const Task& t) {
    const auto fso = build_fso(cfg, t.K);
    const auto rf = build_rf(cfg, t.K);
    const auto lb = cfg.link_budget(t.power);
    const metrics::ThresholdSpec th{metrics::db_to_linear(cfg.gamma_th_db)};
    Row row;
    row.K = t.K;
    row.power_dbm = t.power;
    row.metric = to_string(cfg.metric);
    row.mode = to_string(t.mode);
    if (t.mode == Mode::Mc) {
        mc::McOptions opt;
        opt.n_samples = cfg.mc_samples;
        opt.rng = {cfg.seed, static_cast<std::uint64_t>(t.K) * 1'000'003ULL + t.grid_index};
        opt.threads = 1;
        mc::McEstimate e;
        switch (cfg.metric) {
            case Metric::Outage: e = mc::estimate_outage(fso, rf, lb, th, opt); break;
            case Metric::Ber: e = mc::estimate_ber(fso, rf, lb, cfg.modulation, opt); break;
            case Metric::Capacity: e = mc::estimate_capacity(fso, rf, lb, opt); break;
        }
        row.value = e.value;
        row.std_error = e.std_error;
        row.ci_low = e.ci_low;
        row.ci_high = e.ci_high;
        return row;
    }
    if (t.mode == Mode::Asymptotic) {
        row.value = metrics::outage_asymptotic(fso, rf, lb, th);
        return row;
    }
    switch (cfg.metric) {
        case Metric::Outage: row.value = metrics::outage(fso, rf, lb, th); break;
        case Metric::Ber: row.value = metrics::avg_ber_df(fso, rf, lb, cfg.modulation); break;
        case Metric::Capacity: row.value = metrics::capacity(fso, rf, lb); break;
    }
    return row;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

const char* version() { return RISFSO_VERSION; }

const char* to_string(Metric m) {
    switch (m) {
        case Metric::Outage: return "outage";
        case Metric::Ber: return "ber";
        case Metric::Capacity: return "capacity";
    }
    return "?";
}

const char* to_string(Mode m) {
    switch (m) {
        case Mode::Analytic: return "analytic";
        case Mode::Asymptotic: return "asymptotic";
        case Mode::Mc: return "mc";
        case Mode::All: return "all";
    }
    return "?";
}

std::vector<double> SweepConfig::power_grid() const {
    std::vector<double> g;
    if (!(power_step_db > 0.0) || power_stop_dbm < power_start_dbm) return g;
    const auto n = static_cast<long>(std::floor((power_stop_dbm - power_start_dbm) / power_step_db + 1e-9));
    for (long i = 0; i <= n; ++i) g.push_back(power_start_dbm + static_cast<double>(i) * power_step_db);
    return g;
}

metrics::LinkBudget SweepConfig::link_budget(double power_dbm) const {
    return metrics::LinkBudget::from_power(power_dbm, fso_path_gain, fso_noise_dbm, rf_path_gain, rf_noise_dbm);
}

channels::DGGParams fading_profile(const std::string& name) {
    for (const auto& e : fading_table())
        if (name == e.name) return e.params;
    throw UnknownProfile("unknown fading profile '" + name + "'");
}

channels::PointingErrorParams pointing_profile(const std::string& name) {
    for (const auto& e : pointing_table())
        if (name == e.name) return e.params;
    throw UnknownProfile("unknown pointing profile '" + name + "'");
}

json profiles_json() {
    json out = json::array();
    auto gg = [](const channels::GenGammaParams& p) {
        return json{{"alpha", p.alpha}, {"beta", p.beta}, {"omega", p.omega}};
    };
    for (const auto& e : fading_table())
        out.push_back({{"name", e.name},
                       {"kind", "fading"},
                       {"description", e.description},
                       {"first", gg(e.params.first)},
                       {"second", gg(e.params.second)}});
    for (const auto& e : pointing_table())
        out.push_back({{"name", e.name},
                       {"kind", "pointing"},
                       {"description", e.description},
                       {"a0", e.params.a0},
                       {"rho2", e.params.rho2}});
    out.push_back({{"name", "link-defaults"},
                   {"kind", "link"},
                   {"description", "noise floors in dBm (20 MHz RF channel); the FSO value is a calibration constant"},
                   {"fso_noise_dbm", -104.4},
                   {"rf_noise_dbm", -104.4},
                   {"fso_path_gain", 1.0},
                   {"rf_path_gain", 1.0}});
    return out;
}

std::string config_hash(const json& j) {
    json k = j;
    if (k.is_object()) {
        k.erase("output");
        k.erase("plot");
    }
    const std::string s = k.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SweepConfig parse_config(const json& j) {
    allow_keys(j, "config",
               {"name", "metric", "mode", "power_grid_dbm", "hop_counts", "fso_profile", "rf_profile", "pointing",
                "modulation", "gamma_th_db", "link", "mc", "output", "plot", "timing"});
    SweepConfig c;
    c.source = j;
    if (j.contains("name")) {
        if (!j["name"].is_string() || j["name"].get<std::string>().empty()) config_fail("name", "expected a non-empty string");
        c.name = j["name"].get<std::string>();
        if (c.name.find_first_of("/\\") != std::string::npos) config_fail("name", "must not contain path separators");
    }
    c.metric = parse_metric(need(j, "config", "metric"));
    if (j.contains("mode")) c.mode = parse_mode(j["mode"]);
    if (c.mode == Mode::Asymptotic && c.metric != Metric::Outage)
        config_fail("mode", "the asymptotic mode is only defined for outage");

    const json& grid = need(j, "config", "power_grid_dbm");
    allow_keys(grid, "power_grid_dbm", {"start", "stop", "step"});
    c.power_start_dbm = number(need(grid, "power_grid_dbm", "start"), "power_grid_dbm.start");
    c.power_stop_dbm = number(need(grid, "power_grid_dbm", "stop"), "power_grid_dbm.stop");
    c.power_step_db = number(need(grid, "power_grid_dbm", "step"), "power_grid_dbm.step");
    if (!(c.power_step_db > 0.0)) config_fail("power_grid_dbm.step", "must be positive");
    if (c.power_stop_dbm < c.power_start_dbm) config_fail("power_grid_dbm", "empty grid (stop < start)");
    if (c.power_grid().size() > 100000) config_fail("power_grid_dbm", "grid too large");

    const json& hops = need(j, "config", "hop_counts");
    if (!hops.is_array() || hops.empty()) config_fail("hop_counts", "expected a non-empty array");
    for (const auto& h : hops) {
        if (!h.is_number_integer() || h.get<long>() < 1 || h.get<long>() > 64)
            config_fail("hop_counts", "entries must be integers in [1, 64]");
        c.hop_counts.push_back(h.get<int>());
    }

    c.fso = parse_fading(need(j, "config", "fso_profile"), "fso_profile", c.fso_profile);
    c.rf = parse_fading(need(j, "config", "rf_profile"), "rf_profile", c.rf_profile);

    const json& pe = need(j, "config", "pointing");
    allow_keys(pe, "pointing", {"endpoints", "interior"});
    c.pointing_endpoints = parse_pointing(need(pe, "pointing", "endpoints"), "pointing.endpoints");
    c.pointing_interior = parse_pointing(need(pe, "pointing", "interior"), "pointing.interior");

    if (j.contains("modulation")) {
        const json& m = j["modulation"];
        allow_keys(m, "modulation", {"p", "q"});
        c.modulation.p = positive(m, "p", "modulation");
        c.modulation.q = positive(m, "q", "modulation");
    }
    if (j.contains("gamma_th_db")) c.gamma_th_db = number(j["gamma_th_db"], "gamma_th_db");

    if (j.contains("link")) {
        const json& l = j["link"];
        allow_keys(l, "link", {"fso_noise_dbm", "rf_noise_dbm", "fso_path_gain", "rf_path_gain"});
        c.fso_noise_dbm = number_or(l, "fso_noise_dbm", c.fso_noise_dbm, "link");
        c.rf_noise_dbm = number_or(l, "rf_noise_dbm", c.rf_noise_dbm, "link");
        c.fso_path_gain = number_or(l, "fso_path_gain", c.fso_path_gain, "link");
        c.rf_path_gain = number_or(l, "rf_path_gain", c.rf_path_gain, "link");
        if (!(c.fso_path_gain > 0.0) || !(c.rf_path_gain > 0.0)) config_fail("link", "path gains must be positive");
    }
    if (j.contains("mc")) {
        const json& m = j["mc"];
        allow_keys(m, "mc", {"n_samples", "seed"});
        if (m.contains("n_samples")) {
            if (!m["n_samples"].is_number_integer() || m["n_samples"].get<long>() < 10000)
                config_fail("mc.n_samples", "expected an integer >= 10000");
            c.mc_samples = m["n_samples"].get<long>();
        }
        if (m.contains("seed")) {
            if (!m["seed"].is_number_unsigned() && !(m["seed"].is_number_integer() && m["seed"].get<long long>() >= 0))
                config_fail("mc.seed", "expected a nonnegative integer");
            c.seed = m["seed"].get<std::uint64_t>();
        }
    }
    if (j.contains("output")) {
        if (!j["output"].is_string() || j["output"].get<std::string>().empty())
            config_fail("output", "expected a non-empty string");
        c.output = j["output"].get<std::string>();
    }
    if (j.contains("plot")) {
        if (!j["plot"].is_boolean()) config_fail("plot", "expected a boolean");
        c.plot = j["plot"].get<bool>();
    }
    if (j.contains("timing")) {
        if (!j["timing"].is_boolean()) config_fail("timing", "expected a boolean");
        c.timing = j["timing"].get<bool>();
    }
    return c;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

std::vector<std::string> preset_names() { return {"paper-fig1a", "paper-fig1b", "paper-fig1c"}; }

std::vector<SweepConfig> preset(const std::string& name) {
    const char* metric = nullptr;
    if (name == "paper-fig1a") metric = "outage";
    if (name == "paper-fig1b") metric = "ber";
    if (name == "paper-fig1c") metric = "capacity";
    if (!metric) throw UnknownProfile("unknown preset '" + name + "'");
    std::vector<SweepConfig> out;
    for (const char* fso : {"ST", "MT"}) {
        const json j = {{"name", name + "-" + fso},
                        {"metric", metric},
                        {"mode", "all"},
                        {"power_grid_dbm", {{"start", 0.0}, {"stop", 60.0}, {"step", 2.0}}},
                        {"hop_counts", {2, 3}},
                        {"fso_profile", fso},
                        {"rf_profile", "RF-default"},
                        {"pointing", {{"endpoints", "PE-endpoints"}, {"interior", "PE-interior"}}},
                        {"modulation", {{"p", 1.0}, {"q", 1.0}}},
                        {"gamma_th_db", 0.0},
                        {"link", {{"fso_noise_dbm", -104.4}, {"rf_noise_dbm", -104.4}}},
                        {"mc", {{"n_samples", 1000000}, {"seed", 1}}}};
        out.push_back(parse_config(j));
    }
    return out;
}

channels::CascadeSpec build_fso(const SweepConfig& cfg, int K) {
    channels::CascadeSpec s;
    for (int k = 0; k < K; ++k) {
        channels::Hop h;
        h.fading = cfg.fso;
        h.pointing = (k == 0 || k == K - 1) ? cfg.pointing_endpoints : cfg.pointing_interior;
        s.hops.push_back(h);
    }
    return s;
}

channels::CascadeSpec build_rf(const SweepConfig& cfg, int K) {
    channels::CascadeSpec s;
    for (int k = 0; k < K; ++k) s.hops.push_back({cfg.rf, std::nullopt});
    return s;
}

bool SweepResult::operator==(const SweepResult& o) const {
    if (version != o.version || config_hash != o.config_hash || seed != o.seed || errors != o.errors) return false;
    if (rows.size() != o.rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& a = rows[i];
        const Row& b = o.rows[i];
        // nan compares unequal; failed rows match when both are nan.
        const bool same_value = a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
        if (a.K != b.K || a.power_dbm != b.power_dbm || a.metric != b.metric || a.mode != b.mode || !same_value ||
            a.std_error != b.std_error || a.ci_low != b.ci_low || a.ci_high != b.ci_high || a.wall_ms != b.wall_ms)
            return false;
    }
    return true;
}

SweepResult run_sweep(const SweepConfig& cfg, unsigned threads) {
    const auto grid = cfg.power_grid();
    if (grid.empty()) throw ConfigError("power_grid_dbm: empty grid");
    if (cfg.hop_counts.empty()) throw ConfigError("hop_counts: empty");

    std::vector<Task> tasks;
    for (int K : cfg.hop_counts)
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (Mode m : expand(cfg)) tasks.push_back({K, i, grid[i], m});

    std::vector<Row> rows(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            const auto start = std::chrono::steady_clock::now();
            try {
                rows[i] = evaluate(cfg, t);
            } catch (const std::exception& e) {
                Row r;
                r.K = t.K;
                r.power_dbm = t.power;
                r.metric = to_string(cfg.metric);
                r.mode = to_string(t.mode);
                r.value = std::numeric_limits<double>::quiet_NaN();
                rows[i] = r;
                std::ostringstream os;
                os << "K=" << t.K << " power_dbm=" << fmt(t.power) << " mode=" << to_string(t.mode) << ": "
                   << one_line(e.what());
                errors[i] = os.str();
            }
            if (cfg.timing)
                rows[i].wall_ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
    };
    unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, tasks.size()));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    SweepResult r;
    r.version = version();
    r.config_hash = config_hash(cfg.source);
    r.seed = cfg.seed;
    r.rows = std::move(rows);
    for (auto& e : errors)
        if (!e.empty()) r.errors.push_back(std::move(e));
    return r;
}

std::string to_csv(const SweepResult& r) {
    std::ostringstream os;
    os << "# risfso sweep\n";
    os << "# version=" << r.version << "\n";
    os << "# config_hash=" << r.config_hash << "\n";
    os << "# seed=" << r.seed << "\n";
    for (const auto& e : r.errors) os << "# error=" << one_line(e) << "\n";
    os << kCsvHeader << "\n";
    for (const auto& row : r.rows) {
        os << row.K << ',' << fmt(row.power_dbm) << ',' << row.metric << ',' << row.mode << ',' << fmt(row.value)
           << ',' << fmt(row.std_error) << ',' << fmt(row.ci_low) << ',' << fmt(row.ci_high) << ','
           << fmt(row.wall_ms) << "\n";
    }
    return os.str();
}

SweepResult parse_csv(const std::string& text) {
    SweepResult r;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.size() > 2 ? line.substr(2) : "";
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = body.substr(0, eq), value = body.substr(eq + 1);
            if (key == "version") r.version = value;
            else if (key == "config_hash") r.config_hash = value;
            else if (key == "seed") r.seed = std::stoull(value);
            else if (key == "error") r.errors.push_back(value);
            continue;
        }
        if (!header) {
            if (line != kCsvHeader) throw ConfigError("unexpected CSV header: " + line);
            header = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 9) throw ConfigError("CSV row must have 9 fields: " + line);
        Row row;
        row.K = std::stoi(f[0]);
        row.power_dbm = parse_double(f[1]);
        row.metric = f[2];
        row.mode = f[3];
        row.value = parse_double(f[4]);
        row.std_error = parse_optional(f[5]);
        row.ci_low = parse_optional(f[6]);
        row.ci_high = parse_optional(f[7]);
        row.wall_ms = parse_double(f[8]);
        r.rows.push_back(std::move(row));
    }
    if (!header) throw ConfigError("CSV has no header line");
    return r;
}

std::string to_svg(const SweepResult& r, const std::string& title) {
    const double W = 720, H = 460, ml = 70, mr = 150, mt = 40, mb = 50;
    const bool log_y = r.rows.empty() || r.rows.front().metric != "capacity";
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

    std::map<std::pair<int, std::string>, std::vector<std::pair<double, double>>> series;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& row : r.rows) {
        if (!std::isfinite(row.value) || (log_y && row.value <= 0.0)) continue;
        const double y = ty(row.value);
        series[{row.K, row.mode}].push_back({row.power_dbm, y});
        x0 = std::min(x0, row.power_dbm);
        x1 = std::max(x1, row.power_dbm);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (x0 > x1) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 == x0) x1 = x0 + 1;
    if (log_y) {
        y0 = std::floor(y0);
        y1 = std::ceil(y1);
    }
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">" << title
       << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double x = x0 + (x1 - x0) * i / 5.0;
        os << "<text x=\"" << px(x) << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << fmt(std::round(x * 10) / 10) << "</text>\n";
    }
    const int yticks = log_y ? static_cast<int>(y1 - y0) : 5;
    for (int i = 0; i <= yticks; ++i) {
        const double y = y0 + (y1 - y0) * i / std::max(1, yticks);
        const std::string label = log_y ? "1e" + fmt(y) : fmt(std::round(y * 100) / 100);
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << label
           << "</text>\n";
    }
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">transmit power (dBm)</text>\n";

    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    int idx = 0;
    for (const auto& [key, pts] : series) {
        const char* c = colours[idx % 6];
        const char* dash = key.second == "mc" ? " stroke-dasharray=\"4 3\"" : key.second == "asymptotic" ? " stroke-dasharray=\"1 3\"" : "";
        os << "<polyline fill=\"none\" stroke=\"" << c << "\"" << dash << " points=\"";
        for (const auto& [x, y] : pts) os << px(x) << ',' << py(std::clamp(y, y0, y1)) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 16 * (idx + 1) << "\" font-size=\"11\" fill=\"" << c
           << "\">K=" << key.first << " " << key.second << "</text>\n";
        ++idx;
    }
    os << "</svg>\n";
    return os.str();
}

WrittenFiles write_outputs(const SweepConfig& cfg, const SweepResult& r, const std::string& output_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + output_dir + "': " + ec.message());
    WrittenFiles w;
    w.csv = (fs::path(output_dir) / (cfg.name + ".csv")).string();
    {
        std::ofstream out(w.csv, std::ios::binary);
        if (!out) throw IoError("cannot write '" + w.csv + "'");
        out << to_csv(r);
        if (!out) throw IoError("write failed for '" + w.csv + "'");
    }
    if (cfg.plot) {
        w.svg = (fs::path(output_dir) / (cfg.name + ".svg")).string();
        std::ofstream out(w.svg, std::ios::binary);
        if (!out) throw IoError("cannot write '" + w.svg + "'");
        out << to_svg(r, cfg.name + " (" + to_string(cfg.metric) + ")");
    }
    return w;
}

}  // namespace risfso::sweep
