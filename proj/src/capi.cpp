#include "risfso/risfso.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "risfso/channels.hpp"
#include "risfso/errors.hpp"
#include "risfso/foxh.hpp"
#include "risfso/mc.hpp"
#include "risfso/metrics.hpp"
#include "risfso/sweep.hpp"

struct risfso_foxh {
    risfso::foxh::FoxHParams params;
};

struct risfso_cascade {
    risfso::channels::CascadeSpec spec;
    risfso::channels::CascadeDistribution dist;
};

namespace {

thread_local std::string g_last_error;

risfso_status fail(risfso_status s, const char* msg) {
    g_last_error = msg;
    return s;
}

template <class F>
risfso_status guard(F&& f) {
    try {
        f();
        g_last_error.clear();
        return RISFSO_OK;
    } catch (const risfso::Error& e) {
        return fail(static_cast<risfso_status>(static_cast<int>(e.code())), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(RISFSO_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RISFSO_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RISFSO_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

risfso::metrics::LinkBudget budget(risfso_link_budget lb) { return {lb.mean_snr_fso, lb.mean_snr_rf}; }

nlohmann::json apply_overrides(nlohmann::json j, const risfso_sweep_overrides* o) {
    if (!o) return j;
    if (o->output_dir) j["output"] = o->output_dir;
    if (o->mode) j["mode"] = o->mode;
    if (o->has_seed) j["mc"]["seed"] = o->seed;
    if (o->has_samples) j["mc"]["n_samples"] = o->samples;
    if (o->has_timing) j["timing"] = o->timing != 0;
    return j;
}

nlohmann::json run_one(const risfso::sweep::SweepConfig& cfg, unsigned threads) {
    namespace sw = risfso::sweep;
    const auto result = sw::run_sweep(cfg, threads);
    const auto files = sw::write_outputs(cfg, result, cfg.output);
    nlohmann::json r = {{"name", cfg.name},
                        {"csv", files.csv},
                        {"svg", files.svg},
                        {"config_hash", result.config_hash},
                        {"rows", result.rows.size()},
                        {"errors", result.errors}};
    return r;
}

#define RISFSO_REQUIRE(ptr)                                                   \
    do {                                                                       \
        if (!(ptr)) return fail(RISFSO_ERR_NULL_ARGUMENT, #ptr " is null"); \
    } while (0)

}  // namespace

extern "C" {

const char* risfso_version(void) { return risfso::sweep::version(); }

const char* risfso_last_error(void) { return g_last_error.c_str(); }

const char* risfso_status_name(risfso_status status) {
    switch (status) {
        case RISFSO_OK: return "ok";
        case RISFSO_ERR_INVALID_PARAMS: return "invalid parameters";
        case RISFSO_ERR_NON_CONVERGENT: return "non-convergent";
        case RISFSO_ERR_POLE_HIT: return "pole hit";
        case RISFSO_ERR_DOMAIN: return "domain error";
        case RISFSO_ERR_STRIP: return "outside the moment strip";
        case RISFSO_ERR_SPEC: return "cascade specification error";
        case RISFSO_ERR_DEGENERATE_EXPONENTS: return "degenerate exponents";
        case RISFSO_ERR_CONFIG: return "configuration error";
        case RISFSO_ERR_UNKNOWN_PROFILE: return "unknown profile";
        case RISFSO_ERR_COMPUTE: return "compute error";
        case RISFSO_ERR_IO: return "i/o error";
        case RISFSO_ERR_NULL_ARGUMENT: return "null argument";
        case RISFSO_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void risfso_string_free(char* s) { delete[] s; }

risfso_status risfso_foxh_create(int m, int n, const risfso_gamma_pair* upper, size_t p,
                                 const risfso_gamma_pair* lower, size_t q, risfso_foxh** out) {
    RISFSO_REQUIRE(out);
    if (p && !upper) return fail(RISFSO_ERR_NULL_ARGUMENT, "upper is null");
    if (q && !lower) return fail(RISFSO_ERR_NULL_ARGUMENT, "lower is null");
    return guard([&] {
        risfso::foxh::FoxHParams params;
        params.m = m;
        params.n = n;
        for (size_t i = 0; i < p; ++i) params.upper.push_back({upper[i].coeff, upper[i].scale});
        for (size_t i = 0; i < q; ++i) params.lower.push_back({lower[i].coeff, lower[i].scale});
        const auto rep = risfso::foxh::validate(params);
        if (!rep.ok) throw risfso::InvalidParams(rep.message);
        *out = new risfso_foxh{std::move(params)};
    });
}

void risfso_foxh_destroy(risfso_foxh* h) { delete h; }

risfso_status risfso_foxh_eval(const risfso_foxh* h, double z, double* out) {
    RISFSO_REQUIRE(h);
    RISFSO_REQUIRE(out);
    return guard([&] { *out = risfso::foxh::eval(h->params, z); });
}

risfso_status risfso_cascade_create(const risfso_hop* hops, size_t k, risfso_cascade** out) {
    RISFSO_REQUIRE(out);
    if (k && !hops) return fail(RISFSO_ERR_NULL_ARGUMENT, "hops is null");
    return guard([&] {
        risfso::channels::CascadeSpec spec;
        for (size_t i = 0; i < k; ++i) {
            risfso::channels::Hop h;
            h.fading.first = {hops[i].first.alpha, hops[i].first.beta, hops[i].first.omega};
            h.fading.second = {hops[i].second.alpha, hops[i].second.beta, hops[i].second.omega};
            if (hops[i].has_pointing) h.pointing = risfso::channels::PointingErrorParams{hops[i].a0, hops[i].rho2};
            spec.hops.push_back(h);
        }
        auto dist = risfso::channels::cascade(spec);
        *out = new risfso_cascade{std::move(spec), std::move(dist)};
    });
}

void risfso_cascade_destroy(risfso_cascade* c) { delete c; }

risfso_status risfso_cascade_pdf(const risfso_cascade* c, double x, double* out) {
    RISFSO_REQUIRE(c);
    RISFSO_REQUIRE(out);
    return guard([&] {
        if (!(x > 0.0)) throw risfso::DomainError("density argument must be positive");
        *out = c->dist.pdf(x);
    });
}

risfso_status risfso_cascade_cdf(const risfso_cascade* c, double x, double* out) {
    RISFSO_REQUIRE(c);
    RISFSO_REQUIRE(out);
    return guard([&] { *out = c->dist.cdf(x); });
}

risfso_status risfso_cascade_moment(const risfso_cascade* c, double r, double* out) {
    RISFSO_REQUIRE(c);
    RISFSO_REQUIRE(out);
    return guard([&] { *out = risfso::channels::moment(c->spec, r); });
}

risfso_status risfso_link_budget_from_power(double power_dbm, double fso_noise_dbm, double rf_noise_dbm,
                                            risfso_link_budget* out) {
    RISFSO_REQUIRE(out);
    return guard([&] {
        const auto lb = risfso::metrics::LinkBudget::from_power(power_dbm, 1.0, fso_noise_dbm, 1.0, rf_noise_dbm);
        *out = {lb.mean_snr_fso, lb.mean_snr_rf};
    });
}

risfso_status risfso_outage(const risfso_cascade* fso, const risfso_cascade* rf, risfso_link_budget lb,
                            double gamma_th, double* out) {
    RISFSO_REQUIRE(fso);
    RISFSO_REQUIRE(rf);
    RISFSO_REQUIRE(out);
    return guard([&] { *out = risfso::metrics::outage(fso->spec, rf->spec, budget(lb), {gamma_th}); });
}

risfso_status risfso_outage_asymptotic(const risfso_cascade* fso, const risfso_cascade* rf, risfso_link_budget lb,
                                       double gamma_th, double* out, int* numerical_residue) {
    RISFSO_REQUIRE(fso);
    RISFSO_REQUIRE(rf);
    RISFSO_REQUIRE(out);
    return guard([&] {
        const auto r = risfso::metrics::outage_asymptotic_detail(fso->spec, rf->spec, budget(lb), {gamma_th});
        *out = r.value;
        if (numerical_residue) *numerical_residue = r.path == risfso::metrics::AsymptoticPath::NumericalResidue;
    });
}

risfso_status risfso_diversity_order(const risfso_cascade* fso, const risfso_cascade* rf, double* out) {
    RISFSO_REQUIRE(fso);
    RISFSO_REQUIRE(rf);
    RISFSO_REQUIRE(out);
    return guard([&] { *out = risfso::metrics::diversity_order(fso->spec, rf->spec); });
}

risfso_status risfso_avg_ber_df(const risfso_cascade* fso, const risfso_cascade* rf, risfso_link_budget lb, double p,
                                double q, double* out) {
    RISFSO_REQUIRE(fso);
    RISFSO_REQUIRE(rf);
    RISFSO_REQUIRE(out);
    return guard([&] { *out = risfso::metrics::avg_ber_df(fso->spec, rf->spec, budget(lb), {p, q}); });
}

risfso_status risfso_capacity(const risfso_cascade* fso, const risfso_cascade* rf, risfso_link_budget lb,
                              risfso_capacity_result* out) {
    RISFSO_REQUIRE(fso);
    RISFSO_REQUIRE(rf);
    RISFSO_REQUIRE(out);
    return guard([&] {
        const auto r = risfso::metrics::capacity_detail(fso->spec, rf->spec, budget(lb));
        *out = {r.value, r.eta1, r.eta2, r.eta12, r.eta21, r.fallback() ? 1 : 0};
    });
}

risfso_status risfso_mc_estimate_metric(const risfso_cascade* fso, const risfso_cascade* rf, risfso_link_budget lb,
                                        risfso_metric metric, double arg, int64_t n_samples, uint64_t seed,
                                        uint64_t stream_id, risfso_mc_estimate* out) {
    RISFSO_REQUIRE(fso);
    RISFSO_REQUIRE(rf);
    RISFSO_REQUIRE(out);
    return guard([&] {
        risfso::mc::McOptions opt;
        opt.n_samples = static_cast<long>(n_samples);
        opt.rng = {seed, stream_id};
        risfso::mc::McEstimate e;
        switch (metric) {
            case RISFSO_METRIC_OUTAGE: e = risfso::mc::estimate_outage(fso->spec, rf->spec, budget(lb), {arg}, opt); break;
            case RISFSO_METRIC_BER: e = risfso::mc::estimate_ber(fso->spec, rf->spec, budget(lb), {1.0, arg}, opt); break;
            case RISFSO_METRIC_CAPACITY: e = risfso::mc::estimate_capacity(fso->spec, rf->spec, budget(lb), opt); break;
            default: throw risfso::InvalidParams("unknown metric");
        }
        *out = {e.value, e.std_error, e.ci_low, e.ci_high, static_cast<int64_t>(e.n_samples)};
    });
}

risfso_status risfso_profiles_json(char** out) {
    RISFSO_REQUIRE(out);
    return guard([&] { *out = dup_string(risfso::sweep::profiles_json().dump(2)); });
}

risfso_status risfso_presets_json(char** out) {
    RISFSO_REQUIRE(out);
    return guard([&] { *out = dup_string(nlohmann::json(risfso::sweep::preset_names()).dump()); });
}

risfso_status risfso_config_validate(const char* config_json, char** summary) {
    RISFSO_REQUIRE(config_json);
    return guard([&] {
        const auto cfg = risfso::sweep::parse_config(nlohmann::json::parse(config_json));
        if (summary) {
            std::string s = std::string("metric=") + risfso::sweep::to_string(cfg.metric) +
                            " mode=" + risfso::sweep::to_string(cfg.mode) +
                            " grid_points=" + std::to_string(cfg.power_grid().size()) +
                            " hop_counts=" + nlohmann::json(cfg.hop_counts).dump() + " fso=" + cfg.fso_profile +
                            " rf=" + cfg.rf_profile + " config_hash=" + risfso::sweep::config_hash(cfg.source);
            *summary = dup_string(s);
        }
    });
}

risfso_status risfso_sweep_run(const char* config_json, const risfso_sweep_overrides* overrides, char** report) {
    RISFSO_REQUIRE(config_json);
    return guard([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw risfso::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        const auto cfg = risfso::sweep::parse_config(apply_overrides(std::move(j), overrides));
        const auto r = run_one(cfg, overrides ? overrides->threads : 0);
        if (report) *report = dup_string(nlohmann::json{{"runs", {r}}}.dump(2));
    });
}

risfso_status risfso_preset_run(const char* preset, const risfso_sweep_overrides* overrides, char** report) {
    RISFSO_REQUIRE(preset);
    return guard([&] {
        nlohmann::json runs = nlohmann::json::array();
        std::vector<risfso::sweep::SweepConfig> cfgs;
        for (const auto& base : risfso::sweep::preset(preset))
            cfgs.push_back(risfso::sweep::parse_config(apply_overrides(base.source, overrides)));
        for (const auto& cfg : cfgs) runs.push_back(run_one(cfg, overrides ? overrides->threads : 0));
        if (report) *report = dup_string(nlohmann::json{{"runs", runs}}.dump(2));
    });
}

}  // extern "C"
