// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Criterion numbers given on the command line restrict the run.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "risfso/errors.hpp"
#include "risfso/mc.hpp"
#include "risfso/metrics.hpp"
#include "risfso/sweep.hpp"

using namespace risfso;
using namespace risfso::metrics;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[2048];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LinkBudget equal_snr(double db) { return {db_to_linear(db), db_to_linear(db)}; }

const char* profile_name(int p) { return p == 0 ? "ST" : "MT"; }
channels::DGGParams profile(int p) { return p == 0 ? fx::st() : fx::mt(); }

// Power at which a decreasing function of power crosses `target`.
double crossing(const std::function<double(double)>& f, double target, double lo, double hi) {
    if (!(f(lo) > target && f(hi) < target)) return std::nan("");
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Least-squares slope of -log10 outage against log10 mean SNR over [a, b] dB.
double outage_slope(const channels::CascadeSpec& fso, const channels::CascadeSpec& rf, double a, double b) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (double db = a; db <= b + 1e-9; db += 1.0) {
        const double x = db / 10.0;
        const double y = -std::log10(outage(fso, rf, equal_snr(db), {1.0}));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Average BER of one link from its SNR CDF: q^p / (2 G(p)) int g^(p-1) e^(-q g) F(g) dg,
// cut where e^(-q g) < 1e-16.
double ber_quadrature(const channels::CascadeSpec& link, double snr, const ModulationParams& mod) {
    const double c = std::pow(mod.q, mod.p) / (2.0 * std::tgamma(mod.p));
    const double top = std::log(std::log(1e16) / mod.q);
    return c * fx::integrate_log(
                   [&](double g) {
                       return std::pow(g, mod.p - 1.0) * std::exp(-mod.q * g) * link_snr_cdf(link, snr, g);
                   },
                   -70.0, top, 1e-10);
}

// int log2(1 + g) f(g) dg with f the density of min(g_fso, g_rf).
double capacity_quadrature(const channels::CascadeSpec& fso, const channels::CascadeSpec& rf, const LinkBudget& lb) {
    auto f = [&](double g) {
        const double a = link_snr_pdf(fso, lb.mean_snr_fso, g) * (1.0 - link_snr_cdf(rf, lb.mean_snr_rf, g));
        const double b = link_snr_pdf(rf, lb.mean_snr_rf, g) * (1.0 - link_snr_cdf(fso, lb.mean_snr_fso, g));
        return std::log2(1.0 + g) * (a + b);
    };
    const double top = std::log(std::max(lb.mean_snr_fso, lb.mean_snr_rf)) + 15.0;
    return fx::integrate_log(f, -60.0, top, 1e-10);
}

// ---------------------------------------------------------------------------

Outcome normalization() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Pdf {
        std::string name;
        std::function<double(double)> f;
    };
    std::vector<Pdf> pdfs;
    for (const auto& [name, d] : {std::pair{"ST", fx::st()}, std::pair{"MT", fx::mt()}, std::pair{"RF", fx::rf()}}) {
        pdfs.push_back({std::string("dGG ") + name, [d](double x) { return channels::dgg_pdf(d, x); }});
        if (std::string(name) != "RF")
            for (const auto& pe : {fx::pe_end(), fx::pe_int()})
                pdfs.push_back({fmt("dGG+PE %s rho2=%g", name, pe.rho2),
                                [d, pe](double x) { return channels::dgg_pe_pdf(d, pe, x); }});
    }
    for (const auto& c : fx::cascade_matrix()) {
        const auto dist = channels::cascade(c.spec);
        pdfs.push_back({"cascade " + c.name, [dist](double x) { return dist.pdf(x); }});
    }
    double worst = 0.0;
    std::string worst_name;
    for (const auto& p : pdfs) {
        const double err = std::abs(fx::integrate_log(p.f, -80.0, 10.0, 1e-12) - 1.0);
        if (err >= worst) {
            worst = err;
            worst_name = p.name;
        }
    }
    const double t = seconds_since(t0);
    return {worst < 1e-6 && t < 300.0,
            fmt("%zu PDFs, max |int - 1| = %.2e (%s), %.1f s", pdfs.size(), worst, worst_name.c_str(), t)};
}

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();

    // Twenty distinct cascades: the builtin sets plus other pointing arrangements.
    std::vector<fx::NamedCascade> cascades;
    const auto e = fx::pe_end();
    const auto in = fx::pe_int();
    const std::vector<std::vector<channels::PointingErrorParams>> layouts = {
        {e}, {in}, {e, e}, {e, in}, {in, in}, {e, in, e}, {e, e, e}, {in, in, in}};
    for (int p = 0; p < 2; ++p)
        for (const auto& layout : layouts) {
            channels::CascadeSpec s;
            std::string name = fmt("%s rho2", profile_name(p));
            for (const auto& pe : layout) {
                s.hops.push_back({profile(p), pe});
                name += fmt(" %g", pe.rho2);
            }
            cascades.push_back({name, s});
        }
    for (int K = 1; K <= 4; ++K) cascades.push_back({fmt("RF K=%d", K), fx::rf_cascade(K)});

    double ks_worst = 0.0;
    std::string ks_name;
    std::uint64_t seed = 1000;
    for (const auto& c : cascades) {
        auto x = mc::draw(mc::cascade_sampler(c.spec), 1'000'000, {seed++, 0});
        std::sort(x.begin(), x.end());
        const auto dist = channels::cascade(c.spec);
        const double ks = mc::ks_distance_bound(x, [&](double t) { return dist.cdf(t); });
        if (ks >= ks_worst) {
            ks_worst = ks;
            ks_name = c.name;
        }
    }

    // End-to-end metrics where outage lies roughly in [1e-3, 0.5].
    struct System {
        int profile;
        int K;
        std::vector<double> powers;
    };
    const std::vector<System> systems = {{0, 1, {-20, -10, 0}},      {0, 2, {-10, 0, 10, 20}},
                                         {0, 3, {10, 20, 30, 40}},   {1, 1, {-30, -20, -10}},
                                         {1, 2, {-10, 0, 10}},       {1, 3, {10, 20, 30, 40}}};
    const ModulationParams dbpsk{1.0, 1.0};
    int cases = 0;
    int inside = 0;
    int configs = 0;
    std::string misses;
    for (const auto& s : systems) {
        const auto fso = fx::fso_cascade(profile(s.profile), s.K);
        const auto rf = fx::rf_cascade(s.K);
        for (double P : s.powers) {
            ++configs;
            const auto lb = LinkBudget::from_power(P);
            mc::McOptions o;
            o.n_samples = 1'000'000;
            o.rng = {seed++, 0};
            const std::vector<std::pair<const char*, std::pair<double, mc::McEstimate>>> rows = {
                {"outage", {outage(fso, rf, lb, {1.0}), mc::estimate_outage(fso, rf, lb, {1.0}, o)}},
                {"ber", {avg_ber_df(fso, rf, lb, dbpsk), mc::estimate_ber(fso, rf, lb, dbpsk, o)}},
                {"capacity", {capacity(fso, rf, lb), mc::estimate_capacity(fso, rf, lb, o)}},
            };
            for (const auto& [metric, pr] : rows) {
                const auto& [analytic, est] = pr;
                ++cases;
                const double dev = std::abs(analytic - est.value);
                if (dev < 3.0 * est.std_error) {
                    ++inside;
                } else {
                    misses += fmt(" [%s K=%d %gdBm %s %.1f SE]", profile_name(s.profile), s.K, P, metric,
                                  est.std_error > 0.0 ? dev / est.std_error : INFINITY);
                }
            }
        }
    }
    const double frac = static_cast<double>(inside) / cases;
    const double t = seconds_since(t0);
    return {ks_worst < 0.005 && frac >= 0.95 && t < 900.0,
            fmt("KS max %.5f over %zu cascades (%s); %d/%d metric cases inside 3 SE over %d configs (%.1f%%)%s; "
                "%.1f s",
                ks_worst, cascades.size(), ks_name.c_str(), inside, cases, configs, 100.0 * frac, misses.c_str(), t)};
}

Outcome diversity() {
    Outcome o;
    const auto rf1 = fx::rf_cascade(1);
    const double stated[2] = {0.4655, 0.5965};
    for (int p = 0; p < 2; ++p) {
        const auto d = profile(p);
        const auto r = fx::rf();
        const double expect = std::min({d.first.alpha * d.first.beta, d.second.alpha * d.second.beta,
                                        fx::pe_end().rho2, r.first.alpha * r.first.beta,
                                        r.second.alpha * r.second.beta}) /
                              2.0;
        const auto fso = fx::fso_cascade(d, 1);
        const double g = diversity_order(fso, rf1);
        const double slope = outage_slope(fso, rf1, 55.0, 65.0);
        const bool ok = g == expect && std::abs(g - stated[p]) < 5e-5 && std::abs(slope / g - 1.0) <= 0.10;
        o.pass = o.pass && ok;
        o.detail += fmt("%s G=%.6f slope(55-65 dB, K=1)=%.4f (%+.1f%%); ", profile_name(p), g, slope,
                        100.0 * (slope / g - 1.0));
    }
    o.detail += "K>=2 cascades are degenerate, see 7";
    return o;
}

Outcome outage_gaps() {
    auto at = [](int p, int K) {
        const auto fso = fx::fso_cascade(profile(p), K);
        const auto rf = fx::rf_cascade(K);
        return crossing([&](double P) { return outage(fso, rf, LinkBudget::from_power(P), {1.0}); }, 1e-3, -40.0,
                        120.0);
    };
    const double st2 = at(0, 2), st3 = at(0, 3), mt2 = at(1, 2), mt3 = at(1, 3);
    const double hop_gap = st3 - st2;
    const double tg2 = st2 - mt2, tg3 = st3 - mt3;
    const bool ok = std::abs(hop_gap - 20.0) <= 3.0 && std::abs(tg2 - 10.0) <= 3.0 && std::abs(tg3 - 10.0) <= 3.0;
    return {ok, fmt("outage 1e-3 at ST K=2 %.2f, K=3 %.2f dBm: K2->3 gap %.2f dBm (20 +- 3); ST-MT gap %.2f (K=2), "
                    "%.2f (K=3) dB (10 +- 3)",
                    st2, st3, hop_gap, tg2, tg3)};
}

Outcome ber_claims() {
    const auto t0 = std::chrono::steady_clock::now();
    const ModulationParams dbpsk{1.0, 1.0};
    Outcome o;
    for (int K = 2; K <= 3; ++K) {
        double at[2];
        for (int p = 0; p < 2; ++p) {
            const auto fso = fx::fso_cascade(profile(p), K);
            const auto rf = fx::rf_cascade(K);
            at[p] = crossing([&](double P) { return avg_ber_df(fso, rf, LinkBudget::from_power(P), dbpsk); }, 1e-3,
                             -40.0, 120.0);
        }
        const double gap = at[0] - at[1];
        o.pass = o.pass && std::abs(gap - 10.0) <= 3.0;
        o.detail += fmt("K=%d BER 1e-3 ST %.2f MT %.2f dBm gap %.2f; ", K, at[0], at[1], gap);
    }

    // Closed forms against quadrature at every point of the BER figure grid.
    const auto cfg = sweep::preset("paper-fig1b").front();
    double worst = 0.0;
    int points = 0;
    for (double P : cfg.power_grid()) {
        const auto lb = cfg.link_budget(P);
        for (int K : cfg.hop_counts) {
            std::vector<std::pair<channels::CascadeSpec, double>> links = {
                {fx::fso_cascade(fx::st(), K), lb.mean_snr_fso},
                {fx::fso_cascade(fx::mt(), K), lb.mean_snr_fso},
                {fx::rf_cascade(K), lb.mean_snr_rf}};
            for (const auto& [link, snr] : links) {
                worst = std::max(worst, fx::rel_diff(avg_ber_link(link, snr, dbpsk), ber_quadrature(link, snr, dbpsk)));
                ++points;
            }
        }
    }
    o.pass = o.pass && worst < 1e-3;
    o.detail += fmt("closed form vs quadrature: max rel %.1e over %d link points, %.1f s", worst, points,
                    seconds_since(t0));
    return o;
}

Outcome capacity_claims() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = sweep::preset("paper-fig1c").front();
    const double top = cfg.power_grid().back();
    const auto lb_top = cfg.link_budget(top);
    const double c2 = capacity(fx::fso_cascade(fx::st(), 2), fx::rf_cascade(2), lb_top);
    const double c3 = capacity(fx::fso_cascade(fx::st(), 3), fx::rf_cascade(3), lb_top);
    const double gap = c2 - c3;

    double worst = 0.0;
    int points = 0;
    int natural_fallbacks = 0;
    for (double P = 0.0; P <= top + 1e-9; P += 10.0) {
        const auto lb = cfg.link_budget(P);
        for (int p = 0; p < 2; ++p)
            for (int K : cfg.hop_counts) {
                const auto fso = fx::fso_cascade(profile(p), K);
                const auto rf = fx::rf_cascade(K);
                const auto d = capacity_detail(fso, rf, lb);
                if (d.fallback()) {
                    ++natural_fallbacks;
                    continue;
                }
                worst = std::max(worst, fx::rel_diff(d.value, capacity_quadrature(fso, rf, lb)));
                ++points;
            }
    }

    // A starved bivariate budget makes the evaluator give up; the cross terms
    // must then come from quadrature and say so.
    CapacityOptions starved;
    starved.bivariate.max_evaluations = 1000;
    const auto fso = fx::fso_cascade(fx::st(), 3);
    const auto rf = fx::rf_cascade(3);
    const auto fb = capacity_detail(fso, rf, lb_top, starved);
    const double fb_err = fx::rel_diff(fb.value, capacity_quadrature(fso, rf, lb_top));
    const bool fb_ok = fb.eta12_fallback && fb.eta21_fallback && fb_err < 1e-3;

    const bool ok = std::abs(gap - 10.0) <= 3.0 && worst < 1e-3 && fb_ok;
    return {ok, fmt("ST capacity at %g dBm: K=2 %.3f, K=3 %.3f, gap %.2f b/s/Hz (10 +- 3); four-term sum vs quadrature max "
                    "rel %.1e over %d points (%d natural fallbacks); forced fallback flagged %s, rel %.1e; %.1f s",
                    top, c2, c3, gap, worst, points, natural_fallbacks, fb.fallback() ? "yes" : "no", fb_err,
                    seconds_since(t0))};
}

Outcome tangency() {
    Outcome o;
    const auto lb = equal_snr(60.0);
    for (int p = 0; p < 2; ++p)
        for (int K = 1; K <= 3; ++K) {
            const auto fso = fx::fso_cascade(profile(p), K);
            const auto rf = fx::rf_cascade(K);
            const auto det = outage_asymptotic_detail(fso, rf, lb, {1.0});
            bool degenerate = false;
            try {
                outage_asymptotic_closed(fso, rf, lb, {1.0});
            } catch (const DegenerateExponents&) {
                degenerate = true;
            }
            if (!degenerate) {
                const double ratio = det.value / outage(fso, rf, lb, {1.0});
                const bool ok = det.path == AsymptoticPath::ClosedForm && ratio >= 0.9 && ratio <= 1.1;
                o.pass = o.pass && ok;
                o.detail += fmt("%s K=%d ratio %.4f; ", profile_name(p), K, ratio);
            } else {
                const double g = diversity_order(fso, rf);
                const double slope = outage_slope(fso, rf, 55.0, 65.0);
                const bool ok = det.path == AsymptoticPath::NumericalResidue && std::abs(slope / g - 1.0) <= 0.10;
                o.pass = o.pass && ok;
                o.detail += fmt("%s K=%d degenerate, %s, slope %.4f vs G %.4f; ", profile_name(p), K,
                                det.path == AsymptoticPath::NumericalResidue ? "residue path" : "closed path", slope,
                                g);
            }
        }
    return o;
}

Outcome foxh_regression() {
    using foxh::FoxHParams;
    struct Identity {
        const char* name;
        FoxHParams params;
        std::function<double(double)> exact;
    };
    const std::vector<Identity> ids = {
        {"e^-z", FoxHParams{1, 0, {}, {{0.0, 1.0}}}, [](double z) { return std::exp(-z); }},
        {"z^2 e^-z", FoxHParams{1, 0, {}, {{2.0, 1.0}}}, [](double z) { return z * z * std::exp(-z); }},
        {"2 z^1.4 e^-z^2", FoxHParams{1, 0, {}, {{0.7, 0.5}}},
         [](double z) { return 2.0 * std::pow(z, 1.4) * std::exp(-z * z); }},
        {"z^0.5 e^-z", FoxHParams{1, 0, {}, {{0.5, 1.0}}}, [](double z) { return std::sqrt(z) * std::exp(-z); }},
        {"1/(1+z)", FoxHParams{1, 1, {{0.0, 1.0}}, {{0.0, 1.0}}}, [](double z) { return 1.0 / (1.0 + z); }},
        {"G(1.5) (1+z)^-1.5", FoxHParams{1, 1, {{-0.5, 1.0}}, {{0.0, 1.0}}},
         [](double z) { return std::tgamma(1.5) * std::pow(1.0 + z, -1.5); }},
    };
    double worst_id = 0.0;
    std::string worst_id_name;
    for (const auto& id : ids)
        for (double z : fx::z_grid()) {
            const double d = fx::rel_diff(foxh::eval(id.params, z), id.exact(z));
            if (d >= worst_id) {
                worst_id = d;
                worst_id_name = fmt("%s z=%g", id.name, z);
            }
        }

    double worst_ci = 0.0;
    std::string worst_ci_name;
    int evals = 0;
    for (const auto& k : fx::foxh_matrix()) {
        const auto rep = foxh::validate(k.params);
        for (double z : fx::z_grid()) {
            const auto d1 = foxh::eval_detail(k.params, z);
            foxh::EvalOptions o;
            o.anchor = fx::second_anchor(d1.anchor, rep.anchor_min, rep.anchor_max);
            const double d = fx::rel_diff(d1.value, foxh::eval(k.params, z, o));
            ++evals;
            if (d >= worst_ci) {
                worst_ci = d;
                worst_ci_name = fmt("%s z=%g", k.name.c_str(), z);
            }
        }
    }
    return {worst_id < 1e-10 && worst_ci < 1e-6,
            fmt("reductions max rel %.1e (%s); contour independence max rel %.1e over %d pairs (%s)", worst_id,
                worst_id_name.c_str(), worst_ci, evals, worst_ci_name.c_str())};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism() {
    const auto j = nlohmann::json::parse(R"({
        "name": "determinism",
        "metric": "outage",
        "mode": "all",
        "power_grid_dbm": {"start": 0, "stop": 60, "step": 20},
        "hop_counts": [2, 3],
        "fso_profile": "ST",
        "rf_profile": "RF-default",
        "pointing": {"endpoints": "PE-endpoints", "interior": "PE-interior"},
        "mc": {"n_samples": 100000, "seed": 11}
    })");
    const auto cfg = sweep::parse_config(j);
    const auto root = fs::temp_directory_path() / "risfso_acceptance";
    fs::remove_all(root);
    const auto a = sweep::write_outputs(cfg, sweep::run_sweep(cfg, 1), (root / "a").string());
    const auto b = sweep::write_outputs(cfg, sweep::run_sweep(cfg, 2), (root / "b").string());
    const std::string sa = slurp(a.csv);
    const std::string sb = slurp(b.csv);
    const bool ok = !sa.empty() && sa == sb;
    fs::remove_all(root);
    return {ok, fmt("two runs (1 and 2 threads), %zu-byte CSVs %s", sa.size(), ok ? "identical" : "differ")};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "normalization", normalization},
        {2, "oracle equivalence", oracle_equivalence},
        {3, "diversity order", diversity},
        {4, "outage power gaps", outage_gaps},
        {5, "BER gap and closed forms", ber_claims},
        {6, "capacity gap and four-term sum", capacity_claims},
        {7, "asymptotic tangency", tangency},
        {8, "Fox-H regression", foxh_regression},
        {9, "CSV determinism", determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
