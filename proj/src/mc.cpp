#include "risfso/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "risfso/errors.hpp"

namespace risfso::mc {

namespace {

std::seed_seq make_seed(const RngConfig& cfg, std::uint64_t chunk) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    return std::seed_seq{lo(cfg.seed), hi(cfg.seed), lo(cfg.stream_id), hi(cfg.stream_id), lo(chunk), hi(chunk)};
}

unsigned worker_count(unsigned requested, long chunks) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<long>(t, std::max(1L, chunks)));
}

// Runs body(chunk) for every chunk on a small pool.
template <class F>
void for_each_chunk(long chunks, unsigned threads, F&& body) {
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long c = next++; c < chunks; c = next++) body(c);
    };
    const unsigned n = worker_count(threads, chunks);
    if (n == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

struct Moments {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
};

Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    Moments r;
    r.n = a.n + b.n;
    const double d = b.mean - a.mean;
    r.mean = a.mean + d * static_cast<double>(b.n) / static_cast<double>(r.n);
    r.m2 = a.m2 + b.m2 + d * d * static_cast<double>(a.n) * static_cast<double>(b.n) / static_cast<double>(r.n);
    return r;
}

void check_samples(long n) {
    if (n < 10'000) throw InvalidParams("Monte-Carlo estimates need at least 1e4 samples");
}

}  // namespace

Rng::Rng(const RngConfig& cfg, std::uint64_t chunk) {
    auto seq = make_seed(cfg, chunk);
    engine_.seed(seq);
}

double Rng::uniform() {
    // 53 random bits mapped onto (0, 1].
    return 1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double sample_gg(const channels::GenGammaParams& p, Rng& rng) {
    std::gamma_distribution<double> g(p.beta, p.omega / p.beta);
    const double y = g(rng.engine());
    return std::pow(y, 1.0 / p.alpha);
}

double sample_dgg(const channels::DGGParams& p, Rng& rng) {
    const double a = sample_gg(p.first, rng);
    return a * sample_gg(p.second, rng);
}

double sample_pe(const channels::PointingErrorParams& p, Rng& rng) {
    return p.a0 * std::pow(rng.uniform(), 1.0 / p.rho2);
}

double sample_hop(const channels::Hop& hop, Rng& rng) {
    double h = sample_dgg(hop.fading, rng);
    if (hop.pointing) h *= sample_pe(*hop.pointing, rng);
    return h;
}

double sample_cascade(const CascadeSpec& spec, Rng& rng) {
    double h = 1.0;
    for (const auto& hop : spec.hops) h *= sample_hop(hop, rng);
    return h;
}

ChannelSampler cascade_sampler(const CascadeSpec& spec) {
    channels::validate(spec);
    return [spec](Rng& rng) { return sample_cascade(spec, rng); };
}

McEstimate estimate(const ChannelSampler& fso, const ChannelSampler& rf, const metrics::LinkBudget& lb,
                    const std::function<double(double)>& kernel, const McOptions& options) {
    metrics::validate(lb);
    check_samples(options.n_samples);
    const long chunks = (options.n_samples + kChunkSize - 1) / kChunkSize;
    std::vector<Moments> parts(static_cast<std::size_t>(chunks));
    for_each_chunk(chunks, options.threads, [&](long c) {
        Rng rng(options.rng, static_cast<std::uint64_t>(c));
        const long count = std::min(kChunkSize, options.n_samples - c * kChunkSize);
        Moments m;
        for (long i = 0; i < count; ++i) {
            const double h = fso(rng);
            const double g = rf(rng);
            const double gamma = std::min(lb.mean_snr_fso * h * h, lb.mean_snr_rf * g * g);
            const double v = kernel(gamma);
            ++m.n;
            const double d = v - m.mean;
            m.mean += d / static_cast<double>(m.n);
            m.m2 += d * (v - m.mean);
        }
        parts[static_cast<std::size_t>(c)] = m;
    });
    Moments total;
    for (const auto& p : parts) total = merge(total, p);

    McEstimate e;
    e.n_samples = total.n;
    e.value = total.mean;
    const double var = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
    e.std_error = std::sqrt(var / static_cast<double>(total.n));
    e.ci_low = e.value - 1.96 * e.std_error;
    e.ci_high = e.value + 1.96 * e.std_error;
    return e;
}

double ber_kernel(const metrics::ModulationParams& mod, double gamma) {
    if (mod.p == 1.0) return 0.5 * std::exp(-mod.q * gamma);
    return 0.5 * boost::math::gamma_q(mod.p, mod.q * gamma);
}

McEstimate estimate_outage(const ChannelSampler& fso, const ChannelSampler& rf, const metrics::LinkBudget& lb,
                           const metrics::ThresholdSpec& th, const McOptions& options) {
    if (!(th.gamma_th > 0.0)) throw DomainError("threshold must be positive");
    const double t = th.gamma_th;
    return estimate(fso, rf, lb, [t](double g) { return g <= t ? 1.0 : 0.0; }, options);
}

McEstimate estimate_ber(const ChannelSampler& fso, const ChannelSampler& rf, const metrics::LinkBudget& lb,
                        const metrics::ModulationParams& mod, const McOptions& options) {
    if (!(mod.p > 0.0) || !(mod.q > 0.0)) throw InvalidParams("modulation requires p > 0 and q > 0");
    return estimate(fso, rf, lb, [mod](double g) { return ber_kernel(mod, g); }, options);
}

McEstimate estimate_capacity(const ChannelSampler& fso, const ChannelSampler& rf, const metrics::LinkBudget& lb,
                             const McOptions& options) {
    return estimate(fso, rf, lb, [](double g) { return std::log2(1.0 + g); }, options);
}

McEstimate estimate_outage(const CascadeSpec& fso, const CascadeSpec& rf, const metrics::LinkBudget& lb,
                           const metrics::ThresholdSpec& th, const McOptions& options) {
    return estimate_outage(cascade_sampler(fso), cascade_sampler(rf), lb, th, options);
}

McEstimate estimate_ber(const CascadeSpec& fso, const CascadeSpec& rf, const metrics::LinkBudget& lb,
                        const metrics::ModulationParams& mod, const McOptions& options) {
    return estimate_ber(cascade_sampler(fso), cascade_sampler(rf), lb, mod, options);
}

McEstimate estimate_capacity(const CascadeSpec& fso, const CascadeSpec& rf, const metrics::LinkBudget& lb,
                             const McOptions& options) {
    return estimate_capacity(cascade_sampler(fso), cascade_sampler(rf), lb, options);
}

std::vector<double> draw(const ChannelSampler& sampler, long n, const RngConfig& rng, unsigned threads) {
    if (n <= 0) throw InvalidParams("draw count must be positive");
    std::vector<double> out(static_cast<std::size_t>(n));
    const long chunks = (n + kChunkSize - 1) / kChunkSize;
    for_each_chunk(chunks, threads, [&](long c) {
        Rng r(rng, static_cast<std::uint64_t>(c));
        const long end = std::min(n, (c + 1) * kChunkSize);
        for (long i = c * kChunkSize; i < end; ++i) out[static_cast<std::size_t>(i)] = sampler(r);
    });
    return out;
}

double ks_distance_bound(const std::vector<double>& sorted, const std::function<double(double)>& cdf,
                         int grid_points) {
    if (sorted.empty()) throw InvalidParams("KS distance needs samples");
    if (grid_points < 2) throw InvalidParams("KS grid needs at least two points");
    const double n = static_cast<double>(sorted.size());
    const std::size_t last = sorted.size() - 1;
    std::vector<double> xs;
    for (int i = 0; i < grid_points; ++i) {
        const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(last) * i / (grid_points - 1)));
        if (xs.empty() || sorted[k] > xs.back()) xs.push_back(sorted[k]);
    }
    std::vector<double> F(xs.size()), Fn(xs.size()), Fn_left(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        F[i] = cdf(xs[i]);
        Fn[i] = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), xs[i]) - sorted.begin()) / n;
        Fn_left[i] = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), xs[i]) - sorted.begin()) / n;
    }
    double d = std::max(F.front(), 1.0 - F.back());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d = std::max({d, std::abs(F[i] - Fn[i]), std::abs(F[i] - Fn_left[i])});
        if (i + 1 < xs.size()) d = std::max({d, F[i + 1] - Fn[i], Fn_left[i + 1] - F[i]});
    }
    return d;
}

}  // namespace risfso::mc
