#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "risfso/channels.hpp"
#include "risfso/metrics.hpp"

namespace risfso::mc {

using channels::CascadeSpec;

struct RngConfig {
    std::uint64_t seed = 1;
    std::uint64_t stream_id = 0;
};

/// Engine for one (seed, stream, chunk) triple.
class Rng {
public:
    explicit Rng(const RngConfig& cfg, std::uint64_t chunk = 0);
    std::mt19937_64& engine() { return engine_; }
    /// Uniform on (0, 1].
    double uniform();

private:
    std::mt19937_64 engine_;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

double sample_gg(const channels::GenGammaParams& p, Rng& rng);
double sample_dgg(const channels::DGGParams& p, Rng& rng);
double sample_pe(const channels::PointingErrorParams& p, Rng& rng);
double sample_hop(const channels::Hop& hop, Rng& rng);
double sample_cascade(const CascadeSpec& spec, Rng& rng);

/// Draws of a channel magnitude h. Must be safe to call from several
/// threads on distinct Rng objects.
using ChannelSampler = std::function<double(Rng&)>;
ChannelSampler cascade_sampler(const CascadeSpec& spec);

struct McOptions {
    long n_samples = 1'000'000;
    RngConfig rng;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Draws per chunk; each chunk owns its own engine so results do not depend
/// on the thread count.
inline constexpr long kChunkSize = 1 << 16;

/// Sample mean of kernel(gamma) with gamma = min(snr_fso h^2, snr_rf g^2).
McEstimate estimate(const ChannelSampler& fso, const ChannelSampler& rf, const metrics::LinkBudget& lb,
                    const std::function<double(double)>& kernel, const McOptions& options);

McEstimate estimate_outage(const CascadeSpec& fso, const CascadeSpec& rf, const metrics::LinkBudget& lb,
                           const metrics::ThresholdSpec& th, const McOptions& options);
McEstimate estimate_ber(const CascadeSpec& fso, const CascadeSpec& rf, const metrics::LinkBudget& lb,
                        const metrics::ModulationParams& mod, const McOptions& options);
McEstimate estimate_capacity(const CascadeSpec& fso, const CascadeSpec& rf, const metrics::LinkBudget& lb,
                             const McOptions& options);

McEstimate estimate_outage(const ChannelSampler& fso, const ChannelSampler& rf, const metrics::LinkBudget& lb,
                           const metrics::ThresholdSpec& th, const McOptions& options);
McEstimate estimate_ber(const ChannelSampler& fso, const ChannelSampler& rf, const metrics::LinkBudget& lb,
                        const metrics::ModulationParams& mod, const McOptions& options);
McEstimate estimate_capacity(const ChannelSampler& fso, const ChannelSampler& rf, const metrics::LinkBudget& lb,
                             const McOptions& options);

/// Conditional error probability Gamma(p, q gamma) / (2 Gamma(p)).
double ber_kernel(const metrics::ModulationParams& mod, double gamma);

/// n independent draws, reproducible for a given RngConfig.
std::vector<double> draw(const ChannelSampler& sampler, long n, const RngConfig& rng, unsigned threads = 0);

/// Upper bound on sup |F - F_n| using the analytic CDF at `grid_points`
/// empirical quantiles. Between two grid nodes both CDFs are monotone, so
/// the bound brackets the true distance. `sorted` must be ascending.
double ks_distance_bound(const std::vector<double>& sorted, const std::function<double(double)>& cdf,
                         int grid_points = 2000);

}  // namespace risfso::mc
