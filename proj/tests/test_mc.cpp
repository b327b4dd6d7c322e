#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "risfso/errors.hpp"
#include "risfso/mc.hpp"

using namespace risfso;
using namespace risfso::mc;

namespace {

metrics::LinkBudget equal_snr(double db) { return {metrics::db_to_linear(db), metrics::db_to_linear(db)}; }

double sample_mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("identical RngConfig reproduces bit-identical results") {
    const auto fso = fx::fso_cascade(fx::st(), 2);
    const auto rf = fx::rf_cascade(2);
    McOptions o;
    o.n_samples = 200'000;
    o.rng = {42, 7};
    o.threads = 1;
    const auto a = estimate_capacity(fso, rf, equal_snr(60.0), o);
    o.threads = 3;
    const auto b = estimate_capacity(fso, rf, equal_snr(60.0), o);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    o.rng.stream_id = 8;
    const auto c = estimate_capacity(fso, rf, equal_snr(60.0), o);
    CHECK(a.value != c.value);

    const auto d1 = draw(cascade_sampler(fso), 100'000, {5, 1}, 1);
    const auto d2 = draw(cascade_sampler(fso), 100'000, {5, 1}, 4);
    CHECK(d1 == d2);

    Rng r1({9, 9});
    Rng r2({9, 9});
    for (int i = 0; i < 1000; ++i) REQUIRE(r1.uniform() == r2.uniform());
}

TEST_CASE("estimate bookkeeping") {
    McOptions o;
    o.n_samples = 50'000;
    o.rng = {3, 0};
    const auto e = estimate_outage(fx::fso_cascade(fx::mt(), 1), fx::rf_cascade(1), equal_snr(50.0), {1.0}, o);
    CHECK(e.n_samples == 50'000);
    CHECK(e.ci_low == doctest::Approx(e.value - 1.96 * e.std_error).epsilon(1e-14));
    CHECK(e.ci_high == doctest::Approx(e.value + 1.96 * e.std_error).epsilon(1e-14));
    o.n_samples = 9'999;
    CHECK_THROWS_AS(estimate_outage(fx::fso_cascade(fx::mt(), 1), fx::rf_cascade(1), equal_snr(50.0), {1.0}, o),
                    InvalidParams);
}

TEST_CASE("sampler supports and moments") {
    const auto pe = fx::pe_end();
    const auto x = draw([&](Rng& r) { return sample_pe(pe, r); }, 200'000, {1, 0}, 1);
    CHECK(*std::min_element(x.begin(), x.end()) > 0.0);
    CHECK(*std::max_element(x.begin(), x.end()) <= pe.a0);
    // (I / A0)^rho2 is uniform on (0, 1]
    std::vector<double> u;
    for (double v : x) u.push_back(std::pow(v / pe.a0, pe.rho2));
    std::sort(u.begin(), u.end());
    CHECK(ks_distance_bound(u, [](double t) { return std::clamp(t, 0.0, 1.0); }) < 0.005);

    for (const auto& g : {fx::st().first, fx::st().second, fx::mt().first, fx::rf().first}) {
        const auto y = draw([&](Rng& r) { return sample_gg(g, r); }, 400'000, {2, 0}, 1);
        double m = 0.0;
        double m2 = 0.0;
        for (double v : y) {
            m += v;
            m2 += v * v;
        }
        m /= y.size();
        const double var = m2 / y.size() - m * m;
        CHECK(std::abs(m - channels::moment(g, 1.0)) < 4.0 * std::sqrt(var / y.size()));
    }
}

TEST_CASE("forced unit draws give the deterministic outage") {
    const ChannelSampler one = [](Rng&) { return 1.0; };
    McOptions o;
    o.n_samples = 10'000;
    const metrics::LinkBudget lb{2.0, 5.0};
    CHECK(estimate_outage(one, one, lb, {3.0}, o).value == 1.0);
    CHECK(estimate_outage(one, one, lb, {1.0}, o).value == 0.0);
    CHECK(estimate_outage(one, one, lb, {3.0}, o).std_error == 0.0);
    CHECK(estimate_capacity(one, one, lb, o).value == doctest::Approx(std::log2(3.0)).epsilon(1e-14));
    CHECK(estimate_ber(one, one, lb, {1.0, 1.0}, o).value == doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("conditional BER kernel") {
    CHECK(ber_kernel({1.0, 1.0}, 0.0) == 0.5);
    CHECK(ber_kernel({1.0, 1.0}, 2.0) == doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-15));
    CHECK(ber_kernel({0.5, 1.0}, 1.3) == doctest::Approx(0.5 * std::erfc(std::sqrt(1.3))).epsilon(1e-13));
    CHECK(ber_kernel({2.0, 0.5}, 3.0) == doctest::Approx(0.5 * std::exp(-1.5) * (1.0 + 1.5)).epsilon(1e-14));
}

TEST_CASE("KS distance of draws against the analytic cascade CDF") {
    SUBCASE("bound on a known distribution") {
        auto x = draw([](Rng& r) { return r.uniform(); }, 100'000, {4, 0}, 1);
        std::sort(x.begin(), x.end());
        const double ks = ks_distance_bound(x, [](double t) { return std::clamp(t, 0.0, 1.0); });
        CHECK(ks < 0.01);
        // a shifted CDF is detected
        CHECK(ks_distance_bound(x, [](double t) { return std::clamp(t * t, 0.0, 1.0); }) > 0.2);
    }
    SUBCASE("three-factor ST cascade, 1e6 draws") {
        const auto spec = fx::fso_cascade(fx::st(), 3);
        auto x = draw(cascade_sampler(spec), 1'000'000, {6, 0}, 1);
        std::sort(x.begin(), x.end());
        const auto d = channels::cascade(spec);
        CHECK(ks_distance_bound(x, [&](double t) { return d.cdf(t); }) < 0.005);
    }
}

TEST_CASE("two-factor MT at 40 dB: outage interval brackets the analytic value") {
    const auto fso = fx::fso_cascade(fx::mt(), 2);
    const auto rf = fx::rf_cascade(2);
    McOptions o;
    o.rng = {40, 0};
    const auto e = estimate_outage(fso, rf, equal_snr(40.0), {1.0}, o);
    const double exact = metrics::outage(fso, rf, equal_snr(40.0), {1.0});
    CHECK(std::abs(e.value - exact) < 3.0 * e.std_error);
}

TEST_CASE("estimates from disjoint substreams are uncorrelated") {
    const auto fso = fx::fso_cascade(fx::mt(), 1);
    const auto rf = fx::rf_cascade(1);
    const int runs = 4000;
    std::vector<double> a;
    std::vector<double> b;
    McOptions o;
    o.n_samples = 10'000;
    o.threads = 1;
    for (int i = 0; i < runs; ++i) {
        o.rng = {static_cast<std::uint64_t>(1000 + i), 0};
        a.push_back(estimate_capacity(fso, rf, equal_snr(70.0), o).value);
        o.rng = {static_cast<std::uint64_t>(1000 + i), 1};
        b.push_back(estimate_capacity(fso, rf, equal_snr(70.0), o).value);
    }
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (int i = 0; i < runs; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.05);
}
