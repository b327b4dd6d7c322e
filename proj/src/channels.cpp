#include "risfso/channels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "risfso/errors.hpp"

namespace risfso::channels {

using foxh::FoxHParams;
using foxh::GammaPair;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// x^{a} for x > 0 in log space, tolerant of huge/small magnitudes.
double logpow(double x, double a) { return a * std::log(x); }

void append_shifted(std::vector<GammaPair>& out, const std::vector<GammaPair>& src, std::size_t from,
                    std::size_t to, double phi) {
    for (std::size_t j = from; j < to; ++j) out.push_back({src[j].coeff + src[j].scale * phi, src[j].scale});
}

// Stacked product kernel with numerator entries first, as Fox-H ordering requires.
FoxHParams stack_kernels(std::span<const ProductFactor> factors) {
    FoxHParams k;
    for (const auto& f : factors) {
        k.m += f.kernel.m;
        k.n += f.kernel.n;
        append_shifted(k.upper, f.kernel.upper, 0, f.kernel.n, f.power);
    }
    for (const auto& f : factors) append_shifted(k.upper, f.kernel.upper, f.kernel.n, f.kernel.p(), f.power);
    for (const auto& f : factors) append_shifted(k.lower, f.kernel.lower, 0, f.kernel.m, f.power);
    for (const auto& f : factors) append_shifted(k.lower, f.kernel.lower, f.kernel.m, f.kernel.q(), f.power);
    return k;
}

// Turns a density kernel H^{m,n}_{p,q} into the CDF kernel H^{m,n+1}_{p+1,q+1}
// by adding G(-s) on top and 1/G(1-s) below.
FoxHParams cdf_kernel_of(const FoxHParams& pdf) {
    FoxHParams k;
    k.m = pdf.m;
    k.n = pdf.n + 1;
    k.upper.push_back({1.0, 1.0});
    k.upper.insert(k.upper.end(), pdf.upper.begin(), pdf.upper.end());
    k.lower = pdf.lower;
    k.lower.push_back({0.0, 1.0});
    return k;
}

double log_psi_scale(const DGGParams& p) {
    // log[(beta2/Omega2)^{1/alpha2} (beta1/Omega1)^{1/alpha1}]
    return std::log(p.second.beta / p.second.omega) / p.second.alpha +
           std::log(p.first.beta / p.first.omega) / p.first.alpha;
}

}  // namespace

GenGammaParams GenGammaParams::from_second_moment(double alpha, double beta, double second_moment) {
    if (!positive(alpha) || !positive(beta) || !positive(second_moment))
        throw DomainError("generalized Gamma parameters must be positive");
    // E[chi^2] = Gamma(beta + 2/alpha) / Gamma(beta) (Omega / beta)^(2/alpha) for the density above
    const double lg = std::log(second_moment) + std::lgamma(beta) - std::lgamma(beta + 2.0 / alpha);
    return {alpha, beta, beta * std::exp(lg * alpha / 2.0)};
}

void validate(const GenGammaParams& p) {
    if (!positive(p.alpha) || !positive(p.beta) || !positive(p.omega))
        throw InvalidParams("generalized Gamma requires alpha, beta, Omega > 0");
}

void validate(const DGGParams& p) {
    validate(p.first);
    validate(p.second);
}

void validate(const PointingErrorParams& p) {
    if (!(p.a0 > 0.0 && p.a0 <= 1.0)) throw InvalidParams("pointing error requires 0 < A0 <= 1");
    if (!positive(p.rho2)) throw InvalidParams("pointing error requires rho^2 > 0");
}

void validate(const CascadeSpec& spec) {
    if (spec.hops.empty()) throw InvalidParams("cascade needs at least one hop");
    for (const auto& h : spec.hops) {
        validate(h.fading);
        if (h.pointing) validate(*h.pointing);
    }
}

double gg_pdf(const GenGammaParams& p, double x) {
    validate(p);
    if (!(x > 0.0)) throw DomainError("gg_pdf requires x > 0");
    const double lg = std::log(p.alpha) + (p.alpha * p.beta - 1.0) * std::log(x) -
                      p.beta * std::log(p.omega / p.beta) - std::lgamma(p.beta) -
                      p.beta / p.omega * std::pow(x, p.alpha);
    return std::exp(lg);
}

double gg_cdf(const GenGammaParams& p, double x) {
    validate(p);
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(p.beta, p.beta / p.omega * std::pow(x, p.alpha));
}

double pe_pdf(const PointingErrorParams& p, double x) {
    validate(p);
    if (x < 0.0 || x > p.a0) return 0.0;
    if (x == 0.0) {
        if (p.rho2 < 1.0) return kInf;
        return p.rho2 == 1.0 ? 1.0 / p.a0 : 0.0;
    }
    return p.rho2 / p.a0 * std::pow(x / p.a0, p.rho2 - 1.0);
}

double pe_cdf(const PointingErrorParams& p, double x) {
    validate(p);
    if (x <= 0.0) return 0.0;
    if (x >= p.a0) return 1.0;
    return std::pow(x / p.a0, p.rho2);
}

PointingErrorParams pe_from_geometry(const PointingGeometry& g) {
    for (double v : {g.aperture_radius, g.beam_width, g.equivalent_beam_width, g.d1, g.d2})
        if (!positive(v)) throw DomainError("pointing geometry lengths must be positive");
    if (!(g.sigma_theta >= 0.0) || !(g.sigma_beta >= 0.0))
        throw DomainError("jitter standard deviations must be nonnegative");
    const double v = std::sqrt(std::numbers::pi / 2.0) * g.aperture_radius / g.beam_width;
    const double erf_v = std::erf(v);
    const double xi = 4.0 * g.sigma_theta * g.sigma_theta * g.d1 * g.d1 +
                      16.0 * g.sigma_beta * g.sigma_beta * g.d2 * g.d2;
    if (xi == 0.0) throw DomainError("xi = 0: no jitter, rho^2 is unbounded");
    return {erf_v * erf_v, g.equivalent_beam_width * g.equivalent_beam_width / xi};
}

double ProductFactor::pdf(double x) const {
    if (!(x > 0.0)) throw DomainError("density argument must be positive");
    return prefactor * std::pow(x, power - 1.0) * foxh::eval(kernel, scale * x);
}

ProductFactor dgg_factor(const DGGParams& p) {
    validate(p);
    const auto& [a1, b1, o1] = p.first;
    const auto& [a2, b2, o2] = p.second;
    const double ab2 = a2 * b2;
    ProductFactor f;
    f.prefactor = std::exp(-(ab2 / a1) * std::log(o1 / b1) - b2 * std::log(o2 / b2) - std::lgamma(b1) -
                           std::lgamma(b2));
    f.power = ab2;
    f.scale = std::exp(log_psi_scale(p));
    f.kernel.m = 2;
    f.kernel.lower = {{0.0, 1.0 / a2}, {(a1 * b1 - ab2) / a1, 1.0 / a1}};
    return f;
}

ProductFactor dgg_pe_factor(const DGGParams& p, const PointingErrorParams& pe) {
    validate(p);
    validate(pe);
    const auto& [a1, b1, o1] = p.first;
    const auto& [a2, b2, o2] = p.second;
    const double ab2 = a2 * b2;
    const double rho2 = pe.rho2;
    ProductFactor f;
    // The A0 exponent is alpha2 beta2; it is what makes the density integrate to one.
    f.prefactor = std::exp(std::log(rho2) - ab2 * std::log(pe.a0) - (ab2 / a1) * std::log(o1 / b1) -
                           b2 * std::log(o2 / b2) - std::lgamma(b1) - std::lgamma(b2));
    f.power = ab2;
    f.scale = std::exp(log_psi_scale(p)) / pe.a0;
    f.kernel.m = 3;
    f.kernel.n = 0;
    f.kernel.upper = {{rho2 - ab2 + 1.0, 1.0}};
    f.kernel.lower = {{0.0, 1.0 / a2}, {(a1 * b1 - ab2) / a1, 1.0 / a1}, {rho2 - ab2, 1.0}};
    return f;
}

double dgg_pdf(const DGGParams& p, double x) {
    if (!(x > 0.0)) throw DomainError("dgg_pdf requires x > 0");
    return dgg_factor(p).pdf(x);
}

double dgg_pe_pdf(const DGGParams& p, const PointingErrorParams& pe, double x) {
    if (!(x > 0.0)) throw DomainError("dgg_pe_pdf requires x > 0");
    return dgg_pe_factor(p, pe).pdf(x);
}

// ---------------------------------------------------------------------------

double FoxHForm::operator()(double x) const {
    if (std::isnan(x) || x < 0.0) throw DomainError("distribution argument must be nonnegative");
    if (x == 0.0) return limit_at_zero();
    if (std::isinf(x)) return shift == 0.0 ? 1.0 : 0.0;
    const double v = constant * std::pow(x, -shift) * foxh::eval(kernel, scale * x);
    if (!std::isfinite(v)) return limit_at_zero();
    return v;
}

double FoxHForm::limit_at_zero() const {
    // H(z) ~ Res z^{-L} near 0 where L is the rightmost left pole.
    double lead = -kInf;
    for (int j = 0; j < kernel.m; ++j) lead = std::max(lead, -kernel.lower[j].coeff / kernel.lower[j].scale);
    if (!std::isfinite(lead)) return 0.0;
    const double exponent = -lead - shift;
    if (exponent > 1e-12) return 0.0;
    if (exponent < -1e-12) return kInf;
    // Finite limit: simple-pole residue, or a log divergence if the pole is multiple.
    int multiplicity = 0;
    std::size_t which = 0;
    for (int j = 0; j < kernel.m; ++j) {
        const auto& g = kernel.lower[j];
        const double first = -g.coeff / g.scale;
        if (std::abs(first - lead) <= foxh::kPoleCoincidenceTol) {
            ++multiplicity;
            which = static_cast<std::size_t>(j);
        }
    }
    if (multiplicity > 1) return kInf;
    FoxHParams rest = kernel;
    const double b_scale = rest.lower[which].scale;
    rest.lower.erase(rest.lower.begin() + static_cast<std::ptrdiff_t>(which));
    rest.m -= 1;
    const double residue = std::real(foxh::mellin_integrand(rest, lead)) / b_scale;
    return constant * residue * std::pow(scale, -lead);
}

FoxHForm product_pdf_form(std::span<const ProductFactor> factors) {
    if (factors.empty()) throw InvalidParams("product needs at least one factor");
    FoxHForm f;
    double log_c = 0.0, log_u = 0.0;
    for (const auto& x : factors) {
        if (!positive(x.prefactor) || !positive(x.scale) || !std::isfinite(x.power))
            throw InvalidParams("product factor needs psi > 0, zeta > 0 and finite phi");
        if (!foxh::validate(x.kernel).ok) throw InvalidParams("product factor kernel rejected");
        log_c += std::log(x.prefactor) - x.power * std::log(x.scale);
        log_u += std::log(x.scale);
    }
    f.constant = std::exp(log_c);
    f.scale = std::exp(log_u);
    f.shift = 1.0;
    f.kernel = stack_kernels(factors);
    return f;
}

FoxHForm product_cdf_form(std::span<const ProductFactor> factors) {
    FoxHForm f = product_pdf_form(factors);
    f.shift = 0.0;
    f.kernel = cdf_kernel_of(f.kernel);
    return f;
}

double product_pdf(std::span<const ProductFactor> factors, double x) {
    if (!(x > 0.0)) throw DomainError("product_pdf requires x > 0");
    return product_pdf_form(factors)(x);
}

double product_cdf(std::span<const ProductFactor> factors, double x) {
    return product_cdf_form(factors)(x);
}

// ---------------------------------------------------------------------------

CascadeDistribution::CascadeDistribution(FoxHForm pdf, FoxHForm cdf, double psi, double u)
    : pdf_(std::move(pdf)), cdf_(std::move(cdf)), psi_(psi), u_(u) {}

double CascadeDistribution::pdf(double x) const { return pdf_(x); }
double CascadeDistribution::cdf(double x) const { return cdf_(x); }

CascadeDistribution cascade_fso(const CascadeSpec& spec) {
    validate(spec);
    double log_psi = 0.0, log_u = 0.0;
    FoxHForm pdf;
    pdf.shift = 1.0;
    auto& k = pdf.kernel;
    k.m = static_cast<int>(3 * spec.size());
    k.n = 0;
    for (const auto& hop : spec.hops) {
        if (!hop.pointing) throw SpecError("FSO cascade requires pointing errors on every hop");
        const auto& [g1, g2] = hop.fading;
        const double rho2 = hop.pointing->rho2;
        log_psi += std::log(rho2) - std::lgamma(g1.beta) - std::lgamma(g2.beta);
        log_u += -std::log(hop.pointing->a0) + log_psi_scale(hop.fading);
        k.upper.push_back({rho2 + 1.0, 1.0});
        k.lower.push_back({g1.beta, 1.0 / g1.alpha});
        k.lower.push_back({g2.beta, 1.0 / g2.alpha});
        k.lower.push_back({rho2, 1.0});
    }
    pdf.constant = std::exp(log_psi);
    pdf.scale = std::exp(log_u);
    FoxHForm cdf = pdf;
    cdf.shift = 0.0;
    cdf.kernel = cdf_kernel_of(pdf.kernel);
    return {std::move(pdf), std::move(cdf), std::exp(log_psi), std::exp(log_u)};
}

CascadeDistribution cascade_rf(const CascadeSpec& spec) {
    validate(spec);
    double log_psi = 0.0, log_u = 0.0;
    FoxHForm pdf;
    pdf.shift = 1.0;
    auto& k = pdf.kernel;
    k.m = static_cast<int>(2 * spec.size());
    for (const auto& hop : spec.hops) {
        if (hop.pointing) throw SpecError("RF cascade must not carry pointing errors");
        const auto& [g3, g4] = hop.fading;
        log_psi += -std::lgamma(g3.beta) - std::lgamma(g4.beta);
        log_u += log_psi_scale(hop.fading);
        k.lower.push_back({g3.beta, 1.0 / g3.alpha});
        k.lower.push_back({g4.beta, 1.0 / g4.alpha});
    }
    pdf.constant = std::exp(log_psi);
    pdf.scale = std::exp(log_u);
    FoxHForm cdf = pdf;
    cdf.shift = 0.0;
    cdf.kernel = cdf_kernel_of(pdf.kernel);
    return {std::move(pdf), std::move(cdf), std::exp(log_psi), std::exp(log_u)};
}

CascadeDistribution cascade(const CascadeSpec& spec) {
    validate(spec);
    std::size_t with_pe = 0;
    for (const auto& h : spec.hops) with_pe += h.pointing ? 1 : 0;
    if (with_pe == spec.size()) return cascade_fso(spec);
    if (with_pe == 0) return cascade_rf(spec);
    // Mixed presence: go through the generic product construction.
    std::vector<ProductFactor> factors;
    for (const auto& h : spec.hops)
        factors.push_back(h.pointing ? dgg_pe_factor(h.fading, *h.pointing) : dgg_factor(h.fading));
    FoxHForm pdf = product_pdf_form(factors);
    FoxHForm cdf = product_cdf_form(factors);
    const double psi = pdf.constant, u = pdf.scale;
    return {std::move(pdf), std::move(cdf), psi, u};
}

// ---------------------------------------------------------------------------

double moment(const GenGammaParams& p, double r) {
    validate(p);
    const double arg = p.beta + r / p.alpha;
    if (!(arg > 0.0)) {
        std::ostringstream os;
        os << "moment order " << r << " outside the strip: beta + r/alpha = " << arg;
        throw StripError(os.str());
    }
    return std::exp((r / p.alpha) * std::log(p.omega / p.beta) + std::lgamma(arg) - std::lgamma(p.beta));
}

double moment(const DGGParams& p, double r) { return moment(p.first, r) * moment(p.second, r); }

double moment(const PointingErrorParams& p, double r) {
    validate(p);
    if (!(p.rho2 + r > 0.0)) throw StripError("moment order outside the strip: rho^2 + r <= 0");
    return p.rho2 * std::exp(logpow(p.a0, r)) / (p.rho2 + r);
}

double moment(const Hop& hop, double r) {
    double m = moment(hop.fading, r);
    if (hop.pointing) m *= moment(*hop.pointing, r);
    return m;
}

double moment(const CascadeSpec& spec, double r) {
    validate(spec);
    double m = 1.0;
    for (const auto& h : spec.hops) m *= moment(h, r);
    return m;
}

double factor_moment(const ProductFactor& f, double r) {
    const double s = r + f.power;
    const auto rep = foxh::validate(f.kernel);
    if (!(s > rep.anchor_min && s < rep.anchor_max)) throw StripError("moment order outside the Mellin strip");
    const auto theta = foxh::mellin_integrand(f.kernel, s);
    return f.prefactor * std::exp(-s * std::log(f.scale)) * theta.real();
}

}  // namespace risfso::channels
