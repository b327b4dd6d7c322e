#include "risfso/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "risfso/errors.hpp"

namespace risfso::metrics {

using channels::CascadeDistribution;
using channels::FoxHForm;
using foxh::CoupledGamma;
using foxh::FoxHParams;
using foxh::GammaPair;

namespace {

constexpr double kLog2e = std::numbers::log2e;

void require_snr(double snr, const char* what) {
    if (!(snr > 0.0) || std::isnan(snr)) throw InvalidParams(std::string(what) + " must be positive");
}

// Gamma(x) with a pole check; throws DegenerateExponents at nonpositive integers.
double gamma_checked(double x) {
    if (x <= 0.0 && std::abs(x - std::round(x)) < foxh::kPoleCoincidenceTol)
        throw DegenerateExponents("coincident exponents make a residue coefficient singular");
    return std::tgamma(x);
}

struct FamilyExponent {
    double alpha;
    double beta;
};

// First-order residue sums of one dGG family set. `fam` lists, per hop, the
// two (alpha, beta) pairs; `rho2` holds the pointing exponents (may be empty).
double residue_families(const std::vector<std::array<FamilyExponent, 2>>& fam, const std::vector<double>& rho2,
                        double z) {
    const std::size_t K = fam.size();
    double total = 0.0;
    for (int f = 0; f < 2; ++f) {
        for (std::size_t i = 0; i < K; ++i) {
            const double e = fam[i][f].alpha * fam[i][f].beta;
            double num = fam[i][f].alpha;
            for (std::size_t j = 0; j < K; ++j) {
                for (int g = 0; g < 2; ++g) {
                    if (j == i && g == f) continue;
                    num *= gamma_checked(fam[j][g].beta - e / fam[j][g].alpha);
                }
            }
            double den = 1.0;
            for (double r : rho2) {
                num *= gamma_checked(r - e);
                den *= gamma_checked(1.0 + r - e);
            }
            num *= gamma_checked(e);
            den *= gamma_checked(1.0 + e);
            total += num / den * std::pow(z, e);
        }
    }
    for (std::size_t i = 0; i < rho2.size(); ++i) {
        const double e = rho2[i];
        double num = 1.0, den = 1.0;
        for (std::size_t j = 0; j < K; ++j)
            for (int g = 0; g < 2; ++g) num *= gamma_checked(fam[j][g].beta - e / fam[j][g].alpha);
        for (std::size_t j = 0; j < rho2.size(); ++j) {
            if (j != i) num *= gamma_checked(rho2[j] - e);
            den *= gamma_checked(1.0 + rho2[j] - e);
        }
        num *= gamma_checked(e);
        den *= gamma_checked(1.0 + e);
        total += num / den * std::pow(z, e);
    }
    return total;
}

std::vector<std::array<FamilyExponent, 2>> families_of(const CascadeSpec& spec) {
    std::vector<std::array<FamilyExponent, 2>> out;
    for (const auto& h : spec.hops)
        out.push_back({FamilyExponent{h.fading.first.alpha, h.fading.first.beta},
                       FamilyExponent{h.fading.second.alpha, h.fading.second.beta}});
    return out;
}

double cdf_residue_asymptote(const CascadeSpec& link, double mean_snr, double gamma_th) {
    const auto dist = channels::cascade(link);
    const FoxHForm& f = dist.cdf_form();
    return f.constant * foxh::leading_residues(f.kernel, f.scale * std::sqrt(gamma_th / mean_snr));
}

// Kernel of E[log(1 + mean_snr h^2)] built on a density form.
FoxHParams log_moment_kernel(const FoxHParams& pdf) {
    FoxHParams k;
    k.m = pdf.m + 2;
    k.n = pdf.n + 1;
    k.upper.push_back({0.0, 0.5});
    k.upper.insert(k.upper.end(), pdf.upper.begin(), pdf.upper.end());
    k.upper.push_back({1.0, 0.5});
    k.lower = {{0.0, 0.5}, {0.0, 0.5}};
    k.lower.insert(k.lower.end(), pdf.lower.begin(), pdf.lower.end());
    return k;
}

// Outer group obtained from Theta(-2 u1 - u2) of a density kernel.
void coupled_outer(const FoxHParams& pdf, foxh::BivariateFoxHParams& out) {
    std::vector<CoupledGamma> num, den_upper, den_lower;
    for (int j = 0; j < pdf.m; ++j) {
        const auto& g = pdf.lower[j];
        num.push_back({1.0 - g.coeff, 2.0 * g.scale, g.scale});
    }
    for (int j = 0; j < pdf.n; ++j) {
        const auto& g = pdf.upper[j];
        num.push_back({g.coeff, -2.0 * g.scale, -g.scale});
    }
    for (std::size_t j = pdf.n; j < pdf.p(); ++j) {
        const auto& g = pdf.upper[j];
        den_lower.push_back({1.0 - g.coeff, 2.0 * g.scale, g.scale});
    }
    for (std::size_t j = pdf.m; j < pdf.q(); ++j) {
        const auto& g = pdf.lower[j];
        den_upper.push_back({1.0 - g.coeff, 2.0 * g.scale, g.scale});
    }
    out.outer_n = static_cast<int>(num.size());
    out.outer_upper = num;
    out.outer_upper.insert(out.outer_upper.end(), den_upper.begin(), den_upper.end());
    out.outer_lower = den_lower;
}

FoxHParams log1p_kernel() {
    // log(1 + v) = H^{1,2}_{2,2}[v | (1,1),(1,1) ; (1,1),(0,1)]
    FoxHParams k;
    k.m = 1;
    k.n = 2;
    k.upper = {{1.0, 1.0}, {1.0, 1.0}};
    k.lower = {{1.0, 1.0}, {0.0, 1.0}};
    return k;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

LinkBudget LinkBudget::from_power(double power_dbm, double fso_path_gain, double fso_noise_dbm, double rf_path_gain,
                                  double rf_noise_dbm) {
    if (!std::isfinite(power_dbm) || !std::isfinite(fso_noise_dbm) || !std::isfinite(rf_noise_dbm))
        throw DomainError("link budget levels must be finite");
    if (!(fso_path_gain > 0.0) || !(rf_path_gain > 0.0)) throw DomainError("path gains must be positive");
    LinkBudget lb;
    lb.mean_snr_fso = db_to_linear(2.0 * power_dbm + 20.0 * std::log10(fso_path_gain) - fso_noise_dbm);
    lb.mean_snr_rf = db_to_linear(power_dbm + 20.0 * std::log10(rf_path_gain) - rf_noise_dbm);
    return lb;
}

void validate(const LinkBudget& lb) {
    require_snr(lb.mean_snr_fso, "FSO mean SNR");
    require_snr(lb.mean_snr_rf, "RF mean SNR");
}

double link_snr_cdf(const CascadeSpec& link, double mean_snr, double gamma) {
    require_snr(mean_snr, "mean SNR");
    if (std::isnan(gamma) || gamma < 0.0) throw DomainError("SNR argument must be nonnegative");
    return channels::cascade(link).cdf(std::sqrt(gamma / mean_snr));
}

double link_snr_pdf(const CascadeSpec& link, double mean_snr, double gamma) {
    require_snr(mean_snr, "mean SNR");
    if (!(gamma > 0.0)) throw DomainError("SNR density needs gamma > 0");
    return channels::cascade(link).pdf(std::sqrt(gamma / mean_snr)) / (2.0 * std::sqrt(gamma * mean_snr));
}

double snr_cdf(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb, double gamma) {
    validate(lb);
    if (!(gamma > 0.0)) throw DomainError("snr_cdf requires gamma > 0");
    const double a = link_snr_cdf(fso, lb.mean_snr_fso, gamma);
    const double b = link_snr_cdf(rf, lb.mean_snr_rf, gamma);
    return a + b - a * b;
}

double snr_cdf_survival_form(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb, double gamma) {
    validate(lb);
    if (!(gamma > 0.0)) throw DomainError("snr_cdf requires gamma > 0");
    const double a = link_snr_cdf(fso, lb.mean_snr_fso, gamma);
    const double b = link_snr_cdf(rf, lb.mean_snr_rf, gamma);
    return 1.0 - (1.0 - a) * (1.0 - b);
}

double outage(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb, const ThresholdSpec& th) {
    if (!(th.gamma_th > 0.0)) throw InvalidParams("threshold must be positive");
    return snr_cdf(fso, rf, lb, th.gamma_th);
}

double outage_asymptotic_closed(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                                const ThresholdSpec& th) {
    validate(lb);
    if (!(th.gamma_th > 0.0)) throw InvalidParams("threshold must be positive");
    const auto F = channels::cascade_fso(fso);
    const auto R = channels::cascade_rf(rf);

    std::vector<double> rho2;
    for (const auto& h : fso.hops) rho2.push_back(h.pointing->rho2);
    // U1 already carries the 1/A0 factors of every hop.
    const double z1 = F.u() * std::sqrt(th.gamma_th / lb.mean_snr_fso);
    const double z2 = R.u() * std::sqrt(th.gamma_th / lb.mean_snr_rf);
    return F.psi() * residue_families(families_of(fso), rho2, z1) +
           R.psi() * residue_families(families_of(rf), {}, z2);
}

double outage_asymptotic_residue(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                                 const ThresholdSpec& th) {
    validate(lb);
    if (!(th.gamma_th > 0.0)) throw InvalidParams("threshold must be positive");
    return cdf_residue_asymptote(fso, lb.mean_snr_fso, th.gamma_th) +
           cdf_residue_asymptote(rf, lb.mean_snr_rf, th.gamma_th);
}

AsymptoticResult outage_asymptotic_detail(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                                          const ThresholdSpec& th) {
    try {
        return {outage_asymptotic_closed(fso, rf, lb, th), AsymptoticPath::ClosedForm};
    } catch (const DegenerateExponents&) {
    } catch (const SpecError&) {
    }
    return {outage_asymptotic_residue(fso, rf, lb, th), AsymptoticPath::NumericalResidue};
}

double outage_asymptotic(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                         const ThresholdSpec& th) {
    return outage_asymptotic_detail(fso, rf, lb, th).value;
}

double diversity_order(const CascadeSpec& fso, const CascadeSpec& rf) {
    channels::validate(fso);
    channels::validate(rf);
    double g = std::numeric_limits<double>::infinity();
    for (const auto* spec : {&fso, &rf}) {
        for (const auto& h : spec->hops) {
            g = std::min({g, h.fading.first.alpha * h.fading.first.beta, h.fading.second.alpha * h.fading.second.beta});
            if (h.pointing) g = std::min(g, h.pointing->rho2);
        }
    }
    return g / 2.0;
}

double avg_ber_link(const CascadeSpec& link, double mean_snr, const ModulationParams& mod) {
    require_snr(mean_snr, "mean SNR");
    if (!(mod.p > 0.0) || !(mod.q > 0.0)) throw InvalidParams("modulation requires p > 0 and q > 0");
    const auto dist = channels::cascade(link);
    const FoxHForm& f = dist.cdf_form();
    FoxHParams k = f.kernel;
    k.upper.insert(k.upper.begin(), GammaPair{1.0 - mod.p, 0.5});
    k.n += 1;
    const double c = f.constant / (2.0 * std::tgamma(mod.p));
    return c * foxh::eval(k, f.scale / std::sqrt(mod.q * mean_snr));
}

double avg_ber_fso(const CascadeSpec& fso, const LinkBudget& lb, const ModulationParams& mod) {
    return avg_ber_link(fso, lb.mean_snr_fso, mod);
}

double avg_ber_rf(const CascadeSpec& rf, const LinkBudget& lb, const ModulationParams& mod) {
    return avg_ber_link(rf, lb.mean_snr_rf, mod);
}

double avg_ber_df(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb, const ModulationParams& mod) {
    validate(lb);
    const double a = avg_ber_fso(fso, lb, mod);
    const double b = avg_ber_rf(rf, lb, mod);
    return a + b - 2.0 * a * b;
}

double link_capacity(const CascadeSpec& link, double mean_snr) {
    require_snr(mean_snr, "mean SNR");
    const auto dist = channels::cascade(link);
    const FoxHForm& f = dist.pdf_form();
    return kLog2e / 2.0 * f.constant * foxh::eval(log_moment_kernel(f.kernel), f.scale / std::sqrt(mean_snr));
}

double cross_term(const CascadeSpec& a, double snr_a, const CascadeSpec& b, double snr_b,
                  const foxh::BivariateOptions& options) {
    require_snr(snr_a, "mean SNR");
    require_snr(snr_b, "mean SNR");
    const auto A = channels::cascade(a);
    const auto B = channels::cascade(b);
    const FoxHForm& fa = A.pdf_form();
    const FoxHForm& fb = B.cdf_form();
    foxh::BivariateFoxHParams bp;
    coupled_outer(fa.kernel, bp);
    bp.first = log1p_kernel();
    bp.second = fb.kernel;
    const double z1 = snr_a / (fa.scale * fa.scale);
    const double z2 = fb.scale / fa.scale * std::sqrt(snr_a / snr_b);
    return kLog2e * fa.constant * fb.constant * foxh::eval_bivariate(bp, z1, z2, options);
}

double cross_term_quadrature(const CascadeSpec& a, double snr_a, const CascadeSpec& b, double snr_b) {
    require_snr(snr_a, "mean SNR");
    require_snr(snr_b, "mean SNR");
    const auto A = channels::cascade(a);
    const auto B = channels::cascade(b);
    const double ratio = std::sqrt(snr_a / snr_b);
    // x = h_a in log coordinates around the bulk of the density.
    auto integrand = [&](double t) {
        const double x = std::exp(t);
        const double fx = A.pdf(x);
        if (fx == 0.0) return 0.0;
        return std::log2(1.0 + snr_a * x * x) * fx * B.cdf(x * ratio) * x;
    };
    const double t0 = -std::log(A.u());
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, t0 - 60.0, t0 + 12.0, 20,
                                                                                  1e-9, &err);
    if (!std::isfinite(v)) throw ComputeError("cross-term quadrature produced a non-finite value");
    return v;
}

CapacityResult capacity_detail(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                               const CapacityOptions& options) {
    validate(lb);
    CapacityResult r;
    r.eta1 = link_capacity(fso, lb.mean_snr_fso);
    r.eta2 = link_capacity(rf, lb.mean_snr_rf);
    auto cross = [&](const CascadeSpec& a, double sa, const CascadeSpec& b, double sb, bool& flag) {
        if (!options.force_fallback) {
            try {
                return cross_term(a, sa, b, sb, options.bivariate);
            } catch (const NonConvergent&) {
            }
        }
        flag = true;
        return cross_term_quadrature(a, sa, b, sb);
    };
    r.eta12 = cross(fso, lb.mean_snr_fso, rf, lb.mean_snr_rf, r.eta12_fallback);
    r.eta21 = cross(rf, lb.mean_snr_rf, fso, lb.mean_snr_fso, r.eta21_fallback);
    r.value = r.eta1 + r.eta2 - r.eta12 - r.eta21;
    return r;
}

double capacity(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb) {
    return capacity_detail(fso, rf, lb).value;
}

}  // namespace risfso::metrics
