#pragma once

#include "risfso/channels.hpp"

namespace risfso::metrics {

using channels::CascadeSpec;

double db_to_linear(double db);
double linear_to_db(double x);

/// Mean SNRs of the two links of the DF relay, linear scale.
struct LinkBudget {
    double mean_snr_fso = 1.0;
    double mean_snr_rf = 1.0;

    /// Same transmit power on both links. Under IM/DD the optical SNR grows
    /// with the square of the power:
    ///   snr_fso[dB] = 2 P[dBm] + 20 log10 h_l - N_fso
    ///   snr_rf[dB]  =   P[dBm] + 20 log10 g_l - N_rf
    static LinkBudget from_power(double power_dbm, double fso_path_gain = 1.0, double fso_noise_dbm = -104.4,
                                 double rf_path_gain = 1.0, double rf_noise_dbm = -104.4);
};

void validate(const LinkBudget& lb);

struct ModulationParams {
    double p = 1.0;
    double q = 1.0;
};

struct ThresholdSpec {
    double gamma_th = 1.0;
};

/// CDF of gamma = mean_snr * h^2 for a cascaded link h.
double link_snr_cdf(const CascadeSpec& link, double mean_snr, double gamma);
/// Density of gamma = mean_snr * h^2.
double link_snr_pdf(const CascadeSpec& link, double mean_snr, double gamma);

/// End-to-end DF SNR CDF, F_fso + F_rf - F_fso F_rf.
double snr_cdf(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb, double gamma);
/// The same CDF as 1 - (1 - F_fso)(1 - F_rf).
double snr_cdf_survival_form(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb, double gamma);

double outage(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb, const ThresholdSpec& th);

enum class AsymptoticPath { ClosedForm, NumericalResidue };

struct AsymptoticResult {
    double value = 0.0;
    AsymptoticPath path = AsymptoticPath::ClosedForm;
};

/// High-SNR outage from the first-order residues of every exponent family.
/// The closed form needs distinct exponents and throws DegenerateExponents
/// otherwise; the automatic variant then switches to numerical residues.
double outage_asymptotic_closed(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                                const ThresholdSpec& th);
double outage_asymptotic_residue(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                                 const ThresholdSpec& th);
AsymptoticResult outage_asymptotic_detail(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                                          const ThresholdSpec& th);
double outage_asymptotic(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                         const ThresholdSpec& th);

/// min over hops of {a1 b1, a2 b2, rho^2, a3 b3, a4 b4} / 2.
double diversity_order(const CascadeSpec& fso, const CascadeSpec& rf);

/// Average BER of one link for the conditional error Gamma(p, q gamma) / (2 Gamma(p)).
double avg_ber_link(const CascadeSpec& link, double mean_snr, const ModulationParams& mod);
double avg_ber_fso(const CascadeSpec& fso, const LinkBudget& lb, const ModulationParams& mod);
double avg_ber_rf(const CascadeSpec& rf, const LinkBudget& lb, const ModulationParams& mod);
double avg_ber_df(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb, const ModulationParams& mod);

struct CapacityResult {
    double value = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double eta12 = 0.0;
    double eta21 = 0.0;
    /// Set when a cross term came from direct quadrature instead of the
    /// bivariate H-function.
    bool eta12_fallback = false;
    bool eta21_fallback = false;
    bool fallback() const { return eta12_fallback || eta21_fallback; }
};

struct CapacityOptions {
    foxh::BivariateOptions bivariate;
    /// Skip the bivariate evaluator and integrate the cross terms directly.
    bool force_fallback = false;
};

/// E[log2(1 + gamma)] of one link, gamma = mean_snr h^2.
double link_capacity(const CascadeSpec& link, double mean_snr);

/// E[log2(1 + gamma_a) 1{F_b}] cross term: integral of log2(1+g) f_a(g) F_b(g).
double cross_term(const CascadeSpec& a, double snr_a, const CascadeSpec& b, double snr_b,
                  const foxh::BivariateOptions& options = {});
double cross_term_quadrature(const CascadeSpec& a, double snr_a, const CascadeSpec& b, double snr_b);

CapacityResult capacity_detail(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb,
                               const CapacityOptions& options = {});
double capacity(const CascadeSpec& fso, const CascadeSpec& rf, const LinkBudget& lb);

}  // namespace risfso::metrics
