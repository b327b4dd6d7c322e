#pragma once

#include <optional>
#include <span>
#include <vector>

#include "risfso/foxh.hpp"

namespace risfso::channels {

/// Generalized Gamma GG(alpha, beta, Omega):
///   f(x) = alpha x^{alpha beta - 1} / ((Omega/beta)^beta Gamma(beta)) exp(-(beta/Omega) x^alpha)
struct GenGammaParams {
    double alpha = 1.0;
    double beta = 1.0;
    double omega = 1.0;

    /// Omega from the second moment E[chi^2].
    static GenGammaParams from_second_moment(double alpha, double beta, double second_moment);
};

/// Product chi1 * chi2 of independent generalized-Gamma variates.
struct DGGParams {
    GenGammaParams first;
    GenGammaParams second;
};

/// Zero-boresight misalignment with density rho2 / a0^rho2 x^{rho2 - 1} on [0, a0].
struct PointingErrorParams {
    double a0 = 1.0;
    double rho2 = 1.0;
};

/// Physical quantities that determine PointingErrorParams for an optical RIS hop.
struct PointingGeometry {
    double aperture_radius = 0.0;
    double beam_width = 0.0;
    double equivalent_beam_width = 0.0;
    double sigma_theta = 0.0;  ///< pointing jitter std (rad)
    double sigma_beta = 0.0;   ///< RIS jitter std (rad)
    double d1 = 0.0;
    double d2 = 0.0;
};

/// One multiplicative channel factor. FSO hops carry pointing errors.
struct Hop {
    DGGParams fading;
    std::optional<PointingErrorParams> pointing;
};

/// Ordered per-factor descriptors of one cascaded link; K = hops.size().
struct CascadeSpec {
    std::vector<Hop> hops;
    std::size_t size() const { return hops.size(); }
};

void validate(const GenGammaParams& p);
void validate(const DGGParams& p);
void validate(const PointingErrorParams& p);
void validate(const CascadeSpec& spec);

double gg_pdf(const GenGammaParams& p, double x);
/// Closed-form CDF via the regularized incomplete gamma function.
double gg_cdf(const GenGammaParams& p, double x);

double pe_pdf(const PointingErrorParams& p, double x);
double pe_cdf(const PointingErrorParams& p, double x);

/// A0 = erf(v)^2 with v = sqrt(pi/2) a_r / w_z; rho2 = w_zeq^2 / xi with
/// xi = 4 sigma_theta^2 d1^2 + 16 sigma_beta^2 d2^2. rho2 is +inf in the
/// no-jitter limit. Throws DomainError for nonpositive lengths or xi = 0.
PointingErrorParams pe_from_geometry(const PointingGeometry& g);

/// Density of X_i = psi x^{phi - 1} H[zeta x | kernel], the per-factor form
/// consumed by the product formulas.
struct ProductFactor {
    double prefactor = 1.0;
    double power = 1.0;
    double scale = 1.0;
    foxh::FoxHParams kernel;

    double pdf(double x) const;
};

/// dGG density as a single ProductFactor (x^{alpha2 beta2 - 1} H^{2,0}_{0,2} form).
ProductFactor dgg_factor(const DGGParams& p);
/// dGG times pointing error as a ProductFactor (H^{3,0}_{1,3} form).
ProductFactor dgg_pe_factor(const DGGParams& p, const PointingErrorParams& pe);

double dgg_pdf(const DGGParams& p, double x);
double dgg_pe_pdf(const DGGParams& p, const PointingErrorParams& pe, double x);

/// Collapsed representation c * x^{-shift} H[u x | kernel]. A product PDF
/// has shift = 1, a CDF has shift = 0.
struct FoxHForm {
    double constant = 1.0;
    double scale = 1.0;
    double shift = 0.0;
    foxh::FoxHParams kernel;

    double operator()(double x) const;
    /// Limit at x -> 0+ from the leading left pole: 0, +inf, or a finite value.
    double limit_at_zero() const;
};

/// Stacks K factors into the product density (shift 1) and CDF (shift 0).
FoxHForm product_pdf_form(std::span<const ProductFactor> factors);
FoxHForm product_cdf_form(std::span<const ProductFactor> factors);
double product_pdf(std::span<const ProductFactor> factors, double x);
double product_cdf(std::span<const ProductFactor> factors, double x);

/// PDF and CDF evaluators of a cascaded link. Immutable once built; safe to
/// share between threads.
class CascadeDistribution {
public:
    CascadeDistribution(FoxHForm pdf, FoxHForm cdf, double psi, double u);

    double pdf(double x) const;
    double cdf(double x) const;

    const FoxHForm& pdf_form() const { return pdf_; }
    const FoxHForm& cdf_form() const { return cdf_; }
    /// Leading constant psi and argument scale U of the cascade.
    double psi() const { return psi_; }
    double u() const { return u_; }

private:
    FoxHForm pdf_;
    FoxHForm cdf_;
    double psi_;
    double u_;
};

/// Cascade with pointing errors on every hop (H^{3K,0}_{K,3K} family).
/// Throws SpecError if a hop lacks pointing errors.
CascadeDistribution cascade_fso(const CascadeSpec& spec);
/// Cascade of plain dGG hops (H^{2K,0}_{0,2K} family).
/// Throws SpecError if a hop carries pointing errors.
CascadeDistribution cascade_rf(const CascadeSpec& spec);
/// Dispatches on the pointing-error presence of the first hop.
CascadeDistribution cascade(const CascadeSpec& spec);

/// Closed-form r-th moments. Throw StripError when r leaves the strip.
double moment(const GenGammaParams& p, double r);
double moment(const DGGParams& p, double r);
double moment(const PointingErrorParams& p, double r);
double moment(const Hop& hop, double r);
double moment(const CascadeSpec& spec, double r);

/// Moment of a ProductFactor assembled from the Mellin kernel.
double factor_moment(const ProductFactor& f, double r);

}  // namespace risfso::channels
