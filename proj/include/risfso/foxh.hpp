#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace risfso::foxh {

/// One gamma factor descriptor (a_j, A_j) or (b_j, B_j).
struct GammaPair {
    double coeff = 0.0;
    double scale = 1.0;
};

/// Parameters of H^{m,n}_{p,q}[z | (a_j, A_j)_1^p ; (b_j, B_j)_1^q].
///
/// Convention: H(z) = (1 / 2 pi i) \int_L Theta(s) z^{-s} ds with
///
///   Theta(s) = prod_{j<=m} G(b_j + B_j s) prod_{j<=n} G(1 - a_j - A_j s)
///            / ( prod_{j>n} G(a_j + A_j s) prod_{j>m} G(1 - b_j - B_j s) )
///
/// so that Theta is the Mellin transform of H. The first n entries of
/// `upper` and the first m entries of `lower` are the numerator factors.
struct FoxHParams {
    int m = 0;
    int n = 0;
    std::vector<GammaPair> upper;
    std::vector<GammaPair> lower;

    std::size_t p() const { return upper.size(); }
    std::size_t q() const { return lower.size(); }
};

struct ValidationReport {
    bool ok = false;
    std::string message;
    /// Standard Fox-H exponents: a* (vertical-line decay rate), Delta, delta, mu.
    double a_star = 0.0;
    double delta_sum = 0.0;
    double delta_prod = 0.0;
    double mu = 0.0;
    /// Open interval of admissible contour abscissae. -inf/+inf when a
    /// numerator family is empty.
    double anchor_min = 0.0;
    double anchor_max = 0.0;
    std::optional<double> coincident_pole;
};

/// Structural checks plus existence of an absolutely convergent vertical
/// contour. Never throws; failures are carried in the report.
ValidationReport validate(const FoxHParams& params);

/// Relative distance below which two poles count as the same point.
inline constexpr double kPoleCoincidenceTol = 1e-9;

enum class ContourRule { Trapezoid, GaussLegendre };

/// A fixed (non-adaptive) vertical contour.
struct ContourSpec {
    double anchor = 0.0;
    double halfheight = 40.0;
    int nodes = 4096;
    ContourRule rule = ContourRule::Trapezoid;
};

struct EvalOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_levels = 16;
    /// Overrides automatic anchor placement when set.
    std::optional<double> anchor;
};

struct EvalDetail {
    double value = 0.0;
    double anchor = 0.0;
    double step = 0.0;
    double halfheight = 0.0;
    long evaluations = 0;
    int levels = 0;
    /// sum |integrand| * weight; the cancellation scale of the result.
    double l1_norm = 0.0;
};

/// Gamma-ratio kernel Theta(s). Throws PoleHit when s is a pole of a
/// numerator gamma factor; returns 0 when a denominator factor has a pole.
std::complex<double> mellin_integrand(const FoxHParams& params, std::complex<double> s);

/// log Theta(s); real part -inf where Theta vanishes, +inf at a pole.
std::complex<double> log_mellin_integrand(const FoxHParams& params, std::complex<double> s);

/// Adaptive evaluation (contour omitted) or fixed-contour evaluation.
/// Throws InvalidParams, NonConvergent, DomainError (z <= 0).
double eval(const FoxHParams& params, double z, const std::optional<ContourSpec>& contour = std::nullopt);
double eval(const FoxHParams& params, double z, const EvalOptions& options);
EvalDetail eval_detail(const FoxHParams& params, double z, const EvalOptions& options = {});

/// Integral over the full line [-halfheight, halfheight] without using the
/// conjugate symmetry; the imaginary part measures the asymmetry of the
/// quadrature and should vanish for real parameters.
std::complex<double> eval_full_line(const FoxHParams& params, double z, const ContourSpec& contour);

/// Anchor minimising |Theta(c)| z^{-c} inside the admissible interval.
double choose_anchor(const FoxHParams& params, double z);

/// Small-z leading behaviour: sum of the residues of Theta(s) z^{-s} at the
/// first pole of every numerator lower family. Poles that coincide or nearly
/// coincide (within `merge`) are enclosed by one circle and integrated
/// numerically, so logarithmic terms of multiple poles are kept.
double leading_residues(const FoxHParams& params, double z, double merge = 0.05);

// ---------------------------------------------------------------------------
// Bivariate

/// Outer-group factor (a_j; alpha_j, A_j) coupling both contour variables.
struct CoupledGamma {
    double coeff = 0.0;
    double scale1 = 1.0;
    double scale2 = 1.0;
};

/// Two-variable H-function in the standard notation
///
///   H^{0,n1 : m2,n2 ; m3,n3}_{p1,q1 : p2,q2 ; p3,q3}[z1, z2]
///     = (1 / (2 pi i)^2) \int\int phi(s1, s2) th1(s1) th2(s2) z1^{s1} z2^{s2} ds1 ds2
///
///   phi = prod_{j<=n1} G(1 - a_j + alpha_j s1 + A_j s2)
///       / ( prod_{j>n1} G(a_j - alpha_j s1 - A_j s2) prod_j G(1 - b_j + beta_j s1 + B_j s2) )
///
/// and th_k(s) = Theta_k(-s) where Theta_k is the univariate kernel of
/// `first` / `second`. Parameter lists therefore read exactly as they are
/// usually printed.
struct BivariateFoxHParams {
    int outer_n = 0;
    std::vector<CoupledGamma> outer_upper;
    std::vector<CoupledGamma> outer_lower;
    FoxHParams first;
    FoxHParams second;
};

struct BivariateOptions {
    double rel_tol = 1e-6;
    double abs_tol = 1e-12;
    int max_levels = 6;
    long max_evaluations = 40'000'000;
};

struct BivariateDetail {
    double value = 0.0;
    double anchor1 = 0.0;
    double anchor2 = 0.0;
    double step1 = 0.0;
    double step2 = 0.0;
    double halfheight1 = 0.0;
    double halfheight2 = 0.0;
    long evaluations = 0;
};

/// Throws InvalidParams when an inner group fails validation or no contour
/// pair keeps the outer numerator factors analytic; NonConvergent when the
/// refinement budget is exhausted.
double eval_bivariate(const BivariateFoxHParams& params, double z1, double z2,
                      const BivariateOptions& options = {});
BivariateDetail eval_bivariate_detail(const BivariateFoxHParams& params, double z1, double z2,
                                      const BivariateOptions& options = {});

}  // namespace risfso::foxh
