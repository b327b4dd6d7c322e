#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "foxh_kernel.hpp"
#include "risfso/errors.hpp"
#include "risfso/foxh.hpp"

namespace risfso::foxh {

using cd = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Outer factors rewritten in the u = -s variables used for integration:
// sign * logG(offset + slope1 u1 + slope2 u2).
struct OuterTerm {
    double offset;
    double slope1;
    double slope2;
    int sign;
};

std::vector<OuterTerm> outer_terms(const BivariateFoxHParams& p) {
    std::vector<OuterTerm> out;
    for (std::size_t j = 0; j < p.outer_upper.size(); ++j) {
        const auto& g = p.outer_upper[j];
        if (static_cast<int>(j) < p.outer_n)
            out.push_back({1.0 - g.coeff, -g.scale1, -g.scale2, +1});
        else
            out.push_back({g.coeff, g.scale1, g.scale2, -1});
    }
    for (const auto& g : p.outer_lower) out.push_back({1.0 - g.coeff, -g.scale1, -g.scale2, -1});
    return out;
}

cd log_outer(const std::vector<OuterTerm>& terms, cd u1, cd u2) {
    cd acc = 0.0;
    for (const auto& t : terms) {
        const cd arg = t.offset + t.slope1 * u1 + t.slope2 * u2;
        if (is_gamma_pole(arg, 0.0)) return {t.sign > 0 ? kInf : -kInf, 0.0};
        if (t.sign > 0)
            acc += log_gamma(arg);
        else
            acc -= log_gamma(arg);
    }
    return acc;
}

// Smallest real part of a numerator outer argument at (c1, c2).
double outer_margin(const std::vector<OuterTerm>& terms, double c1, double c2) {
    double m = kInf;
    for (const auto& t : terms)
        if (t.sign > 0) m = std::min(m, t.offset + t.slope1 * c1 + t.slope2 * c2);
    return m;
}

struct Box {
    double lo;
    double hi;
};

Box search_box(double left, double right) {
    if (std::isfinite(left) && std::isfinite(right)) {
        const double w = right - left;
        return {left + 1e-3 * w, right - 1e-3 * w};
    }
    if (std::isfinite(left)) return {left + 1e-3, left + 8.0};
    if (std::isfinite(right)) return {right - 8.0, right - 1e-3};
    return {-8.0, 8.0};
}

double step_for(double dist, double lnz) {
    const double a = std::abs(lnz);
    return std::min({1.0, 4.0 * kPi * dist / (25.0 + dist * a), 2.0 * kPi / (a + 2.0)});
}

}  // namespace

BivariateDetail eval_bivariate_detail(const BivariateFoxHParams& params, double z1, double z2,
                                      const BivariateOptions& options) {
    const ValidationReport rep1 = validate(params.first);
    const ValidationReport rep2 = validate(params.second);
    if (!rep1.ok) throw InvalidParams("bivariate first group rejected: " + rep1.message);
    if (!rep2.ok) throw InvalidParams("bivariate second group rejected: " + rep2.message);
    for (const auto& g : params.outer_upper)
        if (!std::isfinite(g.coeff) || !std::isfinite(g.scale1) || !std::isfinite(g.scale2))
            throw InvalidParams("non-finite outer coefficient");
    for (const auto& g : params.outer_lower)
        if (!std::isfinite(g.coeff) || !std::isfinite(g.scale1) || !std::isfinite(g.scale2))
            throw InvalidParams("non-finite outer coefficient");
    if (params.outer_n < 0 || static_cast<std::size_t>(params.outer_n) > params.outer_upper.size())
        throw InvalidParams("outer order n1 out of range");
    if (!(z1 > 0.0) || !(z2 > 0.0) || !std::isfinite(z1) || !std::isfinite(z2))
        throw DomainError("bivariate Fox-H arguments must be positive and finite");

    const detail::Kernel k1(params.first);
    const detail::Kernel k2(params.second);
    const auto outer = outer_terms(params);
    const double lnz1 = std::log(z1);
    const double lnz2 = std::log(z2);

    auto objective = [&](double c1, double c2) {
        if (outer_margin(outer, c1, c2) <= 0.0) return kInf;
        const double v = (log_outer(outer, c1, c2) + k1.log_theta(c1) + k2.log_theta(c2)).real() -
                         c1 * lnz1 - c2 * lnz2;
        return std::isnan(v) ? kInf : v;
    };

    // Anchor pair: coarse grid, then coordinate-wise golden refinement.
    const Box b1 = search_box(rep1.anchor_min, rep1.anchor_max);
    const Box b2 = search_box(rep2.anchor_min, rep2.anchor_max);
    constexpr int kGrid = 41;
    double c1 = 0.0, c2 = 0.0, best = kInf;
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            const double x = b1.lo + (b1.hi - b1.lo) * i / (kGrid - 1);
            const double y = b2.lo + (b2.hi - b2.lo) * j / (kGrid - 1);
            const double v = objective(x, y);
            if (v < best) {
                best = v;
                c1 = x;
                c2 = y;
            }
        }
    }
    if (!std::isfinite(best))
        throw InvalidParams("no contour pair keeps the coupled numerator gamma factors analytic");
    for (int sweep = 0; sweep < 4; ++sweep) {
        const double y = c2;
        c1 = detail::minimise_scan([&](double x) { return objective(x, y); }, b1.lo, b1.hi, 48);
        const double x = c1;
        c2 = detail::minimise_scan([&](double yy) { return objective(x, yy); }, b2.lo, b2.hi, 48);
    }

    double d1 = kInf, d2 = kInf;
    if (std::isfinite(rep1.anchor_min)) d1 = std::min(d1, c1 - rep1.anchor_min);
    if (std::isfinite(rep1.anchor_max)) d1 = std::min(d1, rep1.anchor_max - c1);
    if (std::isfinite(rep2.anchor_min)) d2 = std::min(d2, c2 - rep2.anchor_min);
    if (std::isfinite(rep2.anchor_max)) d2 = std::min(d2, rep2.anchor_max - c2);
    for (const auto& t : outer) {
        if (t.sign < 0) continue;
        const double arg = t.offset + t.slope1 * c1 + t.slope2 * c2;
        if (t.slope1 != 0.0) d1 = std::min(d1, arg / std::abs(t.slope1));
        if (t.slope2 != 0.0) d2 = std::min(d2, arg / std::abs(t.slope2));
    }
    if (!std::isfinite(d1)) d1 = 1.0;
    if (!std::isfinite(d2)) d2 = 1.0;

    const double ref = (log_outer(outer, c1, c2) + k1.log_theta(c1) + k2.log_theta(c2)).real() -
                       c1 * lnz1 - c2 * lnz2;
    const double scale_ref = std::isfinite(ref) ? ref : 0.0;

    auto log_integrand = [&](cd u1, cd u2, cd l1, cd l2) {
        return log_outer(outer, u1, u2) + l1 + l2 - u1 * lnz1 - u2 * lnz2 - scale_ref;
    };

    // Axis truncation from the envelope along each axis.
    auto axis_extent = [&](int axis, double h) {
        double peak = 0.0;
        int below = 0;
        for (int i = 0;; ++i) {
            const double t = i * h;
            if (t > 1e4) throw NonConvergent("bivariate integrand does not decay");
            const cd u1 = axis == 0 ? cd(c1, t) : cd(c1, 0.0);
            const cd u2 = axis == 1 ? cd(c2, t) : cd(c2, 0.0);
            const double re = log_integrand(u1, u2, k1.log_theta(u1), k2.log_theta(u2)).real();
            const double mag = re > -745.0 ? std::exp(re) : 0.0;
            peak = std::max(peak, mag);
            if (t > 1.0 && mag < 1e-17 * peak) {
                if (++below >= 4) return t;
            } else {
                below = 0;
            }
        }
    };

    BivariateDetail d;
    d.anchor1 = c1;
    d.anchor2 = c2;
    double h1 = step_for(d1, lnz1);
    double h2 = step_for(d2, lnz2);
    double T1 = axis_extent(0, h1);
    double T2 = axis_extent(1, h2);

    const double out_scale = std::exp(scale_ref);
    double previous = std::numeric_limits<double>::quiet_NaN();
    int level = 0;
    while (level <= options.max_levels) {
        const long n1 = static_cast<long>(std::ceil(T1 / h1));
        const long n2 = static_cast<long>(std::ceil(T2 / h2));
        if (d.evaluations + (n1 + 1) * (2 * n2 + 1) > options.max_evaluations)
            throw NonConvergent("bivariate Fox-H evaluation budget exhausted");

        std::vector<cd> row1(n1 + 1), col2(2 * n2 + 1);
        for (long i = 0; i <= n1; ++i) row1[i] = k1.log_theta(cd(c1, i * h1));
        for (long j = -n2; j <= n2; ++j) col2[j + n2] = k2.log_theta(cd(c2, j * h2));

        double sum = 0.0, l1 = 0.0, peak = 0.0, edge = 0.0;
        for (long i = 0; i <= n1; ++i) {
            const double w1 = (i == 0) ? 0.5 * h1 : h1;
            const cd u1(c1, i * h1);
            for (long j = -n2; j <= n2; ++j) {
                const cd u2(c2, j * h2);
                const cd lg = log_integrand(u1, u2, row1[i], col2[j + n2]);
                if (!(lg.real() > -745.0)) continue;
                const double mag = std::exp(lg.real());
                sum += w1 * h2 * mag * std::cos(lg.imag());
                l1 += w1 * h2 * mag;
                peak = std::max(peak, mag);
                if (i == n1 || j == -n2 || j == n2) edge = std::max(edge, mag);
            }
        }
        d.evaluations += (n1 + 1) * (2 * n2 + 1);

        if (edge > 1e-15 * peak) {
            // Grow the box along whichever edges are still significant.
            T1 *= 1.5;
            T2 *= 1.5;
            continue;
        }

        const double value = sum / (2.0 * kPi * kPi) * out_scale;
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * l1 / (2.0 * kPi * kPi) * out_scale;
        d.value = value;
        d.step1 = h1;
        d.step2 = h2;
        d.halfheight1 = T1;
        d.halfheight2 = T2;
        if (std::isfinite(previous) &&
            std::abs(value - previous) <= std::max({options.rel_tol * std::abs(value), options.abs_tol, noise}))
            return d;
        previous = value;
        h1 *= 0.5;
        h2 *= 0.5;
        ++level;
    }
    std::ostringstream os;
    os << "bivariate Fox-H refinement limit reached at (" << z1 << ", " << z2 << ")";
    throw NonConvergent(os.str());
}

double eval_bivariate(const BivariateFoxHParams& params, double z1, double z2, const BivariateOptions& options) {
    return eval_bivariate_detail(params, z1, z2, options).value;
}

}  // namespace risfso::foxh
