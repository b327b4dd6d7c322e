#include "risfso/foxh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "foxh_kernel.hpp"
#include "risfso/errors.hpp"

namespace risfso::foxh {

using cd = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kMaxHalfheight = 1e5;
constexpr double kTailRatio = 1e-17;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::string describe_structure_error(const FoxHParams& p) {
    if (p.m < 0 || p.n < 0) return "orders m, n must be nonnegative";
    if (static_cast<std::size_t>(p.m) > p.q()) return "m exceeds q";
    if (static_cast<std::size_t>(p.n) > p.p()) return "n exceeds p";
    for (const auto& g : p.upper) {
        if (!std::isfinite(g.coeff)) return "non-finite upper coefficient";
        if (!finite_positive(g.scale)) return "upper scale A_j must be positive";
    }
    for (const auto& g : p.lower) {
        if (!std::isfinite(g.coeff)) return "non-finite lower coefficient";
        if (!finite_positive(g.scale)) return "lower scale B_j must be positive";
    }
    return {};
}

// Enumerates the left family (poles of numerator lower gammas) and the right
// family (poles of numerator upper gammas) inside the overlap window and
// reports the first pair closer than the coincidence tolerance.
std::optional<double> find_coincident_pole(const FoxHParams& p, double left_max, double right_min) {
    const double lo = right_min - kPoleCoincidenceTol;
    const double hi = left_max + kPoleCoincidenceTol;
    std::vector<double> left;
    std::vector<double> right;
    constexpr int kMaxPoles = 20000;
    for (int j = 0; j < p.m; ++j) {
        const auto& g = p.lower[j];
        for (int k = 0; k < kMaxPoles; ++k) {
            const double pole = -(g.coeff + k) / g.scale;
            if (pole < lo) break;
            if (pole <= hi) left.push_back(pole);
        }
    }
    for (int j = 0; j < p.n; ++j) {
        const auto& g = p.upper[j];
        for (int k = 0; k < kMaxPoles; ++k) {
            const double pole = (1.0 - g.coeff + k) / g.scale;
            if (pole > hi) break;
            if (pole >= lo) right.push_back(pole);
        }
    }
    for (double a : left)
        for (double b : right)
            if (std::abs(a - b) <= kPoleCoincidenceTol) return a;
    return std::nullopt;
}

void require_valid(const FoxHParams& params, ValidationReport& report) {
    report = validate(params);
    if (!report.ok) throw InvalidParams("Fox-H parameters rejected: " + report.message);
}

// Integrand on the line Re s = c, scaled by exp(-ref) to keep magnitudes in
// range: returns g(t) * exp(-ref) and writes |.| to mag.
inline cd scaled_integrand(const detail::Kernel& k, double c, double t, double lnz, double ref, double& mag) {
    const cd s(c, t);
    const cd lg = k.log_theta(s) - s * lnz;
    const double re = lg.real() - ref;
    if (!(re > -745.0)) {
        mag = 0.0;
        return 0.0;
    }
    mag = std::exp(re);
    return std::polar(mag, lg.imag());
}

struct MarchResult {
    double sum = 0.0;
    double l1 = 0.0;
    long count = 0;
    double t_last = 0.0;
};

// Sum of Re g(t0 + k h), k = 0, 1, ... until the envelope falls below
// kTailRatio * peak for several consecutive nodes.
MarchResult march(const detail::Kernel& k, double c, double lnz, double ref, double t0, double h,
                  double& peak, double t_min) {
    MarchResult r;
    int below = 0;
    for (long i = 0;; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        if (t > kMaxHalfheight) throw NonConvergent("Fox-H contour integrand does not decay");
        double mag = 0.0;
        const cd g = scaled_integrand(k, c, t, lnz, ref, mag);
        r.sum += g.real();
        r.l1 += mag;
        ++r.count;
        peak = std::max(peak, mag);
        if (t > t_min && mag <= kTailRatio * peak) {
            if (++below >= 4) {
                r.t_last = t;
                break;
            }
        } else {
            below = 0;
        }
    }
    return r;
}

double pole_distance(double c, double left, double right) {
    double d = kInf;
    if (std::isfinite(left)) d = std::min(d, c - left);
    if (std::isfinite(right)) d = std::min(d, right - c);
    return std::isfinite(d) ? d : 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Kernel

namespace detail {

Kernel::Kernel(const FoxHParams& p) {
    for (std::size_t j = 0; j < p.q(); ++j) {
        const auto& g = p.lower[j];
        if (static_cast<int>(j) < p.m)
            terms_.push_back({g.coeff, g.scale, +1});  // G(b + B s)
        else
            terms_.push_back({1.0 - g.coeff, -g.scale, -1});  // 1/G(1 - b - B s)
    }
    for (std::size_t j = 0; j < p.p(); ++j) {
        const auto& g = p.upper[j];
        if (static_cast<int>(j) < p.n)
            terms_.push_back({1.0 - g.coeff, -g.scale, +1});  // G(1 - a - A s)
        else
            terms_.push_back({g.coeff, g.scale, -1});  // 1/G(a + A s)
    }
}

cd Kernel::log_theta(cd s) const {
    cd acc = 0.0;
    for (const auto& t : terms_) {
        const cd arg = t.offset + t.slope * s;
        if (is_gamma_pole(arg, 0.0)) {
            if (t.sign > 0) return {kInf, 0.0};
            return {-kInf, 0.0};
        }
        if (t.sign > 0)
            acc += log_gamma(arg);
        else
            acc -= log_gamma(arg);
    }
    return acc;
}

bool Kernel::numerator_pole(cd s, double tol) const {
    for (const auto& t : terms_)
        if (t.sign > 0 && is_gamma_pole(t.offset + t.slope * s, tol)) return true;
    return false;
}

double minimise_scan(const std::function<double(double)>& f, double lo, double hi, int samples) {
    double best_x = lo;
    double best_f = kInf;
    int best_i = 0;
    const double step = (hi - lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double x = lo + step * i;
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
            best_i = i;
        }
    }
    if (!std::isfinite(best_f)) return 0.5 * (lo + hi);
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);
    (void)best_i;
    // golden section on the bracket
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    const double x = 0.5 * (a + b);
    return f(x) <= best_f ? x : best_x;
}

double anchor_objective(const Kernel& k, double c, double lnz) {
    cd lg = k.log_theta(cd(c, 0.0));
    if (lg.real() == -kInf) lg = k.log_theta(cd(c, 0.5));
    const double v = lg.real() - c * lnz;
    return std::isnan(v) ? kInf : v;
}

double choose_anchor_in(const Kernel& k, double left, double right, double lnz) {
    auto f = [&](double c) { return anchor_objective(k, c, lnz); };
    if (std::isfinite(left) && std::isfinite(right)) {
        const double w = right - left;
        return minimise_scan(f, left + 1e-3 * w, right - 1e-3 * w, 64);
    }
    // One or both sides open: widen the window while the minimum sits on the
    // artificial boundary.
    double span = 8.0;
    for (;;) {
        double lo, hi;
        if (std::isfinite(left)) {
            lo = left + 1e-3;
            hi = left + span;
        } else if (std::isfinite(right)) {
            lo = right - span;
            hi = right - 1e-3;
        } else {
            lo = -span;
            hi = span;
        }
        const double c = minimise_scan(f, lo, hi, 96);
        const double edge = (hi - lo) / 95.0;
        const bool at_hi = !std::isfinite(right) && c > hi - edge;
        const bool at_lo = !std::isfinite(left) && c < lo + edge;
        if ((!at_hi && !at_lo) || span > 4096.0) return c;
        span *= 4.0;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------

ValidationReport validate(const FoxHParams& params) {
    ValidationReport r;
    r.anchor_min = -kInf;
    r.anchor_max = kInf;
    if (auto err = describe_structure_error(params); !err.empty()) {
        r.message = err;
        return r;
    }
    double prod = 1.0;
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::size_t j = 0; j < params.p(); ++j) {
        const auto& g = params.upper[j];
        r.a_star += (static_cast<int>(j) < params.n ? 1.0 : -1.0) * g.scale;
        r.delta_sum -= g.scale;
        prod *= std::pow(g.scale, -g.scale);
        sum_a += g.coeff;
    }
    for (std::size_t j = 0; j < params.q(); ++j) {
        const auto& g = params.lower[j];
        r.a_star += (static_cast<int>(j) < params.m ? 1.0 : -1.0) * g.scale;
        r.delta_sum += g.scale;
        prod *= std::pow(g.scale, g.scale);
        sum_b += g.coeff;
    }
    r.delta_prod = prod;
    r.mu = sum_b - sum_a + (static_cast<double>(params.p()) - static_cast<double>(params.q())) / 2.0;

    for (int j = 0; j < params.m; ++j)
        r.anchor_min = std::max(r.anchor_min, -params.lower[j].coeff / params.lower[j].scale);
    for (int j = 0; j < params.n; ++j)
        r.anchor_max = std::min(r.anchor_max, (1.0 - params.upper[j].coeff) / params.upper[j].scale);

    if (!(r.anchor_max - r.anchor_min > kPoleCoincidenceTol)) {
        r.coincident_pole = find_coincident_pole(params, r.anchor_min, r.anchor_max);
        std::ostringstream os;
        os.precision(12);
        if (r.coincident_pole)
            os << "numerator pole families coincide at s = " << *r.coincident_pole;
        else
            os << "numerator pole families overlap on [" << r.anchor_max << ", " << r.anchor_min
               << "]; no vertical contour separates them";
        r.message = os.str();
        return r;
    }
    if (!(r.a_star > 0.0)) {
        std::ostringstream os;
        os << "a* = " << r.a_star << " <= 0; the vertical Mellin-Barnes contour does not converge";
        r.message = os.str();
        return r;
    }
    r.ok = true;
    r.message = "ok";
    return r;
}

cd log_mellin_integrand(const FoxHParams& params, cd s) { return detail::Kernel(params).log_theta(s); }

cd mellin_integrand(const FoxHParams& params, cd s) {
    const detail::Kernel k(params);
    if (k.numerator_pole(s, 1e-12)) {
        std::ostringstream os;
        os << "s = " << s << " is a pole of a numerator gamma factor";
        throw PoleHit(os.str());
    }
    const cd lg = k.log_theta(s);
    if (lg.real() == -kInf) return 0.0;
    return std::exp(lg);
}

double choose_anchor(const FoxHParams& params, double z) {
    ValidationReport rep;
    require_valid(params, rep);
    if (!(z > 0.0)) throw DomainError("Fox-H argument must be positive");
    return detail::choose_anchor_in(detail::Kernel(params), rep.anchor_min, rep.anchor_max, std::log(z));
}

EvalDetail eval_detail(const FoxHParams& params, double z, const EvalOptions& options) {
    ValidationReport rep;
    require_valid(params, rep);
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("Fox-H argument must be positive and finite");

    const detail::Kernel k(params);
    const double lnz = std::log(z);
    EvalDetail d;
    d.anchor = options.anchor ? *options.anchor
                              : detail::choose_anchor_in(k, rep.anchor_min, rep.anchor_max, lnz);
    if (!(d.anchor > rep.anchor_min && d.anchor < rep.anchor_max))
        throw InvalidParams("contour anchor outside the admissible interval");

    const double c = d.anchor;
    const double dist = pole_distance(c, rep.anchor_min, rep.anchor_max);
    const double alnz = std::abs(lnz);
    double h = std::min({1.0, 4.0 * kPi * dist / (25.0 + dist * alnz), 2.0 * kPi / (alnz + 2.0)});

    const double ref = (k.log_theta(cd(c, 0.0)) - c * lnz).real();
    const double scale_ref = std::isfinite(ref) ? ref : 0.0;
    const double t_min = 2.0 / rep.a_star;

    double peak = 0.0;
    MarchResult first = march(k, c, lnz, scale_ref, 0.0, h, peak, t_min);
    double g0_mag = 0.0;
    const double g0 = scaled_integrand(k, c, 0.0, lnz, scale_ref, g0_mag).real();
    double raw = first.sum - 0.5 * g0;  // sum with half weight at t = 0
    double l1 = first.l1 - 0.5 * g0_mag;
    double estimate = h * raw / kPi;
    d.evaluations = first.count;
    d.halfheight = first.t_last;

    const double out_scale = std::exp(scale_ref);
    for (int level = 1; level <= options.max_levels; ++level) {
        MarchResult odd = march(k, c, lnz, scale_ref, 0.5 * h, h, peak, t_min);
        d.evaluations += odd.count;
        d.halfheight = std::max(d.halfheight, odd.t_last);
        raw += odd.sum;
        l1 += odd.l1;
        h *= 0.5;
        const double next = h * raw / kPi;
        const double diff = std::abs(next - estimate) * out_scale;
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * h * l1 / kPi * out_scale;
        estimate = next;
        const double value = next * out_scale;
        if (diff <= std::max({options.rel_tol * std::abs(value), options.abs_tol, noise})) {
            d.value = value;
            d.step = h;
            d.levels = level;
            d.l1_norm = h * l1 / kPi * out_scale;
            return d;
        }
    }
    std::ostringstream os;
    os << "Fox-H refinement limit reached at z = " << z << " (anchor " << c << ")";
    throw NonConvergent(os.str());
}

double eval(const FoxHParams& params, double z, const EvalOptions& options) {
    return eval_detail(params, z, options).value;
}

namespace {

void check_contour(const ContourSpec& contour, const ValidationReport& rep) {
    if (contour.nodes < 16) throw InvalidParams("contour needs at least 16 nodes");
    if (!(contour.halfheight > 0.0)) throw InvalidParams("contour halfheight must be positive");
    if (!(contour.anchor > rep.anchor_min && contour.anchor < rep.anchor_max))
        throw InvalidParams("contour anchor does not separate the pole families");
}

}  // namespace

double eval(const FoxHParams& params, double z, const std::optional<ContourSpec>& contour) {
    if (!contour) return eval_detail(params, z).value;
    ValidationReport rep;
    require_valid(params, rep);
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("Fox-H argument must be positive and finite");
    check_contour(*contour, rep);

    const detail::Kernel k(params);
    const double lnz = std::log(z);
    const double c = contour->anchor;
    const double ref = (k.log_theta(cd(c, 0.0)) - c * lnz).real();
    const double scale_ref = std::isfinite(ref) ? ref : 0.0;
    double mag = 0.0;
    double sum = 0.0;
    if (contour->rule == ContourRule::Trapezoid) {
        const int n = contour->nodes;
        const double h = contour->halfheight / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
            sum += w * scaled_integrand(k, c, i * h, lnz, scale_ref, mag).real();
        }
    } else {
        constexpr unsigned kPanel = 20;
        using rule = boost::math::quadrature::gauss<double, kPanel>;
        const int panels = (contour->nodes + static_cast<int>(kPanel) - 1) / static_cast<int>(kPanel);
        const double width = contour->halfheight / panels;
        const auto& x = rule::abscissa();
        const auto& w = rule::weights();
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double mid = (pnl + 0.5) * width;
            const double half = 0.5 * width;
            for (std::size_t i = 0; i < x.size(); ++i) {
                // abscissae are stored for the nonnegative half; x[0] == 0 for odd rules only
                const double xs[2] = {x[i], -x[i]};
                const int copies = (x[i] == 0.0) ? 1 : 2;
                for (int cpy = 0; cpy < copies; ++cpy)
                    sum += w[i] * half * scaled_integrand(k, c, mid + half * xs[cpy], lnz, scale_ref, mag).real();
            }
        }
    }
    return sum / kPi * std::exp(scale_ref);
}

cd eval_full_line(const FoxHParams& params, double z, const ContourSpec& contour) {
    ValidationReport rep;
    require_valid(params, rep);
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("Fox-H argument must be positive and finite");
    check_contour(contour, rep);
    const detail::Kernel k(params);
    const double lnz = std::log(z);
    const double c = contour.anchor;
    const double ref = (k.log_theta(cd(c, 0.0)) - c * lnz).real();
    const double scale_ref = std::isfinite(ref) ? ref : 0.0;
    const int n = contour.nodes;
    const double h = 2.0 * contour.halfheight / (n - 1);
    cd sum = 0.0;
    double mag = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = -contour.halfheight + i * h;
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        sum += w * scaled_integrand(k, c, t, lnz, scale_ref, mag);
    }
    return sum / (2.0 * kPi) * std::exp(scale_ref);
}

}  // namespace risfso::foxh
