#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "foxh_kernel.hpp"
#include "risfso/errors.hpp"
#include "risfso/foxh.hpp"

namespace risfso::foxh {

using cd = std::complex<double>;

namespace {

struct Cluster {
    double lo;
    double hi;
};

// (1 / 2 pi i) \oint Theta(s) z^{-s} ds over a circle, trapezoid in the angle,
// scaled by exp(-ref).
cd circle_integral(const detail::Kernel& k, double centre, double radius, double lnz, double ref, int nodes) {
    cd acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double th = 2.0 * std::numbers::pi * (i + 0.5) / nodes;
        const cd e = std::polar(1.0, th);
        const cd s = centre + radius * e;
        const cd lg = k.log_theta(s) - s * lnz - ref;
        if (lg.real() == -std::numeric_limits<double>::infinity()) continue;
        acc += std::exp(lg) * radius * e;
    }
    return acc / static_cast<double>(nodes);
}

}  // namespace

double leading_residues(const FoxHParams& params, double z, double merge) {
    const ValidationReport rep = validate(params);
    if (!rep.ok) throw InvalidParams("leading_residues: " + rep.message);
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("Fox-H argument must be positive and finite");
    if (params.m == 0) return 0.0;

    std::vector<double> firsts;
    for (int j = 0; j < params.m; ++j) firsts.push_back(-params.lower[j].coeff / params.lower[j].scale);
    const double deepest = *std::min_element(firsts.begin(), firsts.end());

    // Every left pole down to a little below the deepest leading pole.
    std::vector<double> left;
    for (int j = 0; j < params.m; ++j) {
        const auto& g = params.lower[j];
        for (int kk = 0;; ++kk) {
            const double s = -(g.coeff + kk) / g.scale;
            if (s < deepest - 2.0 * merge - 1.0) break;
            left.push_back(s);
        }
    }
    std::sort(left.begin(), left.end());

    std::vector<double> right;
    for (int j = 0; j < params.n; ++j) {
        const auto& g = params.upper[j];
        right.push_back((1.0 - g.coeff) / g.scale);
    }

    // Clusters: maximal runs of left poles with gaps below `merge`, kept if
    // they contain a leading pole.
    std::vector<Cluster> clusters;
    for (std::size_t i = 0; i < left.size();) {
        std::size_t j = i;
        while (j + 1 < left.size() && left[j + 1] - left[j] < merge) ++j;
        const Cluster c{left[i], left[j]};
        const bool leading = std::any_of(firsts.begin(), firsts.end(), [&](double f) {
            return f >= c.lo - kPoleCoincidenceTol && f <= c.hi + kPoleCoincidenceTol;
        });
        if (leading) clusters.push_back(c);
        i = j + 1;
    }

    const detail::Kernel k(params);
    const double lnz = std::log(z);
    double total = 0.0;
    for (const auto& c : clusters) {
        double gap = 0.5;
        for (double s : left)
            if (s < c.lo - 1e-12 || s > c.hi + 1e-12) gap = std::min(gap, std::min(std::abs(s - c.lo), std::abs(s - c.hi)));
        for (double s : right) gap = std::min(gap, std::min(std::abs(s - c.lo), std::abs(s - c.hi)));
        const double centre = 0.5 * (c.lo + c.hi);
        // z^{-s} changes by exp(|ln z| r) around the circle; keep the margin
        // outside the cluster small enough for double precision to hold.
        const double margin = std::min(0.5 * gap, 2.0 / std::max(std::abs(lnz), 1e-300));
        const double radius = 0.5 * (c.hi - c.lo) + margin;
        const double ref = -centre * lnz;
        const double out_scale = std::exp(ref);

        double previous = circle_integral(k, centre, radius, lnz, ref, 64).real();
        bool done = false;
        for (int nodes = 128; nodes <= 8192; nodes *= 2) {
            const double v = circle_integral(k, centre, radius, lnz, ref, nodes).real();
            if (std::abs(v - previous) <= 1e-11 * std::abs(v) + 1e-300) {
                total += v * out_scale;
                done = true;
                break;
            }
            previous = v;
        }
        if (!done) throw NonConvergent("residue circle quadrature did not settle");
    }
    return total;
}

}  // namespace risfso::foxh
