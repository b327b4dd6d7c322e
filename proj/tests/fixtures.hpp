#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "risfso/channels.hpp"
#include "risfso/foxh.hpp"

namespace fx {

using namespace risfso;

inline channels::DGGParams st() { return {{1.8621, 0.5, 1.5074}, {1.0, 1.8, 0.928}}; }
inline channels::DGGParams mt() { return {{2.169, 0.55, 1.5793}, {1.0, 2.35, 0.9671}}; }
inline channels::DGGParams rf() { return {{1.5, 1.5, 1.5793}, {1.0, 1.5, 0.9671}}; }
inline channels::PointingErrorParams pe_end() { return {0.02, 6.0}; }
inline channels::PointingErrorParams pe_int() { return {0.02, 25.0}; }

/// K factors; the first and last carry endpoint pointing errors, the rest interior ones.
inline channels::CascadeSpec fso_cascade(const channels::DGGParams& d, int K) {
    channels::CascadeSpec s;
    for (int i = 0; i < K; ++i) {
        const bool end = i == 0 || i == K - 1;
        s.hops.push_back({d, end ? pe_end() : pe_int()});
    }
    return s;
}

inline channels::CascadeSpec rf_cascade(int K) {
    channels::CascadeSpec s;
    for (int i = 0; i < K; ++i) s.hops.push_back({rf(), std::nullopt});
    return s;
}

struct NamedCascade {
    std::string name;
    channels::CascadeSpec spec;
};

/// FSO ST/MT and RF cascades for K = 1, 2, 3.
inline std::vector<NamedCascade> cascade_matrix() {
    std::vector<NamedCascade> out;
    for (int K = 1; K <= 3; ++K) {
        out.push_back({"ST K=" + std::to_string(K), fso_cascade(st(), K)});
        out.push_back({"MT K=" + std::to_string(K), fso_cascade(mt(), K)});
        out.push_back({"RF K=" + std::to_string(K), rf_cascade(K)});
    }
    return out;
}

struct NamedKernel {
    std::string name;
    foxh::FoxHParams params;
};

inline std::vector<NamedKernel> foxh_matrix() {
    using foxh::FoxHParams;
    std::vector<NamedKernel> out;
    out.push_back({"exponential", FoxHParams{1, 0, {}, {{0.0, 1.0}}}});
    out.push_back({"gamma kernel b=2", FoxHParams{1, 0, {}, {{2.0, 1.0}}}});
    out.push_back({"gamma kernel b=0.7 B=0.5", FoxHParams{1, 0, {}, {{0.7, 0.5}}}});
    out.push_back({"1/(1+z)", FoxHParams{1, 1, {{0.0, 1.0}}, {{0.0, 1.0}}}});
    out.push_back({"2 K0(2 sqrt z)", FoxHParams{2, 0, {}, {{0.0, 1.0}, {0.0, 1.0}}}});
    out.push_back({"incomplete gamma", FoxHParams{1, 1, {{1.0, 1.0}}, {{1.5, 1.0}, {0.0, 1.0}}}});
    out.push_back({"dGG ST", channels::dgg_factor(st()).kernel});
    out.push_back({"dGG RF", channels::dgg_factor(rf()).kernel});
    out.push_back({"dGG+PE MT", channels::dgg_pe_factor(mt(), pe_end()).kernel});
    out.push_back({"cascade CDF ST K=2", channels::cascade(fso_cascade(st(), 2)).cdf_form().kernel});
    out.push_back({"cascade PDF MT K=3", channels::cascade(fso_cascade(mt(), 3)).pdf_form().kernel});
    out.push_back({"cascade CDF RF K=2", channels::cascade(rf_cascade(2)).cdf_form().kernel});
    return out;
}

/// z in [1e-3, 1e3], half-decade steps.
inline std::vector<double> z_grid() {
    std::vector<double> z;
    for (int i = -6; i <= 6; ++i) z.push_back(std::pow(10.0, 0.5 * i));
    return z;
}

/// A second anchor inside (lo, hi), moved away from `c` toward the roomier side.
inline double second_anchor(double c, double lo, double hi) {
    const double left = c - lo;
    const double right = hi - c;
    if (right >= left) return c + std::min(0.5, 0.4 * right);
    return c - std::min(0.5, 0.4 * left);
}

inline double rel_diff(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// Adaptive Gauss-Kronrod in t = ln x over [t0, t1] of g(e^t) e^t.
template <class F>
double integrate_log(F f, double t0, double t1, double tol = 1e-12) {
    auto g = [&](double t) {
        const double x = std::exp(t);
        return f(x) * x;
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, t0, t1, 25, tol);
}

}  // namespace fx
