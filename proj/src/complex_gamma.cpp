#include "risfso/complex_gamma.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace risfso {
namespace {

using cd = std::complex<double>;

// B_{2k} / (2k (2k-1)) for k = 1..10
constexpr std::array<double, 10> kStirling = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
};

constexpr double kShift = 15.0;

cd stirling(cd z) {
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    cd r = (z - 0.5) * std::log(z) - z + half_log_2pi;
    const cd inv = 1.0 / z;
    const cd inv2 = inv * inv;
    cd term = inv;
    for (double c : kStirling) {
        r += c * term;
        term *= inv2;
    }
    return r;
}

cd log_gamma_right(cd z) {
    // Re z >= 0.5 here. Shift up until Stirling is accurate to double precision.
    cd acc = 0.0;
    if (std::abs(z) < kShift) {
        cd prod = 1.0;
        int count = 0;
        while (std::abs(z) < kShift) {
            prod *= z;
            z += 1.0;
            if (++count == 8) {
                acc -= std::log(prod);
                prod = 1.0;
                count = 0;
            }
        }
        acc -= std::log(prod);
    }
    return acc + stirling(z);
}

}  // namespace

bool is_gamma_pole(cd z, double tol) {
    if (std::abs(z.imag()) > tol || z.real() > tol) return false;
    return std::abs(z.real() - std::round(z.real())) <= tol;
}

cd log_sin_pi(cd z) {
    const double pi = std::numbers::pi;
    const cd w = pi * z;
    if (std::abs(w.imag()) < 1.0) return std::log(std::sin(w));
    if (w.imag() > 0.0) {
        // sin w = (i/2) e^{-iw} (1 - e^{2iw}), |e^{2iw}| = e^{-2 Im w} < 1
        const cd i(0.0, 1.0);
        const cd e = std::exp(2.0 * i * w);
        return -i * w + std::log(cd(0.0, 0.5)) + std::log(1.0 - e);
    }
    return std::conj(log_sin_pi(std::conj(z)));
}

cd log_gamma(cd z) {
    if (is_gamma_pole(z, 0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
    if (z.real() < 0.5) {
        // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return std::log(std::numbers::pi) - log_sin_pi(z) - log_gamma_right(1.0 - z);
    }
    return log_gamma_right(z);
}

}  // namespace risfso
