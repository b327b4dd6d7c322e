#pragma once

// Internal helpers shared by the univariate and bivariate evaluators.

#include <complex>
#include <functional>
#include <vector>

#include "risfso/complex_gamma.hpp"
#include "risfso/foxh.hpp"

namespace risfso::foxh::detail {

/// Theta(s) flattened into sign * logG(offset + slope * s) terms.
class Kernel {
public:
    explicit Kernel(const FoxHParams& p);
    std::complex<double> log_theta(std::complex<double> s) const;
    bool numerator_pole(std::complex<double> s, double tol) const;

private:
    struct Term {
        double offset;
        double slope;
        int sign;
    };
    std::vector<Term> terms_;
};

/// Grid scan followed by golden-section refinement.
double minimise_scan(const std::function<double(double)>& f, double lo, double hi, int samples);

double anchor_objective(const Kernel& k, double c, double lnz);
double choose_anchor_in(const Kernel& k, double left, double right, double lnz);

}  // namespace risfso::foxh::detail
