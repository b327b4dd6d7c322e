#pragma once

#include <complex>

namespace risfso {

/// Logarithm of the gamma function for complex arguments.
///
/// The imaginary part is continuous along vertical lines away from the
/// negative real axis (principal "loggamma" branch). Callers in this library
/// only ever exponentiate sums of these values, so the branch is immaterial
/// for them; it matters only for tests comparing against other libraries.
///
/// Non-positive integers are poles; the return value there has real part
/// +infinity. Use is_gamma_pole() to test before calling when that matters.
std::complex<double> log_gamma(std::complex<double> z);

/// True when z lies within tol of a pole of Gamma (0, -1, -2, ...).
bool is_gamma_pole(std::complex<double> z, double tol = 1e-12);

/// log(sin(pi z)), stable for large |Im z|.
std::complex<double> log_sin_pi(std::complex<double> z);

}  // namespace risfso
