#pragma once

#include <complex>

namespace carleman {

// Principal branch of the dilogarithm, cut along [1, inf).
std::complex<double> dilog(std::complex<double> z);

// Inverse tangent integral Ti2(x) = (Li2(ix) - Li2(-ix)) / (2i), analytic off
// the cuts (-i inf, -i] and [i, i inf).  Ti2'(x) = atan(x)/x.
std::complex<double> inverse_tangent_integral(std::complex<double> x);

// log(1 + x) without cancellation for small |x|, principal branch.
std::complex<double> clog1p(std::complex<double> x);

} // namespace carleman
