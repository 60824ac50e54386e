#include "carleman/special.hpp"

#include <cmath>
#include <numbers>

namespace carleman {

using cd = std::complex<double>;

cd dilog(cd z)
{
    constexpr double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
    // B_{2n} / (2n+1)!, n = 1..9
    static const double bf[] = {1.0 / 36.0,
                                -1.0 / 3600.0,
                                1.0 / 211680.0,
                                -1.0 / 10886400.0,
                                1.0 / 526901760.0,
                                -4.0647616451442256e-11,
                                8.921691020456452e-13,
                                -1.9939295860721074e-14,
                                4.518980029619918e-16};
    const double nz = std::norm(z);
    if (nz < 1e-32)
        return z;
    if (z == 1.0)
        return pi2_6;
    // Map to u = -log(1 - y) with |y| <= 1, Re y <= 1/2, then the Bernoulli
    // series Li2(y) = sum B_n u^{n+1}/(n+1)!.
    cd u, rest = 0.0;
    double sgn = 1.0;
    if (z.real() <= 0.5) {
        if (nz > 1.0) {
            cd lz = std::log(-z);
            u = -std::log(1.0 - 1.0 / z);
            rest = -0.5 * lz * lz - pi2_6;
            sgn = -1.0;
        } else {
            u = -std::log(1.0 - z);
        }
    } else if (nz <= 2.0 * z.real()) {
        u = -std::log(z);
        rest = u * std::log(1.0 - z) + pi2_6;
        sgn = -1.0;
    } else {
        cd lz = std::log(-z);
        u = -std::log(1.0 - 1.0 / z);
        rest = -0.5 * lz * lz - pi2_6;
        sgn = -1.0;
    }
    const cd u2 = u * u;
    cd p = bf[8];
    for (int k = 7; k >= 0; --k)
        p = p * u2 + bf[k];
    cd sum = u - 0.25 * u2 + u * u2 * p;
    return sgn * sum + rest;
}

cd inverse_tangent_integral(cd x)
{
    if (std::norm(x) < 0.0625) {
        // sum (-1)^k x^{2k+1} / (2k+1)^2
        const cd x2 = x * x;
        cd term = x, sum = x;
        for (int k = 1; k < 40; ++k) {
            term *= -x2;
            cd add = term / double((2 * k + 1) * (2 * k + 1));
            sum += add;
            if (std::norm(add) < 1e-34 * std::norm(sum))
                break;
        }
        return sum;
    }
    const cd i(0.0, 1.0);
    return (dilog(i * x) - dilog(-i * x)) / (2.0 * i);
}

cd clog1p(cd x)
{
    const double re = 0.5 * std::log1p(2.0 * x.real() + std::norm(x));
    return {re, std::atan2(x.imag(), 1.0 + x.real())};
}

} // namespace carleman
