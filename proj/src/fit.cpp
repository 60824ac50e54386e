#include "carleman/fit.hpp"

#include "carleman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace carleman {

std::vector<double> geometric_grid(double lo, double hi, double ratio)
{
    if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0))
        throw InputError("geometric grid needs 0 < lo <= hi and ratio > 1");
    std::vector<double> g;
    const double lr = std::log(ratio);
    const int n = static_cast<int>(std::floor(std::log(hi / lo) / lr + 1e-9));
    for (int k = 0; k <= n; ++k)
        g.push_back(lo * std::exp(k * lr));
    return g;
}

GeometricEnvelope fit_geometric_envelope(std::span<const double> log_e)
{
    if (log_e.empty() || !std::isfinite(log_e[0]))
        throw NumericError("envelope fit needs a finite order-0 entry");
    GeometricEnvelope f;
    f.log_C = log_e[0];
    f.log_d = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < log_e.size(); ++k)
        if (std::isfinite(log_e[k]))
            f.log_d = std::max(f.log_d, (log_e[k] - log_e[0]) / double(k));
    if (!std::isfinite(f.log_d))
        f.log_d = 0.0;
    return f;
}

BandFit fit_band(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw InputError("band fit needs two or more (x, y) pairs");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    BandFit f;
    f.slope = sxy / sxx;
    f.offset = my - f.slope * mx;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - f.slope * x[i] - f.offset;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    f.band = hi - lo;
    return f;
}

} // namespace carleman
