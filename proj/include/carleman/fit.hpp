#pragma once

#include <span>
#include <vector>

namespace carleman {

// lo, lo r, lo r^2, ... up to hi (inclusive to rounding)
std::vector<double> geometric_grid(double lo, double hi, double ratio);

// Envelope log C + k log d >= e_k for all k: log C = e_0 and
// log d = max_{k>=1} (e_k - e_0)/k.  Non-finite entries are skipped.
struct GeometricEnvelope {
    double log_C = 0.0;
    double log_d = 0.0;
};
GeometricEnvelope fit_geometric_envelope(std::span<const double> log_e);

// Least-squares y ~ slope x + offset, with band = max - min of the residuals.
struct BandFit {
    double slope = 0.0;
    double offset = 0.0;
    double band = 0.0;
};
BandFit fit_band(std::span<const double> x, std::span<const double> y);

} // namespace carleman
