#pragma once

#include <complex>
#include <string>

namespace carleman {

// Point of the Riemann surface of the logarithm: (log |z|, arg z), the
// argument is not reduced mod 2 pi.
struct SectorPoint {
    double log_r = 0.0;
    double theta = 0.0;

    static SectorPoint polar(double r, double theta);
    // principal branch
    static SectorPoint from_complex(std::complex<double> z);
    double modulus() const;
    // complex-plane embedding, defined for |theta| < pi
    std::complex<double> embed() const;
    // log z on this sheet
    std::complex<double> log() const { return {log_r, theta}; }
};

// S_gamma = { |arg z| < gamma pi/2 }
struct Sector {
    double gamma = 1.0;
    explicit Sector(double g);
};

bool contains(const Sector& S, const SectorPoint& z);
SectorPoint power_map(const SectorPoint& z, double s);

struct CauchyDisc {
    double epsilon = 0.0;
    double radius = 0.0;
};
// Closed disc of centre z and radius sin(eps)|z| inside S_delta.
CauchyDisc cauchy_disc(const SectorPoint& z, double gamma, double delta);

// "r@theta", decimal modulus and radians
SectorPoint parse_point(const std::string& text);
std::string format_point(const SectorPoint& z);

} // namespace carleman
