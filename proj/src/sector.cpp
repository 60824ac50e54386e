#include "carleman/sector.hpp"

#include "carleman/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace carleman {

SectorPoint SectorPoint::polar(double r, double theta)
{
    if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(theta))
        throw InputError("sector point needs finite r > 0 and finite theta");
    return {std::log(r), theta};
}

SectorPoint SectorPoint::from_complex(std::complex<double> z)
{
    if (z == 0.0)
        throw InputError("the vertex is not a sector point");
    return {std::log(std::abs(z)), std::arg(z)};
}

double SectorPoint::modulus() const { return std::exp(log_r); }

std::complex<double> SectorPoint::embed() const
{
    if (!(std::abs(theta) < std::numbers::pi))
        throw InputError("plane embedding needs |theta| < pi; reduce with power_map");
    return std::polar(std::exp(log_r), theta);
}

Sector::Sector(double g) : gamma(g)
{
    if (!(g > 0.0))
        throw InputError("sector opening must be positive");
}

bool contains(const Sector& S, const SectorPoint& z)
{
    return std::abs(z.theta) < S.gamma * std::numbers::pi / 2.0;
}

SectorPoint power_map(const SectorPoint& z, double s)
{
    if (!(s > 0.0))
        throw InputError("power_map needs s > 0");
    return {s * z.log_r, s * z.theta};
}

CauchyDisc cauchy_disc(const SectorPoint& z, double gamma, double delta)
{
    if (!(gamma > 0.0) || !(gamma < delta) || !(delta < 2.0))
        throw InputError("cauchy_disc needs 0 < gamma < delta < 2");
    if (!contains(Sector(gamma), z))
        throw InputError("cauchy_disc centre outside S_gamma");
    CauchyDisc d;
    d.epsilon = 0.9 * std::min(1.0, delta - gamma) * std::numbers::pi / 2.0;
    d.radius = std::sin(d.epsilon) * z.modulus();
    return d;
}

SectorPoint parse_point(const std::string& text)
{
    auto at = text.find('@');
    if (at == std::string::npos)
        throw InputError("point must look like r@theta: " + text);
    try {
        std::size_t n1 = 0, n2 = 0;
        std::string a = text.substr(0, at), b = text.substr(at + 1);
        double r = std::stod(a, &n1), th = std::stod(b, &n2);
        if (n1 != a.size() || n2 != b.size())
            throw InputError("trailing characters in point: " + text);
        return SectorPoint::polar(r, th);
    } catch (const std::logic_error&) {
        throw InputError("malformed point: " + text);
    }
}

std::string format_point(const SectorPoint& z)
{
    std::ostringstream os;
    os.precision(17);
    os << z.modulus() << "@" << z.theta;
    return os.str();
}

} // namespace carleman
