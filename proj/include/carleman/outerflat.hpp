#pragma once

#include "carleman/index.hpp"
#include "carleman/sector.hpp"
#include "carleman/weights.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace carleman {

enum class OuterMethod { quadrature, kink_series };

struct QuadConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 200000;
    // t = t_low u^p on the deep region next to t = 0; raised automatically to
    // ceil(2 a/(a-1)) for growth exponent a so the integrand stays C^1 in u.
    int endpoint_substitution_power = 4;
    // evaluator behind eval_flat; log_outer_F itself is always quadrature
    OuterMethod method = OuterMethod::kink_series;
    // explicit terms of the kink series before the Euler-Maclaurin tail
    int series_head = 256;

    void validate() const;
};

// Two independent quadrature layouts for cross-validation: A is GK15 with
// 4000 kink-aligned panels, B is GK21 with 6000 and substitution power p+4.
enum class OuterScheme { a, b };

// Scheme A quadrature of
// log F(w) = (2w/pi) int_0^{1/n_0} log h_N(t) dt/(w^2+t^2), Re w > 0.
std::complex<double> log_outer_F(const WeightSequence& N, std::complex<double> w, const QuadConfig& cfg = {});
std::complex<double> log_outer_F_quad(const WeightSequence& N, std::complex<double> w, const QuadConfig& cfg,
                                      OuterScheme scheme);
// Same value from log h_N = sum_j min(0, log(t n_j)):
// log F(w) = -(2/pi) sum_j Ti2(1/(n_j w)).
std::complex<double> log_outer_F_series(const WeightSequence& N, std::complex<double> w,
                                        const QuadConfig& cfg = {});

// (1/pi) int_0^{1/n_0} log h_N(t) [u/((t-v)^2+u^2) + u/((t+v)^2+u^2)] dt, w = u + iv.
double poisson_log_modulus(const WeightSequence& N, std::complex<double> w, const QuadConfig& cfg = {});

// mean of Re log F over the circle |w - w0| = r with the given node count,
// minus Re log F(w0)
double mean_value_defect(const WeightSequence& N, std::complex<double> w0, double r, int nodes,
                         const QuadConfig& cfg = {});

struct WeightIntegralFit {
    bool ok = false;
    double b1 = 0.0;
    double b2 = 0.0;
    std::vector<double> u_grid;
    std::vector<double> lhs;              // int_0^1 log h_N(su) ds per u
    std::vector<double> decade_slack;     // minimal slack per u-decade at b1
    std::string reason;
};
WeightIntegralFit weight_integral_check(const WeightSequence& N, std::span<const double> u_grid,
                                        const QuadConfig& cfg = {});

struct FlatHandle {
    FlatHandle(const WeightSequence& M, double gamma, double delta, double s, const QuadConfig& quad,
               const GammaEstimate& est);
    WeightSequence M;
    double gamma;
    double delta;
    double s;
    WeightSequence N;
    QuadConfig quad;
    GammaEstimate gamma_estimate_used;
};

FlatHandle build_flat(const WeightSequence& M, double gamma, const GammaEstimate& est, const QuadConfig& cfg = {});

// log G(z), G(z) = F(z^s)
std::complex<double> eval_flat(const FlatHandle& h, const SectorPoint& z);
std::vector<std::complex<double>> eval_flat_batch_serial(const FlatHandle& h, std::span<const SectorPoint> z);
std::vector<std::complex<double>> eval_flat_batch(const FlatHandle& h, std::span<const SectorPoint> z);

// Cauchy derivatives of G and 1/G, all orders 0..j_max from one circle,
// returned as complex logs (the values underflow near the vertex).
struct CauchyDerivatives {
    std::vector<std::complex<double>> log_G;
    std::vector<std::complex<double>> log_inv_G;
    double radius = 0.0;
    int nodes = 0;
};
CauchyDerivatives flat_derivatives(const FlatHandle& h, const SectorPoint& z, int j_max);
std::complex<double> flat_derivative(const FlatHandle& h, const SectorPoint& z, int j);
std::complex<double> reciprocal_derivative(const FlatHandle& h, const SectorPoint& z, int j);

struct ConstantGrid {
    double lo = 1e-4;
    double hi = 1e4;
    double ratio = 1.0905077326652577; // 2^{1/8}
    std::vector<double> values() const;
};

struct SandwichReport {
    bool accepted = false;
    std::string reason;
    ConstantGrid grid;
    int j_max = 0;
    // |G(z)| between kappa1 h_M(kappa2|z|) and h_M(kappa3|z|)
    double log_kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0;
    // |F(w)| between b5 h_N(b6 Re w) and h_N(b7|w|), w = z^s
    double log_b5 = 0.0, b6 = 0.0, b7 = 0.0;
    double rho2_N = 0.0, b7_formula = 0.0; // 2 rho(2) for N
    // |G^(j)| <= b13^j j! M_j h_M(b14|z|), |(1/G)^(j)| <= b15 b16^j j! M_j / h_M(b17|z|)
    double b13 = 0.0, b14 = 0.0, log_b15 = 0.0, b16 = 0.0, b17 = 0.0;
    bool kappa_order_ok = false;
    std::vector<SectorPoint> samples;
    std::vector<std::complex<double>> log_G;
    std::vector<double> margin_upper; // log h_M(kappa3|z|) - Re log G
    std::vector<double> margin_lower; // Re log G - log kappa1 - log h_M(kappa2|z|)
    int violations = 0;
    int worst_sample = -1;
};

SandwichReport sandwich_verify(const FlatHandle& h, std::span<const SectorPoint> samples, int j_max);

// n points in S_gamma, |z| log-uniform over [r_lo, r_hi] with both ends on the
// bisector, |arg z| <= 0.95 gamma pi/2.
std::vector<SectorPoint> sector_samples(double gamma, int n, double r_lo, double r_hi, std::uint64_t seed);

// log of exp(-z^{-1/alpha})
std::complex<double> gevrey_flat_oracle(double alpha, const SectorPoint& z);

} // namespace carleman
