#pragma once

#include "carleman/index.hpp"
#include "carleman/sector.hpp"
#include "carleman/weights.hpp"

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace carleman {

// Finite jet (lambda_0, ..., lambda_{J-1}) in Lambda_{M,sigma}.
struct Jet {
    Jet(std::vector<std::complex<double>> lambda, WeightSequence M, double sigma);
    std::vector<std::complex<double>> lambda;
    WeightSequence M;
    double sigma;
    int size() const { return static_cast<int>(lambda.size()); }
};

// sup_j |lambda_j| / (sigma^j j! M_j); 0 for the zero jet
double jet_norm(const Jet& l);
// log(sigma^j j! M_j)
double log_jet_weight(const Jet& l, int j);

// c[j][k] = i^k lambda_{j+k} for j + k < J
struct TwoIndexJet {
    std::vector<std::vector<std::complex<double>>> c;
    WeightSequence M;
    double sigma;
};
TwoIndexJet complexify(const Jet& l);
double two_index_norm(const TwoIndexJet& c);

// lambda*_{qj} = lambda_j (qj)!/j!, other entries 0, over (M^{1/q}, sigma^{1/q}).
// The table is cut to the indices M^{1/q} stores.
Jet ramify_jet(const Jet& l, int q);

struct ExtendParams {
    double gamma_prime = 0.0; // 0: (gamma + gamma_hat)/2
    int J_ext = 64;
    std::vector<double> log_b; // empty: log b_j = -gamma' (j log sigma + log M_j)
    int q = 0;                 // ramified path; 0: minimal q with gamma/q < 2
};

struct Remainder {
    std::complex<double> value;
    double scale = 0.0; // sum of the moduli of the summed terms
};

struct ExtensionHandle {
    Jet source;      // the jet being extended
    double gamma;    // opening of S_gamma
    int q = 1;       // f(z) = inner(z^{1/q}); 1 in the base case
    // base-case data (for q > 1 these belong to the inner extension)
    Jet jet;         // jet fed to the damped sum (ramified when q > 1)
    double gamma_prime;
    int J_ext;
    bool truncated = false;
    std::vector<double> log_b;

    std::complex<double> operator()(const SectorPoint& z) const;
    // f(z) - sum_{j<N} lambda_j z^j/j! of the source jet, summed term by
    // term with u_j - 1 = -exp(-w_j) so nothing cancels
    std::complex<double> remainder(const SectorPoint& z, int N) const;
    // remainder with the sum of |terms|, the scale of its rounding error
    Remainder remainder_scaled(const SectorPoint& z, int N) const;
};

ExtensionHandle extend_damped(const Jet& l, double gamma, const GammaEstimate& est, const ExtendParams& p = {});
ExtensionHandle extend_ramified(const Jet& l, double gamma, const GammaEstimate& est, const ExtendParams& p = {});
// base case for gamma < 2, ramified otherwise
ExtensionHandle extend(const Jet& l, double gamma, const GammaEstimate& est, const ExtendParams& p = {});

// (z, N) -> f(z) - P_{N-1}(z)
using RemainderFn = std::function<Remainder(const SectorPoint&, int)>;
// remainder by direct subtraction of the jet polynomial from f
RemainderFn direct_remainder(std::function<std::complex<double>(const SectorPoint&)> f, const Jet& l);

struct AsymptoticsReport {
    std::vector<std::complex<double>> recovered;
    std::vector<double> per_order_error; // |err| / max(|lambda_N|, |lambda|_sigma sigma^N N! M_N), absolute for 0
    std::vector<bool> converged;
    std::vector<double> best_radius;     // largest |z| of the selected Richardson triples
    std::vector<double> spread;          // |C_{k+1} - C_k| plus rounding bound at the selection
    double ray = 0.0;
    std::vector<double> grid;
    // |f - P_N| <= C (d sigma)^N N! M_N |z|^N over the grid
    double log_C = 0.0, log_d = 0.0;
    double log_C_half = 0.0, log_d_half = 0.0; // same fit on every other grid point
    double envelope_drift = 0.0;               // max relative change of C and d
    std::string reason;                        // first divergent order, if any
};

AsymptoticsReport verify_asymptotics(const RemainderFn& R, const Jet& l, int N_max, double ray,
                                     std::span<const double> z_schedule);
AsymptoticsReport verify_asymptotics(const ExtensionHandle& h, const Jet& l, int N_max, double ray,
                                     std::span<const double> z_schedule);

// T[N][k] = R(r_k e^{i ray}, N) for N = 0..N_count-1; OpenMP over k
std::vector<std::vector<Remainder>> remainder_table(const RemainderFn& R, int N_count, double ray,
                                                    std::span<const double> radii);
std::vector<std::vector<Remainder>> remainder_table_serial(const RemainderFn& R, int N_count, double ray,
                                                           std::span<const double> radii);

// 1e-1 down to ~1e-12 by halving
std::vector<double> default_z_schedule();

// "j,re_lambda,im_lambda" rows; missing indices are zero
std::vector<std::complex<double>> parse_jet_csv(const std::string& text);

} // namespace carleman
