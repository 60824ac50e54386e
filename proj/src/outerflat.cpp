#include "carleman/outerflat.hpp"

#include "carleman/detail/parallel.hpp"
#include "carleman/errors.hpp"
#include "carleman/fit.hpp"
#include "carleman/quadrature.hpp"
#include "carleman/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace carleman {

namespace {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

struct Layout {
    GKRule rule;
    int cap;         // kinks below t_end given their own panels
    int p_extra;     // added to the substitution power
    int deep_panels; // initial uniform panels in u on the deep region
};

Layout layout(OuterScheme s)
{
    if (s == OuterScheme::a)
        return {GKRule::gk15, 4000, 0, 8};
    return {GKRule::gk21, 6000, 4, 5};
}

double continued_growth(const WeightSequence& N)
{
    if (!N.closed_form())
        throw BudgetError("extend budget: integrals of log h_N need h_N below the table, "
                          "which a tabulated sequence cannot provide");
    return N.growth_exponent();
}

double checked_growth(const WeightSequence& N)
{
    double a = continued_growth(N);
    if (!(a > 1.0))
        throw InputError("outer function needs gamma(N) > 1");
    return a;
}

void check_w(cd w)
{
    if (!(w.real() > 0.0) || !std::isfinite(std::abs(w)))
        throw InputError("outer function needs Re w > 0");
    if (w.real() < 1e-6 * std::abs(w))
        throw InputError("w too close to the imaginary axis: kernel peak unresolved");
}

int substitution_power(double a, const QuadConfig& cfg, int extra)
{
    int p = cfg.endpoint_substitution_power;
    if (std::isfinite(a) && a > 1.0)
        p = std::max(p, static_cast<int>(std::ceil(2.0 * a / (a - 1.0) - 1e-9)));
    return p + extra;
}

// int_0^{t_end} log h_N(t) k(t) dt: GK panels aligned with the first cap
// kinks t_j = 1/n_j of log h_N below t_end, then t = t_low u^p on [0, t_low].
// Past the aligned kinks the adaptive rule resolves the remaining ripple;
// its cost falls with t_low / cap.
template <class T, class K>
T integrate_log_h(const WeightSequence& N, K&& k, double t_end, std::vector<double> extra, const Layout& L,
                  const QuadConfig& cfg, double a)
{
    const auto& lm = N.log_m_table();
    t_end = std::min(t_end, std::exp(-lm[0])); // log h_N = 0 beyond 1/n_0
    const int jmax = N.j_max() - 1;
    std::vector<double> br;
    double t_low = t_end;
    for (int j = 0, used = 0; j < jmax && used < L.cap; ++j) {
        double tj = std::exp(-lm[j]);
        if (tj >= t_end)
            continue;
        br.push_back(tj);
        t_low = tj;
        ++used;
    }
    br.push_back(t_end);
    std::vector<double> deep_extra;
    for (double x : extra) {
        if (x > t_low && x < t_end)
            br.push_back(x);
        else if (x > 0.0 && x < t_low)
            deep_extra.push_back(x);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    T total{};
    if (br.size() >= 2) {
        auto f = [&](double t) -> T { return log_hM_log(N, std::log(t)) * k(t); };
        total += integrate(f, br, L.rule, 0.5 * cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions).value;
    }
    const int p = substitution_power(a, cfg, L.p_extra);
    const double lt_low = std::log(t_low);
    // below t = e^{-700} the integrand is dropped; that needs t |log h_N(t)|
    // to have died out there (true iff log h_N is integrable at 0)
    constexpr double lt_cut = -700.0;
    if (std::log(-log_hM_ext_log(N, lt_cut)) + lt_cut > std::log(1e-3 * cfg.abs_tol))
        throw NumericError("log h_N not integrable at t = 0 to tolerance (t log h_N(t) does not vanish)");
    auto g = [&](double u) -> T {
        double lt = lt_low + p * std::log(u);
        if (lt < lt_cut)
            return T{};
        double t = std::exp(lt);
        return log_hM_ext_log(N, lt) * k(t) * (p * t / u);
    };
    std::vector<double> ub;
    for (int i = 0; i <= L.deep_panels; ++i)
        ub.push_back(double(i) / L.deep_panels);
    for (double x : deep_extra)
        ub.push_back(std::pow(x / t_low, 1.0 / p));
    std::sort(ub.begin(), ub.end());
    ub.erase(std::unique(ub.begin(), ub.end()), ub.end());
    // tolerance relative to the whole integral, not to the small deep part
    const double deep_abs = std::max(0.5 * cfg.abs_tol, 0.5 * cfg.rel_tol * detail::magnitude(total));
    total += integrate(g, ub, L.rule, deep_abs, cfg.rel_tol, cfg.max_subdivisions).value;
    return total;
}

std::vector<double> peak_points(cd w)
{
    const double u = w.real(), v = std::abs(w.imag());
    std::vector<double> pts;
    for (double c : {-3.0, -1.0, 0.0, 1.0, 3.0})
        if (v + c * u > 0.0)
            pts.push_back(v + c * u);
    return pts;
}

// log G at a point of S_delta without the S_gamma check; the Cauchy circles
// leave S_gamma.
cd log_G(const FlatHandle& h, const SectorPoint& z)
{
    cd w = power_map(z, h.s).embed();
    if (h.quad.method == OuterMethod::kink_series)
        return log_outer_F_series(h.N, w, h.quad);
    return log_outer_F(h.N, w, h.quad);
}

} // namespace

void QuadConfig::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw InputError("quadrature tolerances must be positive");
    if (endpoint_substitution_power < 2)
        throw InputError("substitution power must be >= 2");
    if (max_subdivisions < 1)
        throw InputError("max_subdivisions must be positive");
    if (series_head < 8)
        throw InputError("series_head must be >= 8");
}

cd log_outer_F_quad(const WeightSequence& N, cd w, const QuadConfig& cfg, OuterScheme scheme)
{
    cfg.validate();
    check_w(w);
    const double a = checked_growth(N);
    auto k = [w](double t) -> cd { return (1.0 / (w - cd(0, t)) + 1.0 / (w + cd(0, t))) / pi; };
    return integrate_log_h<cd>(N, k, inf, peak_points(w), layout(scheme), cfg, a);
}

cd log_outer_F(const WeightSequence& N, cd w, const QuadConfig& cfg)
{
    return log_outer_F_quad(N, w, cfg, OuterScheme::a);
}

cd log_outer_F_series(const WeightSequence& N, cd w, const QuadConfig& cfg)
{
    cfg.validate();
    check_w(w);
    const double a = checked_growth(N);
    const auto& lm = N.log_m_table();
    const int Js = std::max(std::min(cfg.series_head, N.j_max() - 3), N.closed_from() + 2);
    if (Js + 2 >= N.j_max())
        throw BudgetError("extend budget: kink series needs J_max > series head + 2");
    const cd inv_w = 1.0 / w;
    cd S = 0.0;
    for (int j = 0; j < Js; ++j)
        S += inverse_tangent_integral(std::exp(-lm[j]) * inv_w);

    // Euler-Maclaurin for sum_{j >= Js} f(j), f(x) = Ti2(1/(n(x) w))
    auto f = [&](double x) { return inverse_tangent_integral(std::exp(-N.log_m_cont(x)) * inv_w); };
    // x = Js v^{-q} makes the integrand O(v) at v = 0
    const double q = std::isfinite(a) ? 2.0 / (a - 1.0) : 1.0;
    const double lJ = std::log(double(Js));
    auto g = [&](double v) -> cd {
        double lx = lJ - q * std::log(v);
        if (lx > 690.0)
            return 0.0;
        double x = std::exp(lx);
        return f(x) * (q * x / v);
    };
    std::vector<double> vb;
    for (int i = 0; i <= 8; ++i)
        vb.push_back(i / 8.0);
    double jp = N.extended_piece(-std::log(std::abs(w)));
    if (jp > Js)
        vb.push_back(std::pow(Js / jp, 1.0 / q));
    std::sort(vb.begin(), vb.end());
    vb.erase(std::unique(vb.begin(), vb.end()), vb.end());
    cd I = integrate(g, vb, GKRule::gk15, 1e-15, 1e-14, cfg.max_subdivisions).value;
    const double x0 = Js;
    cd fm2 = f(x0 - 2), fm1 = f(x0 - 1), f0 = f(x0), fp1 = f(x0 + 1), fp2 = f(x0 + 2);
    cd d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / 12.0;
    cd d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / 2.0;
    cd tail = I + 0.5 * f0 - d1 / 12.0 + d3 / 720.0;
    return -(2.0 / pi) * (S + tail);
}

double poisson_log_modulus(const WeightSequence& N, cd w, const QuadConfig& cfg)
{
    cfg.validate();
    check_w(w);
    const double a = checked_growth(N);
    const double u = w.real(), v = w.imag();
    auto k = [u, v](double t) {
        return (u / ((t - v) * (t - v) + u * u) + u / ((t + v) * (t + v) + u * u)) / pi;
    };
    return integrate_log_h<double>(N, k, inf, peak_points(w), layout(OuterScheme::a), cfg, a);
}

double mean_value_defect(const WeightSequence& N, cd w0, double r, int nodes, const QuadConfig& cfg)
{
    if (nodes < 4 || !(r > 0.0) || !(r < w0.real()))
        throw InputError("mean value check needs 0 < r < Re w0 and >= 4 nodes");
    double mean = 0.0;
    for (int k = 0; k < nodes; ++k)
        mean += log_outer_F(N, w0 + std::polar(r, 2 * pi * k / nodes), cfg).real();
    return mean / nodes - log_outer_F(N, w0, cfg).real();
}

WeightIntegralFit weight_integral_check(const WeightSequence& N, std::span<const double> u_grid,
                                        const QuadConfig& cfg)
{
    cfg.validate();
    WeightIntegralFit r;
    r.u_grid.assign(u_grid.begin(), u_grid.end());
    if (u_grid.size() < 2)
        throw InputError("weight integral check needs >= 2 grid points");
    for (double u : u_grid)
        if (!(u > 0.0))
            throw InputError("grid points must be positive");
    // gamma(N) > 1 is the hypothesis under test here, so it is not enforced
    double a = 0.0;
    try {
        a = continued_growth(N);
        for (double u : u_grid) {
            auto one = [](double) { return 1.0; };
            r.lhs.push_back(integrate_log_h<double>(N, one, u, {}, layout(OuterScheme::a), cfg, a) / u);
        }
    } catch (const NumericError& e) {
        r.reason = std::string("quadrature: ") + e.what();
        return r;
    } catch (const InputError& e) {
        r.reason = e.what();
        return r;
    }
    const auto grid = ConstantGrid{}.values();
    double best_band = inf;
    std::size_t best = 0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double lo = inf, hi = -inf;
        for (std::size_t i = 0; i < u_grid.size(); ++i) {
            double s = r.lhs[i] - log_hM_ext(N, grid[c] * u_grid[i]);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        if (hi - lo < best_band) {
            best_band = hi - lo;
            best = c;
            r.b2 = lo;
        }
    }
    r.b1 = grid[best];
    // per-decade minimal slack at the chosen b1
    const double d0 = std::floor(std::log10(*std::min_element(u_grid.begin(), u_grid.end())));
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        std::size_t d = static_cast<std::size_t>(std::floor(std::log10(u_grid[i])) - d0);
        if (r.decade_slack.size() <= d)
            r.decade_slack.resize(d + 1, inf);
        r.decade_slack[d] = std::min(r.decade_slack[d], r.lhs[i] - log_hM_ext(N, r.b1 * u_grid[i]));
    }
    // a best scale at the grid edge means the shape drifts with the u-range
    r.ok = std::isfinite(r.b2) && best > 0 && best + 1 < grid.size();
    if (!r.ok)
        r.reason = "no interior scale b1 on the grid";
    return r;
}

FlatHandle::FlatHandle(const WeightSequence& M_, double gamma_, double delta_, double s_, const QuadConfig& quad_,
                       const GammaEstimate& est)
    : M(M_), gamma(gamma_), delta(delta_), s(s_), N(power(M_, s_)), quad(quad_), gamma_estimate_used(est)
{
}

FlatHandle build_flat(const WeightSequence& M, double gamma, const GammaEstimate& est, const QuadConfig& cfg)
{
    cfg.validate();
    const double gh = est.gamma_hat;
    if (!(gamma > 0.0) || !(gamma < gh))
        throw InputError("flat function needs 0 < gamma < gamma_hat");
    const double delta = 0.5 * (gamma + gh);
    const double s = 2.0 / (delta + gh);
    if (!(s * delta < 1.0) || !(s * gh > 1.0))
        throw InputError("parameter rule s delta < 1 < s gamma_hat fails");
    // the rule must survive the whole bracket [lo, hi] of the estimate
    if (est.lo > 0.0 && est.lo < gh && !(s * est.lo > 1.0))
        throw InputError("gamma too close to gamma_hat for the bracket tolerance");
    return FlatHandle(M, gamma, delta, s, cfg, est);
}

cd eval_flat(const FlatHandle& h, const SectorPoint& z)
{
    if (!contains(Sector(h.gamma), z))
        throw InputError("eval_flat: point outside S_gamma");
    return log_G(h, z);
}

std::vector<cd> eval_flat_batch_serial(const FlatHandle& h, std::span<const SectorPoint> z)
{
    std::vector<cd> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = eval_flat(h, z[i]);
    return out;
}

std::vector<cd> eval_flat_batch(const FlatHandle& h, std::span<const SectorPoint> z)
{
    std::vector<cd> out(z.size());
    detail::parallel_for(static_cast<int>(z.size()), [&](int i) { out[i] = eval_flat(h, z[i]); });
    return out;
}

CauchyDerivatives flat_derivatives(const FlatHandle& h, const SectorPoint& z, int j_max)
{
    if (j_max < 0 || j_max > 12)
        throw InputError("derivative order must be in [0, 12]");
    const auto disc = cauchy_disc(z, h.gamma, h.delta);
    const cd zc = std::polar(z.modulus(), z.theta);
    auto at = [&](cd dz) {
        cd l = clog1p(dz / zc);
        return log_G(h, SectorPoint{z.log_r + l.real(), z.theta + l.imag()});
    };
    const cd g0 = log_G(h, z);
    // |g'| sets the radius: on |zeta - z| = r, |g - g0| stays near j_max
    const double eta = 1e-4;
    cd gp = (at(eta * zc) - at(-eta * zc)) / (2.0 * eta * zc);
    CauchyDerivatives out;
    out.radius = std::min(disc.radius, std::max(j_max, 1) / std::abs(gp));
    const double r = out.radius;

    std::vector<cd> vals; // g(z + r e^{i phi_k}) - g0, k = 0..n-1
    auto sums = [&](int n, std::vector<cd>& SG, std::vector<cd>& SI, double& scale) {
        SG.assign(j_max + 1, 0.0);
        SI.assign(j_max + 1, 0.0);
        scale = 0.0;
        for (int k = 0; k < n; ++k) {
            cd eg = std::exp(vals[k]), ei = std::exp(-vals[k]);
            scale += std::abs(eg) + std::abs(ei);
            for (int j = 0; j <= j_max; ++j) {
                cd rot = std::polar(1.0, -2 * pi * double(j) * k / n);
                SG[j] += eg * rot;
                SI[j] += ei * rot;
            }
        }
        for (int j = 0; j <= j_max; ++j) {
            SG[j] /= double(n);
            SI[j] /= double(n);
        }
        scale /= n;
    };
    int n = 32;
    vals.resize(n);
    for (int k = 0; k < n; ++k)
        vals[k] = at(std::polar(r, 2 * pi * k / n)) - g0;
    std::vector<cd> SG, SI, SG2, SI2;
    double scale = 0.0;
    sums(n, SG, SI, scale);
    for (;;) {
        if (2 * n > 4096)
            throw NumericError("Cauchy node budget exhausted");
        std::vector<cd> next(2 * n);
        for (int k = 0; k < n; ++k) {
            next[2 * k] = vals[k];
            next[2 * k + 1] = at(std::polar(r, 2 * pi * (2 * k + 1) / (2.0 * n))) - g0;
        }
        vals.swap(next);
        n *= 2;
        sums(n, SG2, SI2, scale);
        bool done = true;
        for (int j = 0; j <= j_max && done; ++j) {
            double floor = 1e-14 * scale;
            done = std::abs(SG2[j] - SG[j]) <= 1e-8 * std::abs(SG2[j]) + floor &&
                   std::abs(SI2[j] - SI[j]) <= 1e-8 * std::abs(SI2[j]) + floor;
        }
        SG.swap(SG2);
        SI.swap(SI2);
        if (done)
            break;
    }
    out.nodes = n;
    for (int j = 0; j <= j_max; ++j) {
        double c = std::lgamma(j + 1.0) - j * std::log(r);
        out.log_G.push_back(g0 + std::log(SG[j]) + c);
        out.log_inv_G.push_back(-g0 + std::log(SI[j]) + c);
    }
    return out;
}

cd flat_derivative(const FlatHandle& h, const SectorPoint& z, int j)
{
    return flat_derivatives(h, z, j).log_G[j];
}

cd reciprocal_derivative(const FlatHandle& h, const SectorPoint& z, int j)
{
    return flat_derivatives(h, z, j).log_inv_G[j];
}

std::vector<double> ConstantGrid::values() const { return geometric_grid(lo, hi, ratio); }

namespace {

// Smallest grid index c with y_i <= H[c][i] + tol_i for all i, or -1.
int min_upper_scale(const std::vector<std::vector<double>>& H, const std::vector<double>& y)
{
    for (std::size_t c = 0; c < H.size(); ++c) {
        bool ok = true;
        for (std::size_t i = 0; i < y.size() && ok; ++i)
            ok = y[i] <= H[c][i] + 1e-9 * (1.0 + std::abs(y[i]));
        if (ok)
            return static_cast<int>(c);
    }
    return -1;
}

// log k1 + H[c][i] <= y_i with log k1 = min_i (y_i - H[c][i]).  c is the
// largest grid value whose binding sample is not in the vertex decade (low[i]);
// a larger c only fits the grid through a k1 that keeps shrinking as |z| -> 0.
std::pair<int, double> lower_scale_fit(const std::vector<std::vector<double>>& H, const std::vector<double>& y,
                                       const std::vector<bool>& low)
{
    int bc = -1;
    double lk = 0.0;
    for (std::size_t c = 0; c < H.size(); ++c) {
        double mlow = inf, mrest = inf;
        for (std::size_t i = 0; i < y.size(); ++i)
            (low[i] ? mlow : mrest) = std::min(low[i] ? mlow : mrest, y[i] - H[c][i]);
        if (mlow < mrest)
            break;
        bc = static_cast<int>(c);
        lk = mrest;
    }
    return {bc, lk};
}

} // namespace

SandwichReport sandwich_verify(const FlatHandle& h, std::span<const SectorPoint> samples, int j_max)
{
    if (samples.empty())
        throw InputError("sandwich_verify needs samples");
    if (j_max < 0 || j_max > 12)
        throw InputError("derivative order must be in [0, 12]");
    double lr_min = inf, lr_max = -inf;
    for (const auto& z : samples) {
        if (!contains(Sector(h.gamma), z))
            throw InputError("sandwich sample outside S_gamma: " + format_point(z));
        lr_min = std::min(lr_min, z.log_r);
        lr_max = std::max(lr_max, z.log_r);
    }
    if (lr_max - lr_min < 3.0 * std::log(10.0) - 1e-9)
        throw InputError("sandwich samples must span at least 3 decades in |z|");

    SandwichReport R;
    R.j_max = j_max;
    R.samples.assign(samples.begin(), samples.end());
    const int n = static_cast<int>(samples.size());
    R.log_G = eval_flat_batch(h, samples);
    std::vector<CauchyDerivatives> der(n);
    detail::parallel_for(n, [&](int i) { der[i] = flat_derivatives(h, samples[i], j_max); });

    const auto grid = R.grid.values();
    const int nc = static_cast<int>(grid.size());
    std::vector<double> ell(n);
    for (int i = 0; i < n; ++i)
        ell[i] = R.log_G[i].real();
    // log h at c|z|, c|w| and c Re w for every grid constant
    std::vector<std::vector<double>> HM(nc, std::vector<double>(n)), HN(nc, std::vector<double>(n)),
        HNre(nc, std::vector<double>(n));
    for (int c = 0; c < nc; ++c) {
        const double lc = std::log(grid[c]);
        for (int i = 0; i < n; ++i) {
            const auto& z = samples[i];
            HM[c][i] = log_hM_ext_log(h.M, lc + z.log_r);
            HN[c][i] = log_hM_ext_log(h.N, lc + h.s * z.log_r);
            HNre[c][i] = log_hM_ext_log(h.N, lc + h.s * z.log_r + std::log(std::cos(h.s * z.theta)));
        }
    }
    std::vector<std::string> problems;
    int c3 = min_upper_scale(HM, ell), c7 = min_upper_scale(HN, ell);
    if (c3 < 0)
        problems.push_back("kappa3 infeasible on the grid");
    if (c7 < 0)
        problems.push_back("b7 infeasible on the grid");
    std::vector<bool> low(n);
    for (int i = 0; i < n; ++i)
        low[i] = samples[i].log_r < lr_min + std::log(10.0);
    auto [c2, lk1] = lower_scale_fit(HM, ell, low);
    auto [c6, lb5] = lower_scale_fit(HNre, ell, low);
    if (c2 < 0)
        problems.push_back("kappa2 infeasible on the grid");
    if (c6 < 0)
        problems.push_back("b6 infeasible on the grid");
    c2 = std::max(c2, 0);
    c6 = std::max(c6, 0);
    R.kappa3 = c3 >= 0 ? grid[c3] : inf;
    R.b7 = c7 >= 0 ? grid[c7] : inf;
    R.kappa2 = grid[c2];
    R.log_kappa1 = lk1;
    R.b6 = grid[c6];
    R.log_b5 = lb5;
    R.kappa_order_ok = R.kappa2 <= R.kappa3;
    auto rho = rho_estimate(h.N, 2.0, resolvable_t_grid(h.N, 200));
    R.rho2_N = rho.ok ? rho.rho : inf;
    R.b7_formula = 2.0 * R.rho2_N;

    // derivative envelopes, with L_j = log j! + log M_j
    std::vector<double> L(j_max + 1);
    for (int j = 0; j <= j_max; ++j)
        L[j] = std::lgamma(j + 1.0) + h.M.log_M(j);
    // (flatup): given b14, log b13 = max_{i, j>=1} (D_ij - L_j - H_i)/j
    double best = inf;
    int c14 = -1;
    double lb13 = 0.0;
    for (int c = 0; c < nc; ++c) {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            double D0 = der[i].log_G[0].real();
            ok = D0 <= HM[c][i] + 1e-9 * (1.0 + std::abs(D0));
        }
        if (!ok)
            continue;
        double lb = j_max >= 1 ? -inf : 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 1; j <= j_max; ++j) {
                double D = der[i].log_G[j].real();
                if (std::isfinite(D))
                    lb = std::max(lb, (D - L[j] - HM[c][i]) / j);
            }
        double slack = -inf;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= j_max; ++j) {
                double D = der[i].log_G[j].real();
                if (std::isfinite(D))
                    slack = std::max(slack, j * lb + L[j] + HM[c][i] - D);
            }
        if (slack < best) {
            best = slack;
            c14 = c;
            lb13 = lb;
        }
    }
    if (c14 < 0)
        problems.push_back("b14 infeasible on the grid");
    R.b14 = c14 >= 0 ? grid[c14] : inf;
    R.b13 = std::exp(lb13);
    // lower envelope of 1/G: given (b16, b17), log b15 = max_ij (R_ij - j log b16 - L_j + H_i).
    // b17 is the largest grid value whose binding sample stays out of the
    // vertex decade; b16 then minimizes the worst slack.
    int c17 = -1;
    for (int c = 0; c < nc; ++c) {
        std::vector<double> amax(j_max + 1, -inf), amin(j_max + 1, inf), alow(j_max + 1, -inf);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= j_max; ++j) {
                double Rv = der[i].log_inv_G[j].real();
                if (!std::isfinite(Rv))
                    continue;
                double A = Rv - L[j] + HM[c][i];
                (low[i] ? alow[j] : amax[j]) = std::max(low[i] ? alow[j] : amax[j], A);
                amin[j] = std::min(amin[j], A);
            }
        double best16 = inf, lb_best = 0.0;
        int b16 = -1;
        bool low_binds = false;
        for (int c16 = 0; c16 < nc; c16 += 2) {
            const double l16 = std::log(grid[c16]);
            double lb = -inf, lbl = -inf;
            for (int j = 0; j <= j_max; ++j) {
                lb = std::max(lb, amax[j] - j * l16);
                lbl = std::max(lbl, alow[j] - j * l16);
            }
            double slack = -inf;
            for (int j = 0; j <= j_max; ++j)
                if (std::isfinite(amin[j]))
                    slack = std::max(slack, std::max(lb, lbl) + j * l16 - amin[j]);
            if (slack < best16) {
                best16 = slack;
                b16 = c16;
                lb_best = std::max(lb, lbl);
                low_binds = lbl > lb;
            }
        }
        if (low_binds || b16 < 0)
            break;
        c17 = c;
        R.b17 = grid[c];
        R.b16 = grid[b16];
        R.log_b15 = lb_best;
    }
    if (c17 < 0)
        problems.push_back("b17 infeasible on the grid");

    // re-check every sample against the fitted constants
    R.margin_upper.resize(n);
    R.margin_lower.resize(n);
    double worst = inf;
    const double l13 = std::log(R.b13), l14 = std::log(R.b14), l16 = std::log(R.b16), l17 = std::log(R.b17);
    for (int i = 0; i < n; ++i) {
        const auto& z = samples[i];
        const double tol = 1e-9 * (1.0 + std::abs(ell[i]));
        R.margin_upper[i] = c3 >= 0 ? HM[c3][i] - ell[i] : -inf;
        R.margin_lower[i] = ell[i] - R.log_kappa1 - HM[c2][i];
        double m = std::min(R.margin_upper[i], R.margin_lower[i]);
        m = std::min(m, c7 >= 0 ? HN[c7][i] - ell[i] : -inf);
        m = std::min(m, ell[i] - R.log_b5 - HNre[c6][i]);
        const double h14 = log_hM_ext_log(h.M, l14 + z.log_r), h17 = log_hM_ext_log(h.M, l17 + z.log_r);
        for (int j = 0; j <= j_max; ++j) {
            double D = der[i].log_G[j].real(), Rv = der[i].log_inv_G[j].real();
            if (std::isfinite(D))
                m = std::min(m, j * l13 + L[j] + h14 - D);
            if (std::isfinite(Rv))
                m = std::min(m, R.log_b15 + j * l16 + L[j] - h17 - Rv);
        }
        if (m < -tol)
            ++R.violations;
        if (m < worst) {
            worst = m;
            R.worst_sample = i;
        }
    }
    if (R.violations > 0)
        problems.push_back(std::to_string(R.violations) + " samples violate the fitted envelopes");
    for (double v : {R.log_kappa1, R.log_b5, R.b13, R.log_b15, R.b16, R.b17})
        if (!std::isfinite(v)) {
            problems.push_back("non-finite fitted constant");
            break;
        }
    R.accepted = problems.empty();
    for (const auto& p : problems)
        R.reason += (R.reason.empty() ? "" : "; ") + p;
    if (!R.accepted && R.worst_sample >= 0)
        R.reason += "; worst sample " + format_point(samples[R.worst_sample]);
    return R;
}

std::vector<SectorPoint> sector_samples(double gamma, int n, double r_lo, double r_hi, std::uint64_t seed)
{
    if (n < 2 || !(r_lo > 0.0) || !(r_hi > r_lo) || !(gamma > 0.0))
        throw InputError("sector_samples needs n >= 2, 0 < r_lo < r_hi, gamma > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double a = std::log(r_lo), b = std::log(r_hi), th = 0.95 * gamma * pi / 2;
    std::vector<SectorPoint> z{{a, 0.0}, {b, 0.0}};
    while (static_cast<int>(z.size()) < n) {
        double lr = a + (b - a) * U(rng);
        z.push_back({lr, th * (2.0 * U(rng) - 1.0)});
    }
    return z;
}

cd gevrey_flat_oracle(double alpha, const SectorPoint& z)
{
    if (!(alpha > 0.0))
        throw InputError("oracle needs alpha > 0");
    return -std::exp(-z.log() / alpha);
}

} // namespace carleman
